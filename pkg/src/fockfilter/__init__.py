"""Exact sparse Fock-state simulation of post-selected linear optics.

The package models a handful of photons spread over labeled spatial paths
(optionally split into H/V polarization sub-modes), pushes them through
phase shifters, beam splitters, wave plates, and polarizing splitters, and
post-selects on photon-counting patterns.  On top of the primitives sit a
heralded single-mode filter that removes one-photon components, a
two-photon projector onto equal polarizations, and a GHZ-growing chain
that applies the projector repeatedly.  A permanent-based oracle computes
every transition amplitude a second, independent way.
"""

from .circuits import (
    FEEDFORWARD,
    PROJECTOR_STAGES,
    STRICT,
    FilterInput,
    FilterResult,
    FilterStage,
    GhzResult,
    ProjectorResult,
    QubitAmplitudes,
    apply_projector,
    diagonal_photon,
    ghz_target,
    projector_stage_reference,
    qubit_amplitudes_of,
    run_filter,
    run_ghz_chain,
    run_ghz_step,
    run_projector,
)
from .detection import (
    Branch,
    DetectionPattern,
    FeedForwardRule,
    apply_feed_forward,
    branch_to_record,
    outcome_distribution,
    project,
)
from .elements import (
    HWP45,
    HWP90,
    MAX_PHOTONS_PER_ELEMENT,
    SYMMETRIC_BS,
    BeamSplitterSymmetric,
    Element,
    GeneralTwoMode,
    HalfWavePlate,
    PhaseShifter,
    PolarizingBS,
    apply_circuit,
    apply_element,
    apply_hwp,
    apply_pbs,
    apply_phase_shifter,
    apply_symmetric_bs,
    apply_two_mode_unitary,
    circuit_unitary,
    element_from_record,
    element_mode_unitary,
    element_to_record,
    two_mode_element,
)
from .errors import (
    DegenerateStateError,
    DimensionMismatchError,
    ModeCollisionError,
    NonUnitaryError,
    PhotonLimitError,
    RegistryMismatchError,
    ScenarioError,
    SimulatorError,
    UnhandledHeraldError,
    UnregisteredModeError,
)
from .fock import (
    ModeKey,
    ModeRegistry,
    StateVector,
    basis_state,
    fidelity,
    inner_product,
    make_basis_state,
    norm_sq,
    normalize,
    occupation,
    rename_paths,
    retag_modes,
    state_from_record,
    state_to_record,
    superpose,
    tensor,
    vacuum_state,
    without_paths,
)
from .oracle import MAX_PERMANENT_SIZE, amplitude_via_permanent, permanent
from .verify import TrialResult, haar_unitary, occupations, run_equivalence_trials

__version__ = "0.1.0"
