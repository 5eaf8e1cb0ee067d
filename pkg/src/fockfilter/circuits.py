"""End-to-end post-selected circuits built from the element primitives.

Three devices live here:

* ``run_filter`` -- a heralded single-mode filter that keeps the vacuum and
  two-photon parts of its input and removes the one-photon part.  Two
  ancilla photons interfere on a balanced beam splitter (bunching into a
  two-photon NOON pair), one arm overlaps with the signal on a second
  splitter, and both detector ports are counted.  Three heralds are kept:
  (1,1) needs no correction, (2,0) and (0,2) need a pi/2 phase shifter on
  the surviving mode.  All three then agree, which doubles the success
  probability compared to keeping (1,1) alone.

* ``run_projector`` -- a two-photon polarization gadget that projects onto
  the span of |H,H> and |V,V>.  Wave plates and polarizing splitters route
  the "equal polarization" components into amplitudes that the two embedded
  filters pass, and the cross components into one-photon amplitudes that
  they absorb.  Intermediate states are exposed as named checkpoints with
  closed-form reference constructors.

* ``run_ghz_step``/``run_ghz_chain`` -- entangles a fresh diagonal photon
  with the newest qubit of a growing GHZ state by running the projector on
  the pair; each step succeeds with probability 1/8 and the chain to n
  photons with 8**-(n-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .detection import Branch, DetectionPattern, apply_feed_forward, project
from .elements import HWP45, HWP90, PhaseShifter, apply_hwp, apply_pbs, apply_symmetric_bs
from .errors import SimulatorError
from .fock import (
    NORM_EPS,
    ModeKey,
    ModeRegistry,
    StateVector,
    fidelity,
    make_basis_state,
    occupation,
    rename_paths,
    retag_modes,
    tensor,
    vacuum_state,
    without_paths,
)

FEEDFORWARD = "feedforward"
STRICT = "strict"
HERALD_MODES = (FEEDFORWARD, STRICT)

_RSQRT2 = 1.0 / math.sqrt(2.0)

#: canonical checkpoint names, in circuit order
PROJECTOR_STAGES = ("rotate_in", "merge", "mix", "split", "filter", "remerge", "unmix")


def _check_herald_mode(heralds: str) -> None:
    if heralds not in HERALD_MODES:
        raise SimulatorError(f"herald mode must be one of {HERALD_MODES}, got {heralds!r}")


# --- the heralded single-mode filter -----------------------------------------


@dataclass(frozen=True)
class FilterInput:
    """Amplitudes of the zero/one/two photon parts of the filter input."""

    alpha: complex
    beta: complex
    gamma: complex

    def norm_sq(self) -> float:
        return abs(self.alpha) ** 2 + abs(self.beta) ** 2 + abs(self.gamma) ** 2

    def normalized(self) -> "FilterInput":
        n = math.sqrt(self.norm_sq())
        if n * n <= NORM_EPS:
            raise SimulatorError("cannot normalize an all-zero filter input")
        return FilterInput(self.alpha / n, self.beta / n, self.gamma / n)


@dataclass
class FilterStage:
    """Record of one embedded filter run: where it acted and what it heralded."""

    target: ModeKey
    registry: ModeRegistry  # registry at detection time (patterns index into it)
    branches: tuple[Branch, ...]
    success_probability: float


@dataclass
class FilterResult:
    """Outcome of ``run_filter``.

    ``branches`` are the accepted heralds exactly as projected (before any
    correction); ``corrected_output`` is the common normalized state after
    feed-forward, which all accepted branches share up to global phase.
    """

    input: FilterInput
    heralds: str
    branches: tuple[Branch, ...]
    detection_registry: ModeRegistry
    corrected_output: StateVector | None
    success_probability: float
    target_fidelity: float
    degenerate: bool


def _heralded_filter(
    state: StateVector, target_key: ModeKey, anc_prefix: str, heralds: str
) -> tuple[StateVector | None, FilterStage]:
    """Apply the single-mode filter to one mode of ``state``.

    Returns the normalized corrected survivor (or ``None`` when nothing
    passes) together with a stage record.  The surviving ancilla mode takes
    over the filtered mode's registry key, so downstream elements keep
    addressing the same (path, polarization) slot.
    """
    key_a = ModeKey(anc_prefix + "a")
    key_b = ModeKey(anc_prefix + "b")
    ancillas = make_basis_state(ModeRegistry([key_a, key_b]), (1, 1))
    s = tensor(state, ancillas)
    it = s.registry.mode_of(target_key)
    ia = s.registry.mode_of(key_a)

    s = apply_symmetric_bs(s, ia, s.registry.mode_of(key_b))  # ancillas bunch pairwise
    s = apply_symmetric_bs(s, it, ia)  # signal overlaps one NOON arm

    p11 = DetectionPattern.of({it: 1, ia: 1})
    p20 = DetectionPattern.of({it: 2, ia: 0})
    p02 = DetectionPattern.of({it: 0, ia: 2})
    accepted = (p11,) if heralds == STRICT else (p11, p20, p02)
    correction = (PhaseShifter(key_b, math.pi / 2.0),)
    rule = {p11: (), p20: correction, p02: correction}

    branches = tuple(project(s, p) for p in accepted)
    success = math.fsum(b.probability for b in branches)
    stage = FilterStage(target_key, s.registry, branches, success)
    if success <= NORM_EPS:
        return None, stage

    corrected = [apply_feed_forward(b, rule) for b in branches if b.probability > 0.0]
    survivor = corrected[0].conditional_state
    for other in corrected[1:]:
        if fidelity(survivor, other.conditional_state) < 1.0 - 1e-9:
            raise SimulatorError("filter heralds disagree after feed-forward")
    return retag_modes(survivor, {key_b: target_key}), stage


def run_filter(inp: FilterInput, heralds: str = FEEDFORWARD) -> FilterResult:
    """Heralded removal of the one-photon component of a single-mode state.

    The input must be normalized (within 1e-12).  A pure one-photon input
    passes nothing and comes back flagged degenerate with success 0.
    """
    _check_herald_mode(heralds)
    if abs(inp.norm_sq() - 1.0) > 1e-12:
        raise SimulatorError(
            f"filter input must be normalized, got |amplitudes|^2 = {inp.norm_sq()!r}"
        )
    registry = ModeRegistry.single_paths("sig")
    signal = StateVector(
        registry, {(0,): complex(inp.alpha), (1,): complex(inp.beta), (2,): complex(inp.gamma)}
    )
    survivor, stage = _heralded_filter(signal, ModeKey("sig"), "anc_", heralds)
    if survivor is None:
        return FilterResult(
            input=inp,
            heralds=heralds,
            branches=stage.branches,
            detection_registry=stage.registry,
            corrected_output=None,
            success_probability=0.0,
            target_fidelity=0.0,
            degenerate=True,
        )
    output = rename_paths(survivor, {"sig": "out"})
    target = StateVector(
        output.registry, {(0,): complex(inp.alpha), (2,): complex(inp.gamma)}
    ).normalized()
    return FilterResult(
        input=inp,
        heralds=heralds,
        branches=stage.branches,
        detection_registry=stage.registry,
        corrected_output=output,
        success_probability=stage.success_probability,
        target_fidelity=fidelity(output, target),
        degenerate=False,
    )


# --- the equal-polarization projector ----------------------------------------


@dataclass(frozen=True)
class QubitAmplitudes:
    """Two-photon polarization amplitudes in the order HH, HV, VH, VV."""

    c0: complex  # |H,H>
    c1: complex  # |H,V>
    c2: complex  # |V,H>
    c3: complex  # |V,V>

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (complex(self.c0), complex(self.c1), complex(self.c2), complex(self.c3))

    def norm_sq(self) -> float:
        return math.fsum(abs(c) ** 2 for c in self.as_tuple())

    def normalized(self) -> "QubitAmplitudes":
        n = math.sqrt(self.norm_sq())
        if n * n <= NORM_EPS:
            raise SimulatorError("cannot normalize all-zero qubit amplitudes")
        return QubitAmplitudes(*(c / n for c in self.as_tuple()))


@dataclass
class ProjectorResult:
    input: QubitAmplitudes
    heralds: str
    output_state: StateVector | None
    success_probability: float
    checkpoints: tuple[tuple[str, StateVector], ...]
    filter_stages: tuple[FilterStage, ...]
    target_fidelity: float
    degenerate: bool


def _work_labels(port_a: str) -> tuple[str, str, str]:
    """Internal path labels for the projector's split arms and its vent port."""
    return f"{port_a}.h", f"{port_a}.v", f"{port_a}.x"


def _require_one_photon_ports(state: StateVector, ports: tuple[str, ...]) -> None:
    registry = state.registry
    for port in ports:
        h = registry.mode(port, "H")
        v = registry.mode(port, "V")
        for occ in state.terms:
            if occ[h] + occ[v] != 1:
                raise SimulatorError(
                    f"input port {port!r} must carry exactly one photon in every term"
                )


def apply_projector(
    state: StateVector,
    port_a: str,
    port_b: str,
    heralds: str = FEEDFORWARD,
    collect_checkpoints: bool = True,
) -> tuple[StateVector | None, float, tuple, tuple[FilterStage, ...]]:
    """Project two polarized ports of ``state`` onto equal polarizations.

    Spectator modes ride along untouched, so this also grows entangled
    states.  Returns ``(output, probability, checkpoints, filter_stages)``;
    the output lives on the same registry as the input (work paths are
    added internally and dropped again), or is ``None`` when nothing
    survives the heralds.
    """
    _check_herald_mode(heralds)
    _require_one_photon_ports(state, (port_a, port_b))
    arm_h, arm_v, vent = _work_labels(port_a)
    work = ModeRegistry.polarized_paths(arm_h, arm_v, vent)
    s = tensor(state, vacuum_state(work))

    checkpoints: list[tuple[str, StateVector]] = []

    def checkpoint(name: str, st: StateVector) -> None:
        if collect_checkpoints:
            checkpoints.append((name, st))

    s = apply_hwp(s, port_a, HWP90)
    checkpoint("rotate_in", s)
    # in-place polarizing splitter: the two V occupations trade places
    s = apply_pbs(s, port_a, port_b, port_a, port_b)
    checkpoint("merge", s)
    s = apply_hwp(s, port_a, HWP45)
    checkpoint("mix", s)
    s = apply_pbs(s, port_a, vent, arm_h, arm_v)
    checkpoint("split", s)

    s, p1_stage = _heralded_filter(s, ModeKey(arm_h, "H"), f"{port_a}.f1", heralds)
    stages = (p1_stage,)
    if s is None:
        return None, 0.0, tuple(checkpoints), stages
    s, p2_stage = _heralded_filter(s, ModeKey(arm_v, "V"), f"{port_a}.f2", heralds)
    stages = (p1_stage, p2_stage)
    if s is None:
        return None, 0.0, tuple(checkpoints), stages
    checkpoint("filter", s)

    s = apply_pbs(s, arm_h, arm_v, port_a, vent)
    checkpoint("remerge", s)
    s = apply_hwp(s, port_a, HWP45)
    checkpoint("unmix", s)
    # recombine onto the two ports, then undo the input rotation
    s = apply_pbs(s, port_a, port_b, port_a, port_b)
    s = apply_hwp(s, port_a, HWP90)
    s = without_paths(s, (arm_h, arm_v, vent))

    probability = p1_stage.success_probability * p2_stage.success_probability
    return s, probability, tuple(checkpoints), stages


def run_projector(
    amps: QubitAmplitudes,
    heralds: str = FEEDFORWARD,
    ports: tuple[str, str] = ("q1", "q2"),
) -> ProjectorResult:
    """Project a normalized two-photon polarization state onto span{HH, VV}.

    The surviving state is proportional to c0|H,H> + c3|V,V> on the same
    two ports, with success probability (|c0|^2+|c3|^2)/4 under the full
    three-herald acceptance and 1/4 of that under ``heralds="strict"``.
    """
    _check_herald_mode(heralds)
    if abs(amps.norm_sq() - 1.0) > 1e-12:
        raise SimulatorError(
            f"projector input must be normalized, got |amplitudes|^2 = {amps.norm_sq()!r}"
        )
    port_a, port_b = ports
    registry = ModeRegistry.polarized_paths(port_a, port_b)
    c0, c1, c2, c3 = amps.as_tuple()
    state = StateVector(
        registry,
        {
            occupation(registry, {(port_a, "H"): 1, (port_b, "H"): 1}): c0,
            occupation(registry, {(port_a, "H"): 1, (port_b, "V"): 1}): c1,
            occupation(registry, {(port_a, "V"): 1, (port_b, "H"): 1}): c2,
            occupation(registry, {(port_a, "V"): 1, (port_b, "V"): 1}): c3,
        },
    )
    output, probability, checkpoints, stages = apply_projector(
        state, port_a, port_b, heralds=heralds
    )
    if output is None:
        return ProjectorResult(
            input=amps,
            heralds=heralds,
            output_state=None,
            success_probability=0.0,
            checkpoints=checkpoints,
            filter_stages=stages,
            target_fidelity=0.0,
            degenerate=True,
        )
    target = StateVector(
        output.registry,
        {
            occupation(output.registry, {(port_a, "H"): 1, (port_b, "H"): 1}): c0,
            occupation(output.registry, {(port_a, "V"): 1, (port_b, "V"): 1}): c3,
        },
    )
    return ProjectorResult(
        input=amps,
        heralds=heralds,
        output_state=output,
        success_probability=probability,
        checkpoints=checkpoints,
        filter_stages=stages,
        target_fidelity=fidelity(output, target),
        degenerate=False,
    )


def qubit_amplitudes_of(state: StateVector, ports: tuple[str, str]) -> QubitAmplitudes:
    """Read the four one-photon-per-port amplitudes off a two-port state."""
    a, b = ports
    reg = state.registry
    return QubitAmplitudes(
        state.amplitude_at({(a, "H"): 1, (b, "H"): 1}),
        state.amplitude_at({(a, "H"): 1, (b, "V"): 1}),
        state.amplitude_at({(a, "V"): 1, (b, "H"): 1}),
        state.amplitude_at({(a, "V"): 1, (b, "V"): 1}),
    )


def projector_stage_reference(
    stage: str,
    amps: QubitAmplitudes,
    registry: ModeRegistry,
    ports: tuple[str, str] = ("q1", "q2"),
) -> StateVector:
    """Closed-form reference state for one projector checkpoint.

    Built directly from hand-derived amplitude formulas, not by running
    elements, so checkpoint tests compare two independent routes.  States
    from stage "filter" on are unnormalized (their squared norm is
    |c0|^2 + |c3|^2); compare with :func:`fock.fidelity`, which ignores
    normalization and global phase.
    """
    port_a, port_b = ports
    arm_h, arm_v, _ = _work_labels(port_a)
    c0, c1, c2, c3 = amps.as_tuple()
    r2 = _RSQRT2
    aH, aV = (port_a, "H"), (port_a, "V")
    bH, bV = (port_b, "H"), (port_b, "V")

    if stage == "rotate_in":
        recipe = [({aV: 1, bH: 1}, c0), ({aV: 1, bV: 1}, c1), ({aH: 1, bH: 1}, c2), ({aH: 1, bV: 1}, c3)]
    elif stage == "merge":
        recipe = [({bH: 1, bV: 1}, c0), ({aV: 1, bV: 1}, c1), ({aH: 1, bH: 1}, c2), ({aH: 1, aV: 1}, c3)]
    elif stage == "mix":
        recipe = [
            ({bH: 1, bV: 1}, c0),
            ({aH: 1, bV: 1}, c1 * r2),
            ({aH: 1, bH: 1}, c2 * r2),
            ({aV: 1, bV: 1}, -c1 * r2),
            ({aV: 1, bH: 1}, c2 * r2),
            ({aH: 2}, c3 * r2),
            ({aV: 2}, -c3 * r2),
        ]
    elif stage == "split":
        hh, vv = (arm_h, "H"), (arm_v, "V")
        recipe = [
            ({bH: 1, bV: 1}, c0),
            ({hh: 1, bV: 1}, c1 * r2),
            ({hh: 1, bH: 1}, c2 * r2),
            ({vv: 1, bV: 1}, -c1 * r2),
            ({vv: 1, bH: 1}, c2 * r2),
            ({hh: 2}, c3 * r2),
            ({vv: 2}, -c3 * r2),
        ]
    elif stage == "filter":
        recipe = [
            ({bH: 1, bV: 1}, c0),
            ({(arm_h, "H"): 2}, c3 * r2),
            ({(arm_v, "V"): 2}, -c3 * r2),
        ]
    elif stage == "remerge":
        recipe = [({bH: 1, bV: 1}, c0), ({aH: 2}, c3 * r2), ({aV: 2}, -c3 * r2)]
    elif stage == "unmix":
        recipe = [({bH: 1, bV: 1}, c0), ({aH: 1, aV: 1}, c3)]
    else:
        raise SimulatorError(f"unknown projector stage {stage!r}")

    terms: dict[tuple, complex] = {}
    for counts, amp in recipe:
        occ = occupation(registry, counts)
        terms[occ] = terms.get(occ, 0j) + amp
    return StateVector(registry, terms)


# --- GHZ growth ---------------------------------------------------------------


@dataclass
class GhzResult:
    n: int
    ports: tuple[str, ...]
    state: StateVector | None
    step_probabilities: tuple[float, ...]
    cumulative_probability: float
    target_fidelity: float
    degenerate: bool


def diagonal_photon(port: str) -> StateVector:
    """(|H> + |V>)/sqrt(2) on a fresh polarized path."""
    registry = ModeRegistry.polarized_paths(port)
    return StateVector(registry, {(1, 0): _RSQRT2, (0, 1): _RSQRT2})


def ghz_target(registry: ModeRegistry) -> StateVector:
    """(|H...H> + |V...V>)/sqrt(2) over every path of a polarized registry."""
    paths = registry.paths()
    all_h = occupation(registry, {(p, "H"): 1 for p in paths})
    all_v = occupation(registry, {(p, "V"): 1 for p in paths})
    return StateVector(registry, {all_h: _RSQRT2, all_v: _RSQRT2})


def _require_one_photon_per_path(state: StateVector) -> None:
    registry = state.registry
    for key in registry.keys:
        if key.pol is None:
            raise SimulatorError(f"GHZ growth needs polarized paths, found plain {key.path!r}")
    for path in registry.paths():
        h = registry.mode(path, "H")
        v = registry.mode(path, "V")
        for occ in state.terms:
            if occ[h] + occ[v] != 1:
                raise SimulatorError(
                    f"path {path!r} must carry exactly one photon in every term"
                )


def _fresh_port_label(registry: ModeRegistry) -> str:
    used = set(registry.paths())
    i = len(used) + 1
    while f"p{i}" in used:
        i += 1
    return f"p{i}"


def run_ghz_step(
    current: StateVector, heralds: str = FEEDFORWARD, new_port: str | None = None
) -> GhzResult:
    """Entangle one more diagonal photon with the newest qubit of ``current``.

    The projector runs on (last existing port, fresh port); for an ideal
    GHZ input the step succeeds with probability 1/8 and the output is the
    GHZ state one photon larger.
    """
    _check_herald_mode(heralds)
    _require_one_photon_per_path(current)
    ports = current.registry.paths()
    port_a = ports[-1]
    port_b = new_port if new_port is not None else _fresh_port_label(current.registry)
    joined = tensor(current, diagonal_photon(port_b))
    output, probability, _, _ = apply_projector(
        joined, port_a, port_b, heralds=heralds, collect_checkpoints=False
    )
    all_ports = ports + (port_b,)
    if output is None:
        return GhzResult(len(all_ports), all_ports, None, (0.0,), 0.0, 0.0, True)
    return GhzResult(
        n=len(all_ports),
        ports=all_ports,
        state=output,
        step_probabilities=(probability,),
        cumulative_probability=probability,
        target_fidelity=fidelity(output, ghz_target(output.registry)),
        degenerate=False,
    )


def run_ghz_chain(n: int, heralds: str = FEEDFORWARD) -> GhzResult:
    """Grow an n-photon GHZ state from scratch, one projector step at a time."""
    _check_herald_mode(heralds)
    if not isinstance(n, int) or n < 2:
        raise SimulatorError(f"a GHZ chain needs an integer photon count >= 2, got {n!r}")
    state = diagonal_photon("p1")
    steps: list[float] = []
    for k in range(2, n + 1):
        result = run_ghz_step(state, heralds=heralds, new_port=f"p{k}")
        if result.degenerate:  # cannot happen for ideal inputs; keep the contract total
            return GhzResult(n, result.ports, None, tuple(steps) + (0.0,), 0.0, 0.0, True)
        state = result.state
        steps.append(result.step_probabilities[0])
    cumulative = math.prod(steps)
    return GhzResult(
        n=n,
        ports=state.registry.paths(),
        state=state,
        step_probabilities=tuple(steps),
        cumulative_probability=cumulative,
        target_fidelity=fidelity(state, ghz_target(state.registry)),
        degenerate=False,
    )
