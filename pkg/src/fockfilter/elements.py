"""Linear-optical elements acting on sparse Fock states.

Every element is defined by how it rewrites creation operators.  A 2x2
matrix ``u`` sends the operators of modes (m1, m2) to

    a1+  ->  u[0,0] b1+ + u[1,0] b2+
    a2+  ->  u[0,1] b1+ + u[1,1] b2+

i.e. column j of ``u`` is the image of input mode j.  Applying an element
to a state expands each stored term binomially, which is exact for the
photon numbers this package supports (up to 16 per element).

The same convention drives :func:`element_mode_unitary`, which embeds an
element into the full M-mode matrix so a whole circuit can be collapsed
into one unitary for cross-checks against the permanent oracle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import (
    ModeCollisionError,
    NonUnitaryError,
    PhotonLimitError,
    UnregisteredModeError,
)
from .fock import ModeId, ModeKey, ModeRegistry, StateVector

#: exact factorial tables stop here; elements reject terms beyond this
MAX_PHOTONS_PER_ELEMENT = 16

_SQRT_FACT = tuple(math.sqrt(float(math.factorial(n))) for n in range(MAX_PHOTONS_PER_ELEMENT + 1))

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

#: balanced beam splitter, a1+ -> (b1+ + b2+)/sqrt(2), a2+ -> (b1+ - b2+)/sqrt(2)
SYMMETRIC_BS = np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]])

#: half-wave plate at 45 degrees on (H, V): H -> (H+V)/sqrt(2), V -> (H-V)/sqrt(2)
HWP45_MATRIX = SYMMETRIC_BS

#: half-wave plate at 90 degrees on (H, V): a clean H <-> V swap, no sign
HWP90_MATRIX = np.array([[0.0, 1.0], [1.0, 0.0]])

UNITARITY_TOL = 1e-12


def require_unitary(u: np.ndarray, tol: float = UNITARITY_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise NonUnitaryError(f"expected a square matrix, got shape {u.shape}")
    defect = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if defect > tol:
        raise NonUnitaryError(f"matrix is not unitary: max |u+u - I| = {defect:.3e}")
    return u


def _resolve(registry: ModeRegistry, mode: ModeId | ModeKey | tuple) -> ModeId:
    if isinstance(mode, int):
        registry.key_of(mode)  # range check
        return mode
    return registry.mode_of(mode)


def apply_phase_shifter(state: StateVector, mode: ModeId | ModeKey | tuple, phi: float) -> StateVector:
    """Multiply each term by exp(i * n * phi) for its count n on ``mode``."""
    m = _resolve(state.registry, mode)
    phases = {}
    out = {}
    for occ, amp in state.terms.items():
        n = occ[m]
        if n not in phases:
            phases[n] = cmath.exp(1j * phi * n)
        out[occ] = amp * phases[n]
    return StateVector(state.registry, out)


def apply_two_mode_unitary(
    state: StateVector,
    m1: ModeId | ModeKey | tuple,
    m2: ModeId | ModeKey | tuple,
    u: np.ndarray,
) -> StateVector:
    """Exact action of a 2x2 creation-operator unitary on modes (m1, m2).

    Each term with counts (n1, n2) expands into the binomial double sum
    over output counts; amplitudes pick up sqrt-factorial weights from the
    Fock normalization.  Terms carrying more than 16 photons across the
    two modes are rejected rather than computed with rounded factorials.
    """
    registry = state.registry
    i1 = _resolve(registry, m1)
    i2 = _resolve(registry, m2)
    if i1 == i2:
        raise ModeCollisionError("two-mode element needs two distinct modes")
    u = require_unitary(u)
    ua, ub = complex(u[0, 0]), complex(u[0, 1])
    uc, ud = complex(u[1, 0]), complex(u[1, 1])

    out: dict[tuple, complex] = {}
    for occ, amp in state.terms.items():
        n1, n2 = occ[i1], occ[i2]
        if n1 + n2 > MAX_PHOTONS_PER_ELEMENT:
            raise PhotonLimitError(
                f"{n1 + n2} photons on one element exceed the supported {MAX_PHOTONS_PER_ELEMENT}"
            )
        base = amp / (_SQRT_FACT[n1] * _SQRT_FACT[n2])
        occ_list = list(occ)
        for j in range(n1 + 1):
            c1 = math.comb(n1, j) * ua**j * uc ** (n1 - j)
            if c1 == 0:
                continue
            for k in range(n2 + 1):
                c2 = math.comb(n2, k) * ub**k * ud ** (n2 - k)
                if c2 == 0:
                    continue
                k1 = j + k
                k2 = n1 + n2 - k1
                coeff = base * c1 * c2 * _SQRT_FACT[k1] * _SQRT_FACT[k2]
                occ_list[i1] = k1
                occ_list[i2] = k2
                new_occ = tuple(occ_list)
                out[new_occ] = out.get(new_occ, 0j) + coeff
        occ_list[i1] = n1
        occ_list[i2] = n2
    return StateVector(registry, out)


def apply_symmetric_bs(
    state: StateVector,
    m1: ModeId | ModeKey | tuple,
    m2: ModeId | ModeKey | tuple,
) -> StateVector:
    """Balanced beam splitter on (m1, m2); applying it twice is the identity."""
    return apply_two_mode_unitary(state, m1, m2, SYMMETRIC_BS)


HWP45 = "45"
HWP90 = "90"

_HWP_MATRICES = {HWP45: HWP45_MATRIX, HWP90: HWP90_MATRIX}


def apply_hwp(state: StateVector, path: str, variant: str) -> StateVector:
    """Half-wave plate on the (H, V) sub-modes of one spatial path.

    ``variant`` "45" mixes H/V on the diagonal basis; "90" swaps them.
    """
    try:
        u = _HWP_MATRICES[variant]
    except KeyError:
        raise UnregisteredModeError(f"unknown half-wave plate variant {variant!r}") from None
    h = state.registry.mode(path, "H")
    v = state.registry.mode(path, "V")
    return apply_two_mode_unitary(state, h, v, u)


def _pbs_pairs(
    registry: ModeRegistry, in1: str, in2: str, out1: str, out2: str
) -> list[tuple[ModeId, ModeId]]:
    return [
        (registry.mode(in1, "H"), registry.mode(out1, "H")),
        (registry.mode(in1, "V"), registry.mode(out2, "V")),
        (registry.mode(in2, "H"), registry.mode(out2, "H")),
        (registry.mode(in2, "V"), registry.mode(out1, "V")),
    ]


def apply_pbs(state: StateVector, in1: str, in2: str, out1: str, out2: str) -> StateVector:
    """Polarizing beam splitter: H transmits, V reflects, no extra phase.

    H of ``in1`` lands on ``out1``, V of ``in1`` on ``out2``, H of ``in2``
    on ``out2`` and V of ``in2`` on ``out1``.  Each routing is realized as
    a swap of the two sub-mode occupations, so the element is a pure mode
    permutation; with ``out1 == in1`` and ``out2 == in2`` it reduces to
    the in-place exchange of the two V sub-modes.
    """
    registry = state.registry
    perm = list(range(registry.n_modes))
    for a, b in _pbs_pairs(registry, in1, in2, out1, out2):
        if perm[a] not in (a, b) or perm[b] not in (a, b):
            raise ModeCollisionError(
                f"beam-splitter routing touches mode {registry.key_of(a)!r} twice"
            )
        perm[a], perm[b] = b, a
    out: dict[tuple, complex] = {}
    for occ, amp in state.terms.items():
        new_occ = [0] * len(occ)
        for i, n in enumerate(occ):
            new_occ[perm[i]] = n
        out[tuple(new_occ)] = amp
    return StateVector(registry, out)


# --- element records --------------------------------------------------------
#
# Small frozen dataclasses describe elements independently of any state, so
# feed-forward rules and circuit files can carry them around and serialize
# them as structured records.


@dataclass(frozen=True)
class PhaseShifter:
    mode: ModeKey | ModeId
    phi: float

    kind = "phase_shifter"


@dataclass(frozen=True)
class BeamSplitterSymmetric:
    m1: ModeKey | ModeId
    m2: ModeKey | ModeId

    kind = "beam_splitter_symmetric"


@dataclass(frozen=True)
class HalfWavePlate:
    path: str
    variant: str  # "45" or "90"

    kind = "half_wave_plate"


@dataclass(frozen=True)
class PolarizingBS:
    in1: str
    in2: str
    out1: str
    out2: str

    kind = "polarizing_bs"


@dataclass(frozen=True)
class GeneralTwoMode:
    m1: ModeKey | ModeId
    m2: ModeKey | ModeId
    u: tuple  # 2x2 nested tuple of complex entries

    kind = "general_two_mode"

    def matrix(self) -> np.ndarray:
        return np.array(self.u, dtype=complex)


Element = Union[PhaseShifter, BeamSplitterSymmetric, HalfWavePlate, PolarizingBS, GeneralTwoMode]


def two_mode_element(m1, m2, u: np.ndarray) -> GeneralTwoMode:
    """GeneralTwoMode record from an array-like matrix (validated unitary)."""
    u = require_unitary(u)
    return GeneralTwoMode(m1, m2, ((complex(u[0, 0]), complex(u[0, 1])),
                                   (complex(u[1, 0]), complex(u[1, 1]))))


def apply_element(state: StateVector, element: Element) -> StateVector:
    if isinstance(element, PhaseShifter):
        return apply_phase_shifter(state, element.mode, element.phi)
    if isinstance(element, BeamSplitterSymmetric):
        return apply_symmetric_bs(state, element.m1, element.m2)
    if isinstance(element, HalfWavePlate):
        return apply_hwp(state, element.path, element.variant)
    if isinstance(element, PolarizingBS):
        return apply_pbs(state, element.in1, element.in2, element.out1, element.out2)
    if isinstance(element, GeneralTwoMode):
        return apply_two_mode_unitary(state, element.m1, element.m2, element.matrix())
    raise TypeError(f"not an element record: {element!r}")


def apply_circuit(state: StateVector, elements: Iterable[Element]) -> StateVector:
    for element in elements:
        state = apply_element(state, element)
    return state


def element_mode_unitary(element: Element, registry: ModeRegistry) -> np.ndarray:
    """Embed one element into the full M-mode creation-operator matrix."""
    m = registry.n_modes
    full = np.eye(m, dtype=complex)
    if isinstance(element, PhaseShifter):
        i = _resolve(registry, element.mode)
        full[i, i] = cmath.exp(1j * element.phi)
        return full
    if isinstance(element, (BeamSplitterSymmetric, GeneralTwoMode)):
        if isinstance(element, BeamSplitterSymmetric):
            u = SYMMETRIC_BS.astype(complex)
        else:
            u = require_unitary(element.matrix())
        i1 = _resolve(registry, element.m1)
        i2 = _resolve(registry, element.m2)
        full[i1, i1], full[i1, i2] = u[0, 0], u[0, 1]
        full[i2, i1], full[i2, i2] = u[1, 0], u[1, 1]
        return full
    if isinstance(element, HalfWavePlate):
        u = _HWP_MATRICES[element.variant].astype(complex)
        h = registry.mode(element.path, "H")
        v = registry.mode(element.path, "V")
        full[h, h], full[h, v] = u[0, 0], u[0, 1]
        full[v, h], full[v, v] = u[1, 0], u[1, 1]
        return full
    if isinstance(element, PolarizingBS):
        perm = list(range(m))
        for a, b in _pbs_pairs(registry, element.in1, element.in2, element.out1, element.out2):
            if perm[a] not in (a, b) or perm[b] not in (a, b):
                raise ModeCollisionError("beam-splitter routing touches a mode twice")
            perm[a], perm[b] = b, a
        full = np.zeros((m, m), dtype=complex)
        for src, dst in enumerate(perm):
            full[dst, src] = 1.0
        return full
    raise TypeError(f"not an element record: {element!r}")


def circuit_unitary(elements: Sequence[Element], registry: ModeRegistry) -> np.ndarray:
    """Mode unitary of a whole circuit: later elements multiply from the left."""
    total = np.eye(registry.n_modes, dtype=complex)
    for element in elements:
        total = element_mode_unitary(element, registry) @ total
    return total


# --- structured-text records -------------------------------------------------

def _mode_to_record(mode: ModeKey | ModeId):
    if isinstance(mode, int):
        return mode
    return {"path": mode.path, "polarization": mode.pol}


def _mode_from_record(value) -> ModeKey | ModeId:
    if isinstance(value, int):
        return value
    return ModeKey(value["path"], value["polarization"])


def element_to_record(element: Element) -> dict:
    """JSON-compatible record {kind, ...parameters} for one element."""
    if isinstance(element, PhaseShifter):
        return {"kind": element.kind, "mode": _mode_to_record(element.mode), "phi": element.phi}
    if isinstance(element, BeamSplitterSymmetric):
        return {
            "kind": element.kind,
            "m1": _mode_to_record(element.m1),
            "m2": _mode_to_record(element.m2),
        }
    if isinstance(element, HalfWavePlate):
        return {"kind": element.kind, "path": element.path, "variant": element.variant}
    if isinstance(element, PolarizingBS):
        return {
            "kind": element.kind,
            "in1": element.in1,
            "in2": element.in2,
            "out1": element.out1,
            "out2": element.out2,
        }
    if isinstance(element, GeneralTwoMode):
        return {
            "kind": element.kind,
            "m1": _mode_to_record(element.m1),
            "m2": _mode_to_record(element.m2),
            "u": [[{"re": z.real, "im": z.imag} for z in row] for row in element.u],
        }
    raise TypeError(f"not an element record: {element!r}")


def element_from_record(record: Mapping) -> Element:
    kind = record.get("kind")
    if kind == PhaseShifter.kind:
        return PhaseShifter(_mode_from_record(record["mode"]), float(record["phi"]))
    if kind == BeamSplitterSymmetric.kind:
        return BeamSplitterSymmetric(
            _mode_from_record(record["m1"]), _mode_from_record(record["m2"])
        )
    if kind == HalfWavePlate.kind:
        return HalfWavePlate(record["path"], record["variant"])
    if kind == PolarizingBS.kind:
        return PolarizingBS(record["in1"], record["in2"], record["out1"], record["out2"])
    if kind == GeneralTwoMode.kind:
        u = tuple(
            tuple(complex(cell["re"], cell["im"]) for cell in row) for row in record["u"]
        )
        return GeneralTwoMode(_mode_from_record(record["m1"]), _mode_from_record(record["m2"]), u)
    raise ValueError(f"unknown element kind {kind!r}")
