"""Sparse algebra of multimode bosonic Fock states.

A state is a map from occupation tuples (one photon count per registered
mode) to complex amplitudes.  Only occupied basis kets are stored, so a
handful of photons spread over a dozen modes stays a handful of dict
entries.  Every operation is pure: it returns a new state and never
mutates its inputs, which lets circuit code keep intermediate states as
checkpoints without defensive copies.
"""

from __future__ import annotations

import math
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple

from .errors import (
    DegenerateStateError,
    DimensionMismatchError,
    ModeCollisionError,
    RegistryMismatchError,
    UnregisteredModeError,
)

#: below this squared norm a state counts as zero for normalization purposes
NORM_EPS = 1e-24

POLARIZATIONS = ("H", "V")

ModeId = int
OccupationVector = tuple  # tuple[int, ...]; hashable and orderable, used as map key


class ModeKey(NamedTuple):
    """Registry key for one bosonic mode: a spatial path, optionally polarized.

    ``pol`` is ``None`` for a plain single mode, or ``"H"``/``"V"`` for the
    two polarization sub-modes of one spatial path.
    """

    path: str
    pol: str | None = None


class ModeRegistry:
    """Immutable, ordered assignment of mode keys to dense indices.

    The registry fixes the meaning of every slot in an occupation tuple.
    A spatial path either carries a single plain mode or an H/V pair,
    never both.
    """

    __slots__ = ("_keys", "_index")

    def __init__(self, keys: Iterable[ModeKey | tuple]) -> None:
        normalized = []
        for key in keys:
            if not isinstance(key, ModeKey):
                key = ModeKey(*key)
            if key.pol not in (None, "H", "V"):
                raise ModeCollisionError(f"unknown polarization tag {key.pol!r}")
            normalized.append(key)
        self._keys: tuple[ModeKey, ...] = tuple(normalized)
        self._index = {key: i for i, key in enumerate(self._keys)}
        if len(self._index) != len(self._keys):
            raise ModeCollisionError("duplicate mode keys in registry")
        plain = {k.path for k in self._keys if k.pol is None}
        polarized = {k.path for k in self._keys if k.pol is not None}
        overlap = plain & polarized
        if overlap:
            raise ModeCollisionError(
                f"paths carry both a plain mode and polarized sub-modes: {sorted(overlap)}"
            )

    @classmethod
    def single_paths(cls, *paths: str) -> "ModeRegistry":
        """Registry of plain (unpolarized) modes, one per path label."""
        return cls(ModeKey(p) for p in paths)

    @classmethod
    def polarized_paths(cls, *paths: str) -> "ModeRegistry":
        """Registry where each path carries an H and a V sub-mode."""
        return cls(ModeKey(p, pol) for p in paths for pol in POLARIZATIONS)

    @property
    def n_modes(self) -> int:
        return len(self._keys)

    def __len__(self) -> int:
        return len(self._keys)

    @property
    def keys(self) -> tuple[ModeKey, ...]:
        return self._keys

    def mode(self, path: str, pol: str | None = None) -> ModeId:
        """Dense index of the mode addressed by (path, pol)."""
        try:
            return self._index[ModeKey(path, pol)]
        except KeyError:
            raise UnregisteredModeError(f"no mode {ModeKey(path, pol)!r} in registry") from None

    def mode_of(self, key: ModeKey | tuple) -> ModeId:
        if not isinstance(key, ModeKey):
            key = ModeKey(*key)
        try:
            return self._index[key]
        except KeyError:
            raise UnregisteredModeError(f"no mode {key!r} in registry") from None

    def key_of(self, mode: ModeId) -> ModeKey:
        if not 0 <= mode < len(self._keys):
            raise UnregisteredModeError(f"mode index {mode} outside registry of {len(self._keys)}")
        return self._keys[mode]

    def contains(self, key: ModeKey | tuple) -> bool:
        if not isinstance(key, ModeKey):
            key = ModeKey(*key)
        return key in self._index

    def paths(self) -> tuple[str, ...]:
        """Distinct path labels in first-appearance order."""
        seen: dict[str, None] = {}
        for key in self._keys:
            seen.setdefault(key.path, None)
        return tuple(seen)

    def path_modes(self, path: str) -> tuple[ModeId, ...]:
        """All mode indices living on one spatial path."""
        found = tuple(i for i, k in enumerate(self._keys) if k.path == path)
        if not found:
            raise UnregisteredModeError(f"no path {path!r} in registry")
        return found

    def renamed(self, path_map: Mapping[str, str]) -> "ModeRegistry":
        """New registry with spatial paths renamed; indices are unchanged."""
        return ModeRegistry(
            ModeKey(path_map.get(k.path, k.path), k.pol) for k in self._keys
        )

    def retagged(self, key_map: Mapping[ModeKey, ModeKey]) -> "ModeRegistry":
        """New registry with individual mode keys replaced; indices unchanged."""
        return ModeRegistry(key_map.get(k, k) for k in self._keys)

    def merged(self, other: "ModeRegistry") -> "ModeRegistry":
        """Concatenated registry; key sets must stay collision-free."""
        return ModeRegistry(self._keys + other._keys)

    def without_modes(self, modes: Iterable[ModeId]) -> "ModeRegistry":
        drop = set(modes)
        for m in drop:
            self.key_of(m)  # validates range
        return ModeRegistry(k for i, k in enumerate(self._keys) if i not in drop)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ModeRegistry) and self._keys == other._keys

    def __hash__(self) -> int:
        return hash(self._keys)

    def __repr__(self) -> str:
        inner = ", ".join(
            k.path if k.pol is None else f"{k.path}/{k.pol}" for k in self._keys
        )
        return f"ModeRegistry[{inner}]"


def occupation(registry: ModeRegistry, counts: Mapping[ModeKey | tuple, int]) -> OccupationVector:
    """Build an occupation tuple from named mode counts; unnamed modes get 0."""
    occ = [0] * registry.n_modes
    for key, n in counts.items():
        if not isinstance(n, int) or n < 0:
            raise DimensionMismatchError(f"photon count must be a non-negative int, got {n!r}")
        occ[registry.mode_of(key)] = n
    return tuple(occ)


class StateVector:
    """Sparse complex superposition of Fock basis states over one registry.

    Amplitudes with magnitude exactly zero are dropped at construction;
    small-but-finite amplitudes are kept until :meth:`pruned` is called
    explicitly.
    """

    __slots__ = ("_registry", "_terms")

    def __init__(self, registry: ModeRegistry, terms: Mapping[OccupationVector, complex]) -> None:
        n = registry.n_modes
        clean: dict[OccupationVector, complex] = {}
        for occ, amp in terms.items():
            occ = tuple(occ)
            if len(occ) != n:
                raise DimensionMismatchError(
                    f"occupation of length {len(occ)} against registry of {n} modes"
                )
            for c in occ:
                if not isinstance(c, int) or c < 0:
                    raise DimensionMismatchError(f"bad photon count {c!r} in {occ}")
            amp = complex(amp)
            if amp != 0:
                clean[occ] = amp
        self._registry = registry
        self._terms = clean

    @property
    def registry(self) -> ModeRegistry:
        return self._registry

    @property
    def terms(self) -> Mapping[OccupationVector, complex]:
        """Read-only view of the stored occupation -> amplitude map."""
        return MappingProxyType(self._terms)

    def amplitude(self, occ: OccupationVector) -> complex:
        return self._terms.get(tuple(occ), 0j)

    def amplitude_at(self, counts: Mapping[ModeKey | tuple, int]) -> complex:
        """Amplitude of the basis ket addressed by named mode counts."""
        return self.amplitude(occupation(self._registry, counts))

    def norm_sq(self) -> float:
        return math.fsum(a.real * a.real + a.imag * a.imag for a in self._terms.values())

    def is_zero(self, eps: float = NORM_EPS) -> bool:
        return self.norm_sq() <= eps

    def normalized(self) -> "StateVector":
        n2 = self.norm_sq()
        if n2 <= NORM_EPS:
            raise DegenerateStateError(f"cannot normalize state with norm^2 = {n2}")
        scale = 1.0 / math.sqrt(n2)
        return StateVector(self._registry, {o: a * scale for o, a in self._terms.items()})

    def scaled(self, factor: complex) -> "StateVector":
        return StateVector(self._registry, {o: a * factor for o, a in self._terms.items()})

    def pruned(self, eps: float) -> "StateVector":
        """Drop terms with |amplitude| <= eps.  Never applied implicitly."""
        return StateVector(
            self._registry, {o: a for o, a in self._terms.items() if abs(a) > eps}
        )

    def photon_numbers(self) -> set[int]:
        """Total photon number of each stored term."""
        return {sum(o) for o in self._terms}

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[OccupationVector, complex]]:
        return iter(sorted(self._terms.items()))

    def __repr__(self) -> str:
        parts = []
        for occ, amp in sorted(self._terms.items())[:4]:
            parts.append(f"({amp:.4g})|{','.join(map(str, occ))}>")
        if len(self._terms) > 4:
            parts.append(f"... {len(self._terms)} terms")
        return " + ".join(parts) if parts else "0"


def make_basis_state(registry: ModeRegistry, occ: Iterable[int]) -> StateVector:
    """Single Fock basis ket |occ> with amplitude 1."""
    return StateVector(registry, {tuple(occ): 1.0 + 0j})


def basis_state(registry: ModeRegistry, counts: Mapping[ModeKey | tuple, int]) -> StateVector:
    """Basis ket addressed by named mode counts (unnamed modes vacuum)."""
    return make_basis_state(registry, occupation(registry, counts))


def vacuum_state(registry: ModeRegistry) -> StateVector:
    return make_basis_state(registry, (0,) * registry.n_modes)


def _require_same_registry(a: StateVector, b: StateVector) -> None:
    if a.registry != b.registry:
        raise RegistryMismatchError(
            f"states live on different registries: {a.registry!r} vs {b.registry!r}"
        )


def superpose(a: StateVector, ca: complex, b: StateVector, cb: complex) -> StateVector:
    """ca*a + cb*b.  Exact zeros produced by cancellation are dropped."""
    _require_same_registry(a, b)
    out = {o: amp * ca for o, amp in a.terms.items()}
    for o, amp in b.terms.items():
        out[o] = out.get(o, 0j) + amp * cb
    return StateVector(a.registry, out)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    _require_same_registry(a, b)
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = 0j
    for occ, amp in small.terms.items():
        other = large.terms.get(occ)
        if other is not None:
            if small is a:
                total += amp.conjugate() * other
            else:
                total += other.conjugate() * amp
    return total


def norm_sq(a: StateVector) -> float:
    return a.norm_sq()


def normalize(a: StateVector) -> StateVector:
    return a.normalized()


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product; the two registries must be collision-free."""
    merged = a.registry.merged(b.registry)
    out: dict[OccupationVector, complex] = {}
    for oa, ca in a.terms.items():
        for ob, cb in b.terms.items():
            out[oa + ob] = ca * cb
    return StateVector(merged, out)


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 / (<a|a><b|b>): squared overlap, insensitive to global phase
    and to the normalization of either argument."""
    _require_same_registry(a, b)
    na, nb = a.norm_sq(), b.norm_sq()
    if na <= NORM_EPS or nb <= NORM_EPS:
        raise DegenerateStateError("fidelity of a (near) zero state is undefined")
    ip = inner_product(a, b)
    f = (ip.real * ip.real + ip.imag * ip.imag) / (na * nb)
    return min(max(f, 0.0), 1.0)


def rename_paths(state: StateVector, path_map: Mapping[str, str]) -> StateVector:
    """Rename spatial paths; amplitudes and mode order are untouched."""
    return StateVector(state.registry.renamed(path_map), dict(state.terms))


def retag_modes(state: StateVector, key_map: Mapping[ModeKey, ModeKey]) -> StateVector:
    """Replace individual mode keys; amplitudes and mode order are untouched."""
    return StateVector(state.registry.retagged(key_map), dict(state.terms))


def without_paths(state: StateVector, paths: Iterable[str]) -> StateVector:
    """Drop whole spatial paths from the registry view.

    Every dropped mode must be vacuum in every term; this is bookkeeping,
    not a measurement.
    """
    drop: list[ModeId] = []
    for p in paths:
        drop.extend(state.registry.path_modes(p))
    drop_set = set(drop)
    for occ in state.terms:
        for m in drop_set:
            if occ[m] != 0:
                raise ModeCollisionError(
                    f"cannot drop occupied mode {state.registry.key_of(m)!r}"
                )
    keep = [i for i in range(state.registry.n_modes) if i not in drop_set]
    reduced = ModeRegistry(state.registry.keys[i] for i in keep)
    terms = {tuple(occ[i] for i in keep): amp for occ, amp in state.terms.items()}
    return StateVector(reduced, terms)


# --- serialization ---------------------------------------------------------
#
# States round-trip through plain JSON-compatible records.  Floats pass
# through Python's shortest round-trip repr, so loading the record restores
# bit-identical amplitudes.

def registry_to_records(registry: ModeRegistry) -> list[dict]:
    return [{"path": k.path, "polarization": k.pol} for k in registry.keys]


def registry_from_records(rows: Iterable[Mapping]) -> ModeRegistry:
    return ModeRegistry(ModeKey(r["path"], r["polarization"]) for r in rows)


def state_to_record(state: StateVector) -> dict:
    """JSON-compatible record: mode table plus sorted amplitude terms."""
    return {
        "modes": registry_to_records(state.registry),
        "terms": [
            {"occupation": list(occ), "re": amp.real, "im": amp.imag}
            for occ, amp in sorted(state.terms.items())
        ],
    }


def state_from_record(record: Mapping) -> StateVector:
    registry = registry_from_records(record["modes"])
    terms = {
        tuple(t["occupation"]): complex(t["re"], t["im"]) for t in record["terms"]
    }
    return StateVector(registry, terms)
