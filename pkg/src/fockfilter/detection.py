"""Photon-number detection, post-selection, and classical feed-forward.

Projecting a state onto a detection pattern yields a ``Branch``: the
pattern itself, the probability of seeing it, and the normalized state of
the surviving modes (the detected modes disappear from the registry view).
Enumerating every pattern over a detector set gives the full outcome
distribution, whose probabilities add up to the input's squared norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .elements import Element, apply_element
from .errors import UnhandledHeraldError
from .fock import ModeId, ModeKey, ModeRegistry, StateVector

#: guard below which a branch's conditional state is left empty
_ZERO_WEIGHT = 1e-300


@dataclass(frozen=True)
class DetectionPattern:
    """Required photon counts on a set of detector modes.

    Stored as a sorted tuple of (mode index, count) pairs so patterns are
    hashable and usable as feed-forward keys.
    """

    requirements: tuple[tuple[ModeId, int], ...]

    @classmethod
    def of(cls, counts: Mapping[ModeId, int]) -> "DetectionPattern":
        for mode, n in counts.items():
            if n < 0:
                raise ValueError(f"negative count {n} for mode {mode}")
        return cls(tuple(sorted(counts.items())))

    @property
    def modes(self) -> tuple[ModeId, ...]:
        return tuple(m for m, _ in self.requirements)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(n for _, n in self.requirements)

    def as_dict(self) -> dict[ModeId, int]:
        return dict(self.requirements)

    @property
    def total(self) -> int:
        return sum(self.counts)


@dataclass
class Branch:
    """One post-selected measurement outcome.

    ``probability`` is the squared norm captured by the pattern (relative
    to the state as given); ``raw_amplitude_norm`` is its square root, the
    scale that was divided out to normalize ``conditional_state``.  A zero
    branch carries an empty conditional state.
    """

    pattern: DetectionPattern
    probability: float
    conditional_state: StateVector
    raw_amplitude_norm: float


def _reduced_registry(registry: ModeRegistry, detected: Sequence[ModeId]) -> tuple[ModeRegistry, list[int]]:
    drop = set(detected)
    keep = [i for i in range(registry.n_modes) if i not in drop]
    return ModeRegistry(registry.keys[i] for i in keep), keep


def project(state: StateVector, pattern: DetectionPattern) -> Branch:
    """Post-select on exact photon counts; detected modes leave the registry."""
    registry = state.registry
    modes = pattern.modes
    for m in modes:
        registry.key_of(m)  # validates the pattern addresses real modes
    wanted = pattern.as_dict()
    reduced, keep = _reduced_registry(registry, modes)

    kept: dict[tuple, complex] = {}
    weight = 0.0
    for occ, amp in state.terms.items():
        if all(occ[m] == n for m, n in wanted.items()):
            weight += amp.real * amp.real + amp.imag * amp.imag
            kept[tuple(occ[i] for i in keep)] = amp
    if weight <= _ZERO_WEIGHT:
        return Branch(pattern, 0.0, StateVector(reduced, {}), 0.0)
    raw = math.sqrt(weight)
    scale = 1.0 / raw
    conditional = StateVector(reduced, {o: a * scale for o, a in kept.items()})
    return Branch(pattern, weight, conditional, raw)


def outcome_distribution(state: StateVector, measured: Iterable[ModeId]) -> list[Branch]:
    """Branches for every detection pattern present on the measured modes.

    Branch order is canonical (sorted by observed counts), and the branch
    probabilities sum to the squared norm of the input.
    """
    registry = state.registry
    modes = sorted(set(measured))
    for m in modes:
        registry.key_of(m)
    reduced, keep = _reduced_registry(registry, modes)

    grouped: dict[tuple[int, ...], dict[tuple, complex]] = {}
    weights: dict[tuple[int, ...], float] = {}
    for occ, amp in state.terms.items():
        observed = tuple(occ[m] for m in modes)
        grouped.setdefault(observed, {})[tuple(occ[i] for i in keep)] = amp
        weights[observed] = weights.get(observed, 0.0) + amp.real**2 + amp.imag**2

    branches = []
    for observed in sorted(grouped):
        pattern = DetectionPattern.of(dict(zip(modes, observed)))
        weight = weights[observed]
        if weight <= _ZERO_WEIGHT:
            branches.append(Branch(pattern, 0.0, StateVector(reduced, {}), 0.0))
            continue
        raw = math.sqrt(weight)
        scale = 1.0 / raw
        conditional = StateVector(
            reduced, {o: a * scale for o, a in grouped[observed].items()}
        )
        branches.append(Branch(pattern, weight, conditional, raw))
    return branches


#: feed-forward rules map detection patterns to corrective elements
FeedForwardRule = Mapping[DetectionPattern, Sequence[Element]]


def apply_feed_forward(branch: Branch, rule: FeedForwardRule) -> Branch:
    """Apply the corrections a herald calls for; probability is unchanged.

    Raises ``UnhandledHeraldError`` for patterns the rule does not cover.
    Corrections act on the surviving modes only; since detected modes left
    the branch registry, a correction naming one fails mode resolution.
    """
    if branch.pattern not in rule:
        raise UnhandledHeraldError(f"no feed-forward correction for {branch.pattern}")
    state = branch.conditional_state
    for element in rule[branch.pattern]:
        state = apply_element(state, element)
    return Branch(branch.pattern, branch.probability, state, branch.raw_amplitude_norm)


def pattern_to_record(pattern: DetectionPattern, registry: ModeRegistry) -> list[dict]:
    return [
        {
            "path": registry.key_of(m).path,
            "polarization": registry.key_of(m).pol,
            "count": n,
        }
        for m, n in pattern.requirements
    ]


def branch_to_record(branch: Branch, registry: ModeRegistry) -> dict:
    """JSON-compatible record of one branch; see ``fock.state_to_record``."""
    from .fock import state_to_record

    return {
        "pattern": pattern_to_record(branch.pattern, registry),
        "probability": branch.probability,
        "raw_amplitude_norm": branch.raw_amplitude_norm,
        "conditional_state": state_to_record(branch.conditional_state),
    }
