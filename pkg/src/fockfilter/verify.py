"""Randomized cross-checks of the element engine against the permanent oracle.

Each trial draws a small mode layout, a short random circuit, and a random
input occupation, then compares every output amplitude computed by the
sequential binomial engine with the permanent of the collapsed circuit
unitary.  The two routes share no amplitude code, so sustained agreement
pins down both.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .elements import (
    HWP45,
    HWP90,
    BeamSplitterSymmetric,
    Element,
    HalfWavePlate,
    PhaseShifter,
    PolarizingBS,
    apply_circuit,
    circuit_unitary,
    two_mode_element,
)
from .fock import ModeRegistry, StateVector, make_basis_state
from .oracle import amplitude_via_permanent

MAX_TRIAL_MODES = 5
MAX_TRIAL_PHOTONS = 4
MAX_TRIAL_ELEMENTS = 6


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed n x n unitary (QR of a complex Gaussian, phase-fixed)."""
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def occupations(n_photons: int, n_modes: int) -> Iterator[tuple[int, ...]]:
    """All ways to place n_photons into n_modes, lexicographic."""
    if n_modes == 1:
        yield (n_photons,)
        return
    for first in range(n_photons + 1):
        for rest in occupations(n_photons - first, n_modes - 1):
            yield (first,) + rest


@dataclass
class TrialResult:
    index: int
    n_modes: int
    n_photons: int
    n_elements: int
    max_abs_error: float
    norm_error: float
    photons_conserved: bool
    matched: bool


def _random_layout(rng: np.random.Generator) -> ModeRegistry:
    """A registry of 2..5 modes mixing polarized pairs and plain paths."""
    n_polarized = int(rng.integers(0, 3))
    min_plain = 2 if n_polarized == 0 else 0
    max_plain = MAX_TRIAL_MODES - 2 * n_polarized
    n_plain = int(rng.integers(min_plain, max_plain + 1))
    keys = []
    for i in range(n_polarized):
        label = chr(ord("a") + i)
        keys.extend([(label, "H"), (label, "V")])
    keys.extend((f"m{i + 1}", None) for i in range(n_plain))
    return ModeRegistry(keys)


def _random_element(registry: ModeRegistry, rng: np.random.Generator) -> Element:
    polarized = [p for p in registry.paths() if registry.contains((p, "H"))]
    kinds = ["phase", "bs", "general"]
    if polarized:
        kinds.append("hwp")
    if len(polarized) >= 2:
        kinds.append("pbs")
    kind = kinds[int(rng.integers(0, len(kinds)))]
    if kind == "phase":
        mode = int(rng.integers(0, registry.n_modes))
        return PhaseShifter(mode, float(rng.uniform(0.0, 2.0 * np.pi)))
    if kind in ("bs", "general"):
        m1, m2 = rng.choice(registry.n_modes, size=2, replace=False)
        if kind == "bs":
            return BeamSplitterSymmetric(int(m1), int(m2))
        return two_mode_element(int(m1), int(m2), haar_unitary(2, rng))
    if kind == "hwp":
        path = polarized[int(rng.integers(0, len(polarized)))]
        variant = HWP45 if rng.integers(0, 2) == 0 else HWP90
        return HalfWavePlate(path, variant)
    p1, p2 = (polarized[int(i)] for i in rng.choice(len(polarized), size=2, replace=False))
    return PolarizingBS(p1, p2, p1, p2)


def random_circuit(
    rng: np.random.Generator,
) -> tuple[ModeRegistry, tuple[int, ...], list[Element]]:
    """One random (registry, input occupation, element list) triple."""
    registry = _random_layout(rng)
    n_photons = int(rng.integers(1, MAX_TRIAL_PHOTONS + 1))
    occ = [0] * registry.n_modes
    for _ in range(n_photons):
        occ[int(rng.integers(0, registry.n_modes))] += 1
    n_elements = int(rng.integers(1, MAX_TRIAL_ELEMENTS + 1))
    elements = [_random_element(registry, rng) for _ in range(n_elements)]
    return registry, tuple(occ), elements


def run_trial(index: int, rng: np.random.Generator, tol: float = 1e-10) -> TrialResult:
    registry, input_occ, elements = random_circuit(rng)
    state = make_basis_state(registry, input_occ)
    evolved = apply_circuit(state, elements)
    total_unitary = circuit_unitary(elements, registry)

    n_photons = sum(input_occ)
    max_err = 0.0
    for occ in occupations(n_photons, registry.n_modes):
        expected = amplitude_via_permanent(total_unitary, input_occ, occ)
        err = abs(evolved.amplitude(occ) - expected)
        if err > max_err:
            max_err = err
    norm_error = abs(evolved.norm_sq() - 1.0)
    conserved = evolved.photon_numbers() <= {n_photons}
    return TrialResult(
        index=index,
        n_modes=registry.n_modes,
        n_photons=n_photons,
        n_elements=len(elements),
        max_abs_error=max_err,
        norm_error=norm_error,
        photons_conserved=conserved,
        matched=bool(max_err <= tol and conserved),
    )


def run_equivalence_trials(seed: int, trials: int, tol: float = 1e-10) -> list[TrialResult]:
    """Seeded batch of engine-vs-oracle trials; deterministic given (seed, trials)."""
    rng = np.random.default_rng(seed)
    return [run_trial(i, rng, tol=tol) for i in range(trials)]
