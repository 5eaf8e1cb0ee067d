"""The heralded one-photon filter: basis behavior, herald bookkeeping,
success probabilities, and an independent permanent-based cross-check of
its interferometer."""

import math

import numpy as np
import pytest

from fockfilter import (
    BeamSplitterSymmetric,
    FilterInput,
    ModeKey,
    ModeRegistry,
    SimulatorError,
    StateVector,
    amplitude_via_permanent,
    apply_circuit,
    apply_phase_shifter,
    circuit_unitary,
    fidelity,
    make_basis_state,
    run_filter,
    tensor,
)

RNG = np.random.default_rng(90210)


def random_filter_input(rng=RNG):
    raw = rng.normal(size=3) + 1j * rng.normal(size=3)
    n = math.sqrt(sum(abs(c) ** 2 for c in raw))
    return FilterInput(raw[0] / n, raw[1] / n, raw[2] / n)


def branch_by_signal_count(result, count):
    sig = result.detection_registry.mode("sig")
    for branch in result.branches:
        if branch.pattern.as_dict()[sig] == count:
            return branch
    raise AssertionError(f"no branch detected {count} photons on the signal mode")


def test_vacuum_passes_with_probability_half():
    result = run_filter(FilterInput(1.0, 0.0, 0.0))
    assert not result.degenerate
    assert abs(result.success_probability - 0.5) < 1e-12
    assert result.target_fidelity > 1.0 - 1e-12
    out = result.corrected_output
    assert abs(abs(out.amplitude((0,))) - 1.0) < 1e-12


def test_two_photon_component_passes_with_probability_half():
    result = run_filter(FilterInput(0.0, 0.0, 1.0))
    assert abs(result.success_probability - 0.5) < 1e-12
    assert abs(abs(result.corrected_output.amplitude((2,))) - 1.0) < 1e-12
    assert result.target_fidelity > 1.0 - 1e-12


def test_single_photon_is_blocked_completely():
    result = run_filter(FilterInput(0.0, 1.0, 0.0))
    assert result.degenerate
    assert result.corrected_output is None
    assert result.success_probability <= 1e-12
    for branch in result.branches:
        assert branch.probability <= 1e-12


def test_equal_superposition_example():
    c = 1.0 / math.sqrt(3.0)
    result = run_filter(FilterInput(c, c, c))
    assert abs(result.success_probability - 1.0 / 3.0) < 1e-12
    assert result.target_fidelity > 1.0 - 1e-9


def test_success_probability_and_herald_split():
    for _ in range(200):
        inp = random_filter_input()
        w = abs(inp.alpha) ** 2 + abs(inp.gamma) ** 2
        result = run_filter(inp)
        assert abs(result.success_probability - w / 2.0) < 1e-12
        # coincidence takes half the successes, each bunched herald a quarter
        p11 = branch_by_signal_count(result, 1).probability
        p20 = branch_by_signal_count(result, 2).probability
        p02 = branch_by_signal_count(result, 0).probability
        assert abs(p11 - w / 4.0) < 1e-12
        assert abs(p20 - w / 8.0) < 1e-12
        assert abs(p02 - w / 8.0) < 1e-12


def test_every_branch_reaches_the_target_after_its_correction():
    """Heralds (2,0) and (0,2) need the pi/2 shift; (1,1) needs nothing."""
    for _ in range(50):
        inp = random_filter_input()
        result = run_filter(inp)
        for branch in result.branches:
            if branch.probability == 0.0:
                continue
            state = branch.conditional_state
            sig = result.detection_registry.mode("sig")
            if branch.pattern.as_dict()[sig] != 1:
                state = apply_phase_shifter(state, 0, math.pi / 2.0)
            target = StateVector(state.registry, {(0,): inp.alpha, (2,): inp.gamma})
            assert fidelity(state, target) > 1.0 - 1e-9


def test_corrected_output_is_common_to_all_branches():
    inp = random_filter_input()
    result = run_filter(inp)
    out = result.corrected_output
    target = StateVector(out.registry, {(0,): inp.alpha, (2,): inp.gamma})
    assert fidelity(out, target) > 1.0 - 1e-9
    assert result.target_fidelity > 1.0 - 1e-9


def test_strict_mode_keeps_only_the_coincidence():
    inp = random_filter_input()
    w = abs(inp.alpha) ** 2 + abs(inp.gamma) ** 2
    result = run_filter(inp, heralds="strict")
    assert len(result.branches) == 1
    assert abs(result.success_probability - w / 4.0) < 1e-12
    assert result.target_fidelity > 1.0 - 1e-9


def test_unnormalized_input_rejected():
    with pytest.raises(SimulatorError):
        run_filter(FilterInput(1.0, 1.0, 0.0))


def test_unknown_herald_mode_rejected():
    with pytest.raises(SimulatorError):
        run_filter(FilterInput(1.0, 0.0, 0.0), heralds="lenient")


def test_interferometer_amplitudes_match_the_permanent_oracle():
    """Rebuild the filter's two-splitter network and compare every
    pre-detection amplitude against the permanent formula."""
    registry = ModeRegistry.single_paths("sig", "anc_a", "anc_b")
    circuit = [
        BeamSplitterSymmetric(ModeKey("anc_a"), ModeKey("anc_b")),
        BeamSplitterSymmetric(ModeKey("sig"), ModeKey("anc_a")),
    ]
    u = circuit_unitary(circuit, registry)

    for _ in range(25):
        inp = random_filter_input()

        def oracle_amp(out):
            return (
                inp.alpha * amplitude_via_permanent(u, (0, 1, 1), out)
                + inp.beta * amplitude_via_permanent(u, (1, 1, 1), out)
                + inp.gamma * amplitude_via_permanent(u, (2, 1, 1), out)
            )

        signal = StateVector(
            ModeRegistry.single_paths("sig"),
            {(0,): inp.alpha, (1,): inp.beta, (2,): inp.gamma},
        )
        ancillas = make_basis_state(ModeRegistry.single_paths("anc_a", "anc_b"), (1, 1))
        engine = apply_circuit(tensor(signal, ancillas), circuit)
        for occ, amp in engine:
            assert abs(amp - oracle_amp(occ)) < 1e-10

        # herald probabilities straight from the oracle amplitudes
        w = abs(inp.alpha) ** 2 + abs(inp.gamma) ** 2
        p11 = sum(abs(oracle_amp((1, 1, nb))) ** 2 for nb in range(3))
        p20 = sum(abs(oracle_amp((2, 0, nb))) ** 2 for nb in range(3))
        assert abs(p11 - w / 4.0) < 1e-12
        assert abs(p20 - w / 8.0) < 1e-12
