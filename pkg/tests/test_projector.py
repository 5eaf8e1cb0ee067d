"""Projection of two polarization qubits onto span{HH, VV}."""

import math

import numpy as np
import pytest

from fockfilter import (
    PROJECTOR_STAGES,
    ModeKey,
    QubitAmplitudes,
    SimulatorError,
    fidelity,
    norm_sq,
    projector_stage_reference,
    qubit_amplitudes_of,
    run_projector,
)

RNG = np.random.default_rng(5150)


def random_qubit_amplitudes(rng=RNG):
    raw = rng.normal(size=4) + 1j * rng.normal(size=4)
    n = math.sqrt(sum(abs(c) ** 2 for c in raw))
    return QubitAmplitudes(*(c / n for c in raw))


def test_hh_passes_with_probability_quarter():
    result = run_projector(QubitAmplitudes(1.0, 0.0, 0.0, 0.0))
    assert not result.degenerate
    assert abs(result.success_probability - 0.25) < 1e-12
    out = qubit_amplitudes_of(result.output_state, ("q1", "q2"))
    assert abs(abs(out.c0) - 1.0) < 1e-9
    assert abs(out.c1) < 1e-12 and abs(out.c2) < 1e-12 and abs(out.c3) < 1e-12


def test_vv_passes_with_probability_quarter():
    result = run_projector(QubitAmplitudes(0.0, 0.0, 0.0, 1.0))
    assert abs(result.success_probability - 0.25) < 1e-12
    out = qubit_amplitudes_of(result.output_state, ("q1", "q2"))
    assert abs(abs(out.c3) - 1.0) < 1e-9


def test_cross_terms_are_rejected():
    for amps in (QubitAmplitudes(0, 1, 0, 0), QubitAmplitudes(0, 0, 1, 0)):
        result = run_projector(amps)
        assert result.degenerate
        assert result.output_state is None
        assert result.success_probability <= 1e-12


def test_success_probability_formula_and_output():
    for _ in range(100):
        amps = random_qubit_amplitudes()
        result = run_projector(amps)
        expected = (abs(amps.c0) ** 2 + abs(amps.c3) ** 2) / 4.0
        assert abs(result.success_probability - expected) < 1e-12
        out = qubit_amplitudes_of(result.output_state, ("q1", "q2"))
        assert abs(out.c1) < 1e-12 and abs(out.c2) < 1e-12
        # output proportional to (c0, 0, 0, c3): check the amplitude ratio
        if abs(amps.c0) > 0.1 and abs(amps.c3) > 0.1:
            ratio = (out.c3 / out.c0) / (amps.c3 / amps.c0)
            assert abs(ratio - 1.0) < 1e-9
        assert result.target_fidelity > 1.0 - 1e-9
        assert abs(norm_sq(result.output_state) - 1.0) < 1e-12


def test_output_lives_on_the_input_ports():
    result = run_projector(random_qubit_amplitudes(), ports=("alice", "bob"))
    registry = result.output_state.registry
    assert registry.paths() == ("alice", "bob")
    assert registry.contains(ModeKey("alice", "H"))
    assert registry.contains(ModeKey("bob", "V"))


def test_bell_input_keeps_half_the_weight():
    amps = QubitAmplitudes(0.5, 0.5, 0.5, 0.5)
    result = run_projector(amps)
    assert abs(result.success_probability - 0.125) < 1e-12
    out = qubit_amplitudes_of(result.output_state, ("q1", "q2"))
    assert abs(abs(out.c0) - 1.0 / math.sqrt(2.0)) < 1e-9
    assert abs(abs(out.c3) - 1.0 / math.sqrt(2.0)) < 1e-9


def test_strict_heralds_cost_a_factor_sixteen():
    amps = random_qubit_amplitudes()
    expected = (abs(amps.c0) ** 2 + abs(amps.c3) ** 2) / 16.0
    result = run_projector(amps, heralds="strict")
    assert abs(result.success_probability - expected) < 1e-12
    assert result.target_fidelity > 1.0 - 1e-9


def test_projecting_twice_changes_nothing():
    """The map is a projector: its output is a fixed point up to the 1/4."""
    for _ in range(20):
        first = run_projector(random_qubit_amplitudes())
        out = qubit_amplitudes_of(first.output_state, ("q1", "q2")).normalized()
        second = run_projector(out)
        assert abs(second.success_probability - 0.25) < 1e-12
        assert fidelity(second.output_state, first.output_state) > 1.0 - 1e-9


def test_checkpoints_match_the_closed_forms():
    for _ in range(25):
        amps = random_qubit_amplitudes()
        result = run_projector(amps)
        names = tuple(name for name, _ in result.checkpoints)
        assert names == PROJECTOR_STAGES
        for name, state in result.checkpoints:
            reference = projector_stage_reference(name, amps, state.registry, ("q1", "q2"))
            assert fidelity(state, reference) > 1.0 - 1e-9


def test_two_filter_stages_are_recorded():
    result = run_projector(random_qubit_amplitudes())
    assert len(result.filter_stages) == 2
    # each embedded filter succeeds with the same probability, and the
    # product is the overall success
    p1, p2 = (stage.success_probability for stage in result.filter_stages)
    assert abs(p1 * p2 - result.success_probability) < 1e-12


def test_unnormalized_amplitudes_rejected():
    with pytest.raises(SimulatorError):
        run_projector(QubitAmplitudes(1.0, 1.0, 0.0, 0.0))
