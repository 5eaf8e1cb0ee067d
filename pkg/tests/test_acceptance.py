"""Acceptance suite: one test per headline guarantee, one PASS/FAIL line each.

Run with ``pytest -v tests/test_acceptance.py`` (add ``-s`` to see the
lines on success too).  Every quantity here is exact arithmetic at desk
scale; tolerances are 1e-12 for probabilities and norms, 1e-9 for state
fidelities, and 1e-10 for engine-versus-oracle amplitude agreement.
"""

import math

import numpy as np

from fockfilter import (
    FilterInput,
    ModeRegistry,
    QubitAmplitudes,
    StateVector,
    apply_circuit,
    apply_phase_shifter,
    apply_symmetric_bs,
    fidelity,
    ghz_target,
    make_basis_state,
    norm_sq,
    occupation,
    outcome_distribution,
    projector_stage_reference,
    qubit_amplitudes_of,
    run_equivalence_trials,
    run_filter,
    run_ghz_chain,
    run_projector,
)
from fockfilter.cli import main
from fockfilter.verify import random_circuit

PROB_TOL = 1e-12
FID_TOL = 1e-9
ORACLE_TOL = 1e-10


def report(criterion, ok, detail):
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def random_filter_inputs(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        raw = rng.normal(size=3) + 1j * rng.normal(size=3)
        n = math.sqrt(sum(abs(c) ** 2 for c in raw))
        yield FilterInput(raw[0] / n, raw[1] / n, raw[2] / n)


def random_qubit_inputs(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        raw = rng.normal(size=4) + 1j * rng.normal(size=4)
        n = math.sqrt(sum(abs(c) ** 2 for c in raw))
        yield QubitAmplitudes(*(c / n for c in raw))


def test_criterion_1_two_photon_bunching():
    registry = ModeRegistry.single_paths("a", "b")
    out = apply_symmetric_bs(make_basis_state(registry, (1, 1)), 0, 1)
    r = 1.0 / math.sqrt(2.0)
    target = StateVector(registry, {(2, 0): r, (0, 2): -r})
    f = fidelity(out, target)
    report(1, f >= 1.0 - 1e-12, f"|1,1> bunches, fidelity deficit {1.0 - f:.3e}")


def test_criterion_2_filter_contract_on_random_inputs():
    worst_fid = 1.0
    worst_prob = 0.0
    worst_split = 0.0
    for inp in random_filter_inputs(1000, seed=20260817):
        w = abs(inp.alpha) ** 2 + abs(inp.gamma) ** 2
        result = run_filter(inp)
        worst_prob = max(worst_prob, abs(result.success_probability - w / 2.0))
        sig = result.detection_registry.mode("sig")
        for branch in result.branches:
            expected = w / 4.0 if branch.pattern.as_dict()[sig] == 1 else w / 8.0
            worst_split = max(worst_split, abs(branch.probability - expected))
            if branch.probability == 0.0:
                continue
            state = branch.conditional_state
            if branch.pattern.as_dict()[sig] != 1:
                state = apply_phase_shifter(state, 0, math.pi / 2.0)
            target = StateVector(state.registry, {(0,): inp.alpha, (2,): inp.gamma})
            worst_fid = min(worst_fid, fidelity(state, target))
    ok = worst_fid >= 1.0 - FID_TOL and worst_prob <= PROB_TOL and worst_split <= PROB_TOL
    report(
        2,
        ok,
        "1000 inputs: worst corrected-branch fidelity deficit "
        f"{1.0 - worst_fid:.3e}, success-probability error {worst_prob:.3e}, "
        f"herald-split error {worst_split:.3e}",
    )


def test_criterion_3_filter_basis_behavior():
    vac = run_filter(FilterInput(1.0, 0.0, 0.0))
    vac_target = StateVector(vac.corrected_output.registry, {(0,): 1.0})
    f0 = fidelity(vac.corrected_output, vac_target)

    two = run_filter(FilterInput(0.0, 0.0, 1.0))
    two_target = StateVector(two.corrected_output.registry, {(2,): 1.0})
    f2 = fidelity(two.corrected_output, two_target)

    one = run_filter(FilterInput(0.0, 1.0, 0.0))
    ok = (
        f0 >= 1.0 - 1e-12
        and f2 >= 1.0 - 1e-12
        and one.degenerate
        and one.success_probability <= 1e-12
    )
    report(
        3,
        ok,
        f"|0> passes (deficit {1.0 - f0:.3e}), |2> passes (deficit {1.0 - f2:.3e}), "
        f"|1> blocked (p = {one.success_probability:.3e})",
    )


def test_criterion_4_projector_contract_on_random_inputs():
    worst_fid = 1.0
    worst_prob = 0.0
    worst_cross = 0.0
    for amps in random_qubit_inputs(1000, seed=8675309):
        result = run_projector(amps)
        expected = (abs(amps.c0) ** 2 + abs(amps.c3) ** 2) / 4.0
        worst_prob = max(worst_prob, abs(result.success_probability - expected))
        out_state = result.output_state
        registry = out_state.registry
        target = StateVector(
            registry,
            {
                occupation(registry, {("q1", "H"): 1, ("q2", "H"): 1}): amps.c0,
                occupation(registry, {("q1", "V"): 1, ("q2", "V"): 1}): amps.c3,
            },
        )
        worst_fid = min(worst_fid, fidelity(out_state, target))
        out = qubit_amplitudes_of(out_state, ("q1", "q2"))
        worst_cross = max(worst_cross, abs(out.c1), abs(out.c2))
    ok = worst_fid >= 1.0 - FID_TOL and worst_prob <= PROB_TOL and worst_cross <= 1e-12
    report(
        4,
        ok,
        f"1000 inputs: worst output fidelity deficit {1.0 - worst_fid:.3e}, "
        f"probability error {worst_prob:.3e}, cross-term leakage {worst_cross:.3e}",
    )


def test_criterion_5_checkpoints_match_closed_forms():
    worst = 1.0
    for amps in random_qubit_inputs(100, seed=31415):
        result = run_projector(amps)
        for name, state in result.checkpoints:
            reference = projector_stage_reference(name, amps, state.registry, ("q1", "q2"))
            worst = min(worst, fidelity(state, reference))
    report(
        5,
        worst >= 1.0 - FID_TOL,
        f"100 inputs x 7 stages: worst reference fidelity deficit {1.0 - worst:.3e}",
    )


def test_criterion_6_bell_generation():
    result = run_projector(QubitAmplitudes(0.5, 0.5, 0.5, 0.5))
    p_err = abs(result.success_probability - 0.125)
    registry = result.output_state.registry
    r = 1.0 / math.sqrt(2.0)
    bell = StateVector(
        registry,
        {
            occupation(registry, {("q1", "H"): 1, ("q2", "H"): 1}): r,
            occupation(registry, {("q1", "V"): 1, ("q2", "V"): 1}): r,
        },
    )
    f = fidelity(result.output_state, bell)
    ok = p_err <= PROB_TOL and f >= 1.0 - FID_TOL
    report(6, ok, f"p error {p_err:.3e}, Bell fidelity deficit {1.0 - f:.3e}")


def test_criterion_7_ghz_chain_probabilities():
    worst_cum = 0.0
    worst_step = 0.0
    worst_fid = 1.0
    for n in (2, 3, 4, 5):
        result = run_ghz_chain(n)
        worst_cum = max(worst_cum, abs(result.cumulative_probability - 8.0 ** -(n - 1)))
        for p in result.step_probabilities:
            worst_step = max(worst_step, abs(p - 0.125))
        worst_fid = min(worst_fid, fidelity(result.state, ghz_target(result.state.registry)))
    ok = worst_cum <= PROB_TOL and worst_step <= PROB_TOL and worst_fid >= 1.0 - FID_TOL
    report(
        7,
        ok,
        f"n=2..5: cumulative error {worst_cum:.3e} (n=5 hits 1/4096), "
        f"step error {worst_step:.3e}, GHZ fidelity deficit {1.0 - worst_fid:.3e}",
    )


def test_criterion_8_oracle_equivalence():
    trials = run_equivalence_trials(seed=7, trials=200, tol=ORACLE_TOL)
    matched = sum(1 for t in trials if t.matched)
    worst = max(t.max_abs_error for t in trials)
    report(
        8,
        matched == len(trials) and worst <= ORACLE_TOL,
        f"{matched}/{len(trials)} random circuits match the permanent oracle, "
        f"worst amplitude error {worst:.3e}",
    )


def test_criterion_9_conservation_suite():
    trials = run_equivalence_trials(seed=7, trials=200, tol=ORACLE_TOL)
    worst_norm = max(t.norm_error for t in trials)
    conserved = all(t.photons_conserved for t in trials)

    # detection completeness: outcome probabilities exhaust the state's weight
    rng = np.random.default_rng(2718)
    worst_sum = 0.0
    for _ in range(50):
        registry, occ, elements = random_circuit(rng)
        state = apply_circuit(make_basis_state(registry, occ), elements)
        measured = list(range(max(1, registry.n_modes // 2)))
        branches = outcome_distribution(state, measured)
        total = math.fsum(b.probability for b in branches)
        worst_sum = max(worst_sum, abs(total - norm_sq(state)))
    ok = worst_norm <= PROB_TOL and conserved and worst_sum <= PROB_TOL
    report(
        9,
        ok,
        f"200 circuits: norm drift {worst_norm:.3e}, photon number conserved: "
        f"{conserved}; 50 outcome distributions complete within {worst_sum:.3e}",
    )


def test_criterion_10_projector_idempotence():
    worst_fid = 1.0
    worst_prob = 0.0
    for amps in random_qubit_inputs(50, seed=1729):
        first = run_projector(amps)
        again = qubit_amplitudes_of(first.output_state, ("q1", "q2")).normalized()
        second = run_projector(again)
        worst_prob = max(worst_prob, abs(second.success_probability - 0.25))
        worst_fid = min(worst_fid, fidelity(second.output_state, first.output_state))
    ok = worst_fid >= 1.0 - FID_TOL and worst_prob <= PROB_TOL
    report(
        10,
        ok,
        f"50 re-projections: fixed-point fidelity deficit {1.0 - worst_fid:.3e}, "
        f"probability error vs 1/4 {worst_prob:.3e}",
    )


def test_criterion_11_verify_reports_are_deterministic(tmp_path):
    first = tmp_path / "first.json"
    second = tmp_path / "second.json"
    code1 = main(["verify", "--seed", "7", "--trials", "200", "--out", str(first)])
    code2 = main(["verify", "--seed", "7", "--trials", "200", "--out", str(second)])
    identical = first.read_bytes() == second.read_bytes()
    ok = code1 == 0 and code2 == 0 and identical
    report(
        11,
        ok,
        f"two `verify --seed 7 --trials 200` runs exit {code1}/{code2} and the "
        f"reports are {'byte-identical' if identical else 'DIFFERENT'}",
    )
