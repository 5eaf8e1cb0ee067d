"""Command-line front end.

Each run command prints a short summary and, given ``--out REPORT.json``,
writes a deterministic JSON report plus two siblings next to it: a CSV
table with the headline numbers and a PNG figure (suppressed by
``--no-figures``).  Exit codes: 0 success, 1 degenerate input or failed
verification, 2 usage or scenario-file errors.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import sys
import time
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from .circuits import (
    FEEDFORWARD,
    HERALD_MODES,
    FilterInput,
    FilterResult,
    GhzResult,
    ProjectorResult,
    QubitAmplitudes,
    projector_stage_reference,
    qubit_amplitudes_of,
    run_filter,
    run_ghz_chain,
    run_projector,
)
from .detection import branch_to_record
from .errors import ScenarioError, SimulatorError
from .fock import fidelity, state_to_record
from .figures import (
    save_filter_figure,
    save_ghz_figure,
    save_projector_figure,
    save_sweep_figure,
)
from .scenario import Scenario, grid_axis_values, load_scenario, parse_complex
from .verify import run_equivalence_trials

NORM_TOL = 1e-12
_PROJECTOR_PORTS = ("q1", "q2")
_BASIS_LABELS = ("HH", "HV", "VH", "VV")


# --- small shared pieces -------------------------------------------------------


def _complex_flag(text: str) -> complex:
    try:
        return parse_complex(text)
    except ScenarioError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _cnum(z: complex) -> dict:
    return {"im": float(z.imag), "re": float(z.real)}


def _out_path(args: argparse.Namespace) -> Path | None:
    out = getattr(args, "out", None)
    if out is None:
        return None
    path = Path(out)
    if path.suffix in (".csv", ".png"):
        raise ScenarioError(
            f"--out {out}: the .csv and .png extensions are reserved for the "
            "table and figure written alongside the report"
        )
    return path


def _write_json(report: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def _emit(
    args: argparse.Namespace,
    report: dict,
    header: Sequence[str],
    rows: Sequence[Sequence[Any]],
    figure: Callable[[Path], Path | None] | None,
) -> list[str]:
    """Write report + CSV + figure next to --out; list what was written."""
    out = _out_path(args)
    if out is None:
        return []
    written: list[str] = []
    _write_json(report, out)
    written.append(str(out))
    csv_path = out.with_suffix(".csv")
    _write_csv(csv_path, header, rows)
    written.append(str(csv_path))
    if figure is not None and not getattr(args, "no_figures", False):
        fig_path = figure(out.with_suffix(".png"))
        if fig_path is not None:
            written.append(str(fig_path))
    return written


def _print_written(written: list[str]) -> None:
    if written:
        print("wrote " + ", ".join(written))


def _herald_label(record: list[dict]) -> str:
    parts = []
    for entry in record:
        name = entry["path"]
        if entry["polarization"] is not None:
            name += "." + entry["polarization"]
        parts.append(f"{name}={entry['count']}")
    return " ".join(parts)


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


# --- parameter handling --------------------------------------------------------


def _filter_input_from(params: dict, warnings: list[dict]) -> FilterInput:
    """Build the filter input, completing beta when it is not given.

    With alpha and gamma alone, |beta|^2 takes up the remaining weight so
    the input is normalized by construction; an explicit beta that leaves
    the total away from 1 is renormalized with a warning.
    """
    alpha = parse_complex(params["alpha"])
    gamma = parse_complex(params["gamma"])
    beta_raw = params.get("beta")
    if beta_raw is None:
        rest = 1.0 - abs(alpha) ** 2 - abs(gamma) ** 2
        if rest < -NORM_TOL:
            raise ScenarioError(
                f"|alpha|^2 + |gamma|^2 = {abs(alpha)**2 + abs(gamma)**2!r} exceeds 1; "
                "give beta explicitly or shrink the amplitudes"
            )
        return FilterInput(alpha, math.sqrt(max(rest, 0.0)), gamma)
    inp = FilterInput(alpha, parse_complex(beta_raw), gamma)
    if abs(inp.norm_sq() - 1.0) > NORM_TOL:
        warnings.append({"kind": "input_renormalized", "norm_sq": inp.norm_sq()})
        inp = inp.normalized()
    return inp


def _qubit_amplitudes_from(params: dict, warnings: list[dict]) -> QubitAmplitudes:
    amps = QubitAmplitudes(*(parse_complex(params.get(f"c{i}", 0.0)) for i in range(4)))
    if abs(amps.norm_sq() - 1.0) > NORM_TOL:
        warnings.append({"kind": "input_renormalized", "norm_sq": amps.norm_sq()})
        amps = amps.normalized()
    return amps


def _ghz_count_from(params: dict) -> int:
    n = params.get("n")
    if isinstance(n, bool) or not isinstance(n, (int, float)) or int(n) != n:
        raise ScenarioError(f"ghz needs an integer photon count n, got {n!r}")
    n = int(n)
    if n < 2:
        raise ScenarioError(f"ghz needs n >= 2, got {n}")
    return n


# --- report builders -----------------------------------------------------------


def _filter_report(result: FilterResult, warnings: list[dict]) -> dict:
    inp = result.input
    return {
        "circuit": "filter",
        "heralds": result.heralds,
        "parameters": {
            "alpha": _cnum(inp.alpha),
            "beta": _cnum(inp.beta),
            "gamma": _cnum(inp.gamma),
        },
        "warnings": warnings,
        "degenerate": result.degenerate,
        "success_probability": result.success_probability,
        "target_fidelity": result.target_fidelity,
        "branches": [branch_to_record(b, result.detection_registry) for b in result.branches],
        "output_state": None
        if result.corrected_output is None
        else state_to_record(result.corrected_output),
    }


def _filter_rows(result: FilterResult) -> tuple[list[str], list[list]]:
    header = ["herald", "probability", "raw_amplitude_norm"]
    rows = []
    for branch in result.branches:
        record = branch_to_record(branch, result.detection_registry)
        rows.append(
            [_herald_label(record["pattern"]), _fmt(branch.probability), _fmt(branch.raw_amplitude_norm)]
        )
    return header, rows


def _projector_report(
    result: ProjectorResult, warnings: list[dict], with_checkpoints: bool
) -> dict:
    report = {
        "circuit": "projector",
        "heralds": result.heralds,
        "parameters": {f"c{i}": _cnum(c) for i, c in enumerate(result.input.as_tuple())},
        "warnings": warnings,
        "degenerate": result.degenerate,
        "success_probability": result.success_probability,
        "target_fidelity": result.target_fidelity,
        "filters": [
            {
                "target": {"path": st.target.path, "polarization": st.target.pol},
                "success_probability": st.success_probability,
                "branches": [branch_to_record(b, st.registry) for b in st.branches],
            }
            for st in result.filter_stages
        ],
        "output_state": None
        if result.output_state is None
        else state_to_record(result.output_state),
    }
    if with_checkpoints:
        report["checkpoints"] = [
            {
                "stage": name,
                "fidelity_to_reference": fidelity(
                    state,
                    projector_stage_reference(
                        name, result.input, state.registry, _PROJECTOR_PORTS
                    ),
                ),
                "state": state_to_record(state),
            }
            for name, state in result.checkpoints
        ]
    return report


def _projector_rows(result: ProjectorResult) -> tuple[list[str], list[list]]:
    header = ["basis", "input_re", "input_im", "output_re", "output_im"]
    outs = (0j, 0j, 0j, 0j)
    if result.output_state is not None:
        outs = qubit_amplitudes_of(result.output_state, _PROJECTOR_PORTS).as_tuple()
    rows = []
    for label, c_in, c_out in zip(_BASIS_LABELS, result.input.as_tuple(), outs):
        rows.append([label, _fmt(c_in.real), _fmt(c_in.imag), _fmt(c_out.real), _fmt(c_out.imag)])
    return header, rows


def _ghz_report(result: GhzResult, warnings: list[dict]) -> dict:
    return {
        "circuit": "ghz",
        "parameters": {"n": result.n},
        "ports": list(result.ports),
        "warnings": warnings,
        "degenerate": result.degenerate,
        "step_probabilities": list(result.step_probabilities),
        "cumulative_probability": result.cumulative_probability,
        "target_fidelity": result.target_fidelity,
        "output_state": None if result.state is None else state_to_record(result.state),
    }


def _ghz_rows(result: GhzResult) -> tuple[list[str], list[list]]:
    header = ["step", "size", "probability", "cumulative"]
    rows = []
    cumulative = 1.0
    for i, p in enumerate(result.step_probabilities, start=1):
        cumulative *= p
        rows.append([i, i + 1, _fmt(p), _fmt(cumulative)])
    return header, rows


# --- run commands ----------------------------------------------------------------


def _finish_filter(args: argparse.Namespace, result: FilterResult, warnings: list[dict]) -> int:
    report = _filter_report(result, warnings)
    header, rows = _filter_rows(result)
    figure = None if result.degenerate else (lambda p: save_filter_figure(result, p))
    written = _emit(args, report, header, rows, figure)
    if result.degenerate:
        print("no herald accepted: the input has no photon-number-even component")
    else:
        print(f"one-photon filter: success probability {_fmt(result.success_probability)}")
        print(f"fidelity to the kept 0/2-photon target: {_fmt(result.target_fidelity)}")
        for row in rows:
            print(f"  herald {row[0]}: p = {row[1]}")
    _print_written(written)
    return 1 if result.degenerate else 0


def cmd_filter(args: argparse.Namespace) -> int:
    warnings: list[dict] = []
    params = {"alpha": args.alpha, "beta": args.beta, "gamma": args.gamma}
    inp = _filter_input_from(params, warnings)
    for w in warnings:
        print(f"warning: input renormalized (|amplitudes|^2 was {w['norm_sq']:.6g})", file=sys.stderr)
    t0 = time.perf_counter()
    result = run_filter(inp, heralds=args.heralds)
    status = _finish_filter(args, result, warnings)
    print(f"wall time: {time.perf_counter() - t0:.3f} s")
    return status


def _finish_projector(
    args: argparse.Namespace,
    result: ProjectorResult,
    warnings: list[dict],
    with_checkpoints: bool,
) -> int:
    report = _projector_report(result, warnings, with_checkpoints)
    header, rows = _projector_rows(result)
    figure = None if result.degenerate else (lambda p: save_projector_figure(result, p))
    written = _emit(args, report, header, rows, figure)
    if result.degenerate:
        print("no herald accepted: the input has no HH/VV component")
    else:
        print(
            "projection onto span{HH, VV}: "
            f"success probability {_fmt(result.success_probability)}"
        )
        print(f"fidelity to c0|HH> + c3|VV>: {_fmt(result.target_fidelity)}")
        for row in rows:
            print(f"  {row[0]}: input {row[1]}+{row[2]}i -> output {row[3]}+{row[4]}i")
        if with_checkpoints and "checkpoints" in report:
            for entry in report["checkpoints"]:
                print(
                    f"  checkpoint {entry['stage']}: reference fidelity "
                    f"{_fmt(entry['fidelity_to_reference'])}"
                )
    _print_written(written)
    return 1 if result.degenerate else 0


def cmd_project(args: argparse.Namespace) -> int:
    warnings: list[dict] = []
    granular = {"c0": args.c0, "c1": args.c1, "c2": args.c2, "c3": args.c3}
    given = [name for name, value in granular.items() if value is not None]
    if args.c is not None:
        if given:
            raise ScenarioError(
                f"--c conflicts with --{given[0]}; give the amplitudes one way or the other"
            )
        parts = [p for p in args.c.split(",")]
        if len(parts) != 4:
            raise ScenarioError(f"--c needs four comma-separated amplitudes, got {args.c!r}")
        params = {f"c{i}": parse_complex(p) for i, p in enumerate(parts)}
    else:
        params = {name: 0j if value is None else value for name, value in granular.items()}
    amps = _qubit_amplitudes_from(params, warnings)
    for w in warnings:
        print(f"warning: input renormalized (|amplitudes|^2 was {w['norm_sq']:.6g})", file=sys.stderr)
    t0 = time.perf_counter()
    result = run_projector(amps, heralds=args.heralds, ports=_PROJECTOR_PORTS)
    status = _finish_projector(args, result, warnings, args.checkpoints)
    print(f"wall time: {time.perf_counter() - t0:.3f} s")
    return status


def _finish_ghz(args: argparse.Namespace, result: GhzResult, warnings: list[dict]) -> int:
    report = _ghz_report(result, warnings)
    header, rows = _ghz_rows(result)
    figure = None if result.degenerate else (lambda p: save_ghz_figure(result, p))
    written = _emit(args, report, header, rows, figure)
    steps = ", ".join(_fmt(p) for p in result.step_probabilities)
    print(
        f"GHZ growth to n={result.n}: cumulative probability "
        f"{_fmt(result.cumulative_probability)} (steps: {steps})"
    )
    print(f"fidelity to (|H...H> + |V...V>)/sqrt(2): {_fmt(result.target_fidelity)}")
    _print_written(written)
    return 1 if result.degenerate else 0


def cmd_ghz(args: argparse.Namespace) -> int:
    n = _ghz_count_from({"n": args.n})
    t0 = time.perf_counter()
    result = run_ghz_chain(n, heralds=args.heralds)
    status = _finish_ghz(args, result, [])
    print(f"wall time: {time.perf_counter() - t0:.3f} s")
    return status


def cmd_trace(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    if scenario.grid is not None:
        raise ScenarioError("this scenario defines a grid; run it with `sweep`")
    warnings: list[dict] = []
    t0 = time.perf_counter()
    if scenario.circuit == "filter":
        inp = _filter_input_from(scenario.parameters, warnings)
        result = run_filter(inp, heralds=scenario.heralds)
        status = _finish_filter(args, result, warnings)
    elif scenario.circuit == "projector":
        amps = _qubit_amplitudes_from(scenario.parameters, warnings)
        result = run_projector(amps, heralds=scenario.heralds, ports=_PROJECTOR_PORTS)
        status = _finish_projector(args, result, warnings, scenario.emit_checkpoints)
    else:
        n = _ghz_count_from(scenario.parameters)
        result = run_ghz_chain(n, heralds=scenario.heralds)
        status = _finish_ghz(args, result, warnings)
    print(f"wall time: {time.perf_counter() - t0:.3f} s")
    return status


# --- verify ----------------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    if args.trials < 1:
        raise ScenarioError(f"--trials must be at least 1, got {args.trials}")
    t0 = time.perf_counter()
    trials = run_equivalence_trials(args.seed, args.trials, tol=args.tol)
    elapsed = time.perf_counter() - t0
    passed = [t for t in trials if t.matched and t.photons_conserved and t.norm_error <= args.tol]
    max_err = max((t.max_abs_error for t in trials), default=0.0)
    max_norm = max((t.norm_error for t in trials), default=0.0)
    report = {
        "circuit": "verify",
        "parameters": {"seed": args.seed, "tol": args.tol, "trials": args.trials},
        "all_passed": len(passed) == len(trials),
        "matched": len(passed),
        "max_abs_error": max_err,
        "max_norm_error": max_norm,
        "results": [
            {
                "index": t.index,
                "matched": t.matched,
                "max_abs_error": t.max_abs_error,
                "n_elements": t.n_elements,
                "n_modes": t.n_modes,
                "n_photons": t.n_photons,
                "norm_error": t.norm_error,
                "photons_conserved": t.photons_conserved,
            }
            for t in trials
        ],
    }
    header = [
        "trial", "n_modes", "n_photons", "n_elements",
        "max_abs_error", "norm_error", "photons_conserved", "matched",
    ]
    rows = [
        [
            t.index, t.n_modes, t.n_photons, t.n_elements,
            _fmt(t.max_abs_error), _fmt(t.norm_error),
            str(t.photons_conserved).lower(), str(t.matched).lower(),
        ]
        for t in trials
    ]
    written = _emit(args, report, header, rows, None)
    print(
        f"{len(passed)}/{len(trials)} matched "
        f"(max |amplitude error| = {max_err:.3e}, max norm drift = {max_norm:.3e})"
    )
    _print_written(written)
    print(f"wall time: {elapsed:.3f} s")
    return 0 if len(passed) == len(trials) else 1


# --- sweep -----------------------------------------------------------------------


def _sweep_point(scenario: Scenario, params: dict) -> tuple[float, float, bool]:
    """Run one grid point; (success probability, target fidelity, degenerate)."""
    muted: list[dict] = []
    if scenario.circuit == "filter":
        result = run_filter(_filter_input_from(params, muted), heralds=scenario.heralds)
        return result.success_probability, result.target_fidelity, result.degenerate
    if scenario.circuit == "projector":
        result = run_projector(
            _qubit_amplitudes_from(params, muted), heralds=scenario.heralds
        )
        return result.success_probability, result.target_fidelity, result.degenerate
    result = run_ghz_chain(_ghz_count_from(params), heralds=scenario.heralds)
    return result.cumulative_probability, result.target_fidelity, result.degenerate


def cmd_sweep(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    if scenario.grid is None:
        raise ScenarioError("sweep needs a scenario with a 'grid' section")
    axes = sorted(scenario.grid)
    values = [grid_axis_values(name, scenario.grid[name]) for name in axes]
    shape = [len(v) for v in values]

    t0 = time.perf_counter()
    rows = []
    success: list[float] = []
    for index, combo in enumerate(itertools.product(*values)):
        params = dict(scenario.parameters)
        params.update(zip(axes, combo))
        try:
            p, fid, degenerate = _sweep_point(scenario, params)
        except SimulatorError as exc:
            point = ", ".join(f"{a}={v!r}" for a, v in zip(axes, combo))
            raise ScenarioError(f"sweep point {index} ({point}) failed: {exc}") from None
        success.append(p)
        rows.append(
            list(combo) + [_fmt(p), _fmt(fid), str(degenerate).lower()]
        )
    elapsed = time.perf_counter() - t0

    report = {
        "circuit": scenario.circuit,
        "grid": {"axes": axes, "shape": shape, "values": values},
        "heralds": scenario.heralds,
        "points": [
            {
                "index": i,
                **{a: v for a, v in zip(axes, combo)},
                "success_probability": success[i],
            }
            for i, combo in enumerate(itertools.product(*values))
        ],
    }
    header = list(axes) + ["success_probability", "target_fidelity", "degenerate"]
    indexed_rows = [[i] + row for i, row in enumerate(rows)]
    figure = lambda p: save_sweep_figure(axes, shape, values, success, p)
    written = _emit(args, report, ["index"] + header, indexed_rows, figure)
    print(f"swept {len(rows)} grid points over {', '.join(axes)}")
    _print_written(written)
    print(f"wall time: {elapsed:.3f} s")
    return 0


# --- parser ------------------------------------------------------------------------


def _add_output_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", metavar="PATH", help="write a JSON report here, plus .csv/.png siblings")
    sub.add_argument("--no-figures", action="store_true", help="skip the PNG figure")


def _add_herald_flag(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--heralds",
        choices=HERALD_MODES,
        default=FEEDFORWARD,
        help="accept all three heralds with feed-forward, or only the coincidence",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockfilter",
        description="post-selected linear-optics circuits on Fock states",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filter", help="remove the one-photon component of a single mode")
    p.add_argument("--alpha", type=_complex_flag, required=True, help="vacuum amplitude")
    p.add_argument("--beta", type=_complex_flag, default=None,
                   help="one-photon amplitude (default: completed so the input is normalized)")
    p.add_argument("--gamma", type=_complex_flag, required=True, help="two-photon amplitude")
    _add_herald_flag(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("project", help="project two polarization qubits onto span{HH, VV}")
    p.add_argument("--c", help="all four amplitudes c0,c1,c2,c3 (comma separated)")
    p.add_argument("--c0", type=_complex_flag, help="|HH> amplitude (default 0)")
    p.add_argument("--c1", type=_complex_flag, help="|HV> amplitude (default 0)")
    p.add_argument("--c2", type=_complex_flag, help="|VH> amplitude (default 0)")
    p.add_argument("--c3", type=_complex_flag, help="|VV> amplitude (default 0)")
    p.add_argument("--checkpoints", action="store_true",
                   help="record intermediate states with closed-form reference fidelities")
    _add_herald_flag(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("ghz", help="grow an n-photon GHZ state one projector step at a time")
    p.add_argument("--n", type=int, required=True, help="number of photons (>= 2)")
    _add_herald_flag(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_ghz)

    p = sub.add_parser("trace", help="run a scenario file")
    p.add_argument("scenario", help="path to a JSON scenario")
    _add_output_flags(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("verify", help="cross-check random circuits against matrix permanents")
    p.add_argument("--seed", type=int, default=7, help="RNG seed (same seed, same report)")
    p.add_argument("--trials", type=int, default=25, help="number of random circuits")
    p.add_argument("--tol", type=float, default=1e-10, help="amplitude agreement tolerance")
    p.add_argument("--out", metavar="PATH", help="write a JSON report here, plus a .csv sibling")
    p.set_defaults(func=cmd_verify, no_figures=True)

    p = sub.add_parser("sweep", help="run a scenario's parameter grid point by point")
    p.add_argument("scenario", help="path to a JSON scenario with a 'grid' section")
    _add_output_flags(p)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the usage message
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimulatorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
