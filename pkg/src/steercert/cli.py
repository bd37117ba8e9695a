"""Command-line entry point.

Every command returns a RunReport; ``--out`` writes it as JSON and
``--csv`` writes tabular output where a command produces one.  Exit
codes: 0 = ran (verdict content never affects the exit code), 1 = input
error, 2 = internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import boxworld, engine, gaussian, scenario, witnesses
from .errors import InputError, InternalCheckError, SteercertError
from .report import RunReport, write_csv

_AXES = {2: ("x", "z"), 3: ("x", "y", "z")}


def _jsonsafe(obj):
    # Force JSON-native types so RunReport round-trips losslessly.
    return json.loads(json.dumps(obj))


def _verdict_entry(name: str, verdict) -> dict:
    entry = {"name": name}
    entry.update(_jsonsafe(verdict.to_dict()))
    return entry


def _report(command, inputs, verdicts, witness_values, details, t0) -> RunReport:
    return RunReport(
        command=command,
        inputs=_jsonsafe(inputs),
        verdicts=verdicts,
        witness_values=_jsonsafe(witness_values),
        timing_ms=(time.perf_counter() - t0) * 1000.0,
        details=_jsonsafe(details),
    )


def _matched_setup(settings: int, werner_p: float | None):
    """Assemblage plus matched Bob tests/observables for the standard axes."""
    if settings not in _AXES:
        raise InputError(f"settings must be 2 or 3, got {settings}")
    axes = _AXES[settings]
    rho = scenario.singlet() if werner_p is None else scenario.werner_state(werner_p)
    alice = [scenario.pauli_povm(ax) for ax in axes]
    asm = scenario.assemblage_from_povms(rho, alice)
    bob_povms = [scenario.pauli_povm(ax) for ax in axes]
    bob_obs = [scenario.pauli_observable(ax) for ax in axes]
    return asm, bob_povms, bob_obs


def cmd_singlet_cjwr(
    settings: int = 2,
    werner_p: float | None = None,
    mesh: int = engine.DEFAULT_MESH,
    tol: float = engine.DEFAULT_LP_TOL,
    backend: str = "auto",
) -> RunReport:
    """Matched-Pauli correlation witness plus local-model and pinned-value
    feasibility for the singlet (or a Werner state via ``werner_p``)."""
    t0 = time.perf_counter()
    asm, bob_povms, bob_obs = _matched_setup(settings, werner_p)

    corr = witnesses.correlators_from_assemblage(asm, bob_obs)
    cj = witnesses.cjwr(corr)
    lhs = engine.lhs_feasibility_qubit(asm, mesh=mesh, tol=tol, backend=backend)
    verdicts = [_verdict_entry("lhs", lhs)]
    verdicts.append(_verdict_entry("pv[all tests]", engine.pv_feasibility(asm, bob_povms, mesh=mesh, tol=tol, backend=backend)))
    for y, povm in enumerate(bob_povms):
        pv = engine.pv_feasibility(asm, [povm], mesh=mesh, tol=tol, backend=backend)
        verdicts.append(_verdict_entry(f"pv[test {y}]", pv))
    records = scenario.scan_predictability(asm, bob_povms)

    witness_values = {"F": cj.F, "s_m": witnesses.s_m(corr)}
    for x, v in enumerate(corr.values):
        witness_values[f"correlator[{x}]"] = v
    details = {
        "violated": cj.violated,
        "certain_contexts": [
            {"context": list(r.context), "test": list(r.test), "probability": r.probability}
            for r in records
        ],
    }
    inputs = {
        "settings": settings,
        "state": "singlet" if werner_p is None else f"werner(p={werner_p})",
        "mesh": mesh,
        "tol": tol,
        "backend": backend,
    }
    return _report("singlet-cjwr", inputs, verdicts, witness_values, details, t0)


def cmd_werner_scan(
    settings: int = 2,
    grid: tuple = (0.5, 0.9, 0.05),
    mesh: int = engine.DEFAULT_MESH,
    bracket_tol: float = 0.01,
    tol: float = engine.DEFAULT_LP_TOL,
    backend: str = "auto",
    witness_only: bool = False,
) -> RunReport:
    """Scan Werner weight p: per-point witness value and LHS verdict, plus
    the feasible/infeasible threshold bracket (or, with ``witness_only``,
    the exact witness crossing 1/sqrt(m) and no LP calls)."""
    t0 = time.perf_counter()
    if settings not in _AXES:
        raise InputError(f"settings must be 2 or 3, got {settings}")
    lo, hi, step = grid
    if not (0.0 <= lo < hi <= 1.0 and step > 0):
        raise InputError(f"grid must satisfy 0 <= lo < hi <= 1 with step > 0, got {grid}")
    axes = _AXES[settings]
    bob_obs = [scenario.pauli_observable(ax) for ax in axes]

    def build(p):
        rho = scenario.werner_state(float(p))
        return scenario.assemblage_from_povms(rho, [scenario.pauli_povm(ax) for ax in axes])

    rows = []
    for p in np.arange(lo, hi + step / 2, step):
        p = float(round(p, 12))
        asm = build(p)
        f_val = witnesses.cjwr(witnesses.correlators_from_assemblage(asm, bob_obs)).F
        if witness_only:
            status = "infeasible" if f_val > 1.0 else "undecided"
        else:
            status = engine.lhs_feasibility_qubit(asm, mesh=mesh, tol=tol, backend=backend).status
        rows.append([p, f_val, status])

    witness_values = {}
    details = {"csv_header": ["p", "F", "verdict"], "csv_rows": rows}
    verdicts = []
    if witness_only:
        witness_values["crossing_p"] = 1.0 / math.sqrt(settings)
    else:
        checker = lambda a: engine.lhs_feasibility_qubit(a, mesh=mesh, tol=tol, backend=backend)
        p_feas, p_infeas = engine.threshold_scan(build, checker, 0.0, 1.0, bracket_tol)
        witness_values["p_feasible_max"] = p_feas
        if p_infeas is not None:
            witness_values["p_infeasible_min"] = p_infeas
        details["bracket"] = [p_feas, p_infeas]
    inputs = {
        "settings": settings,
        "grid": list(grid),
        "mesh": mesh,
        "bracket_tol": bracket_tol,
        "tol": tol,
        "backend": backend,
        "witness_only": witness_only,
    }
    return _report("werner-scan", inputs, verdicts, witness_values, details, t0)


def cmd_prbox() -> RunReport:
    """Exact no-signalling, CHSH, and local-model analysis of the PR box."""
    t0 = time.perf_counter()
    asm = boxworld.prbox_assemblage()
    ns = boxworld.check_no_signalling_exact(asm)
    chsh = boxworld.chsh_value(boxworld.joint_from_assemblage(asm))
    lhs = engine.lhs_feasibility_boxworld(asm)
    pv = engine.pv_feasibility(asm)
    verdicts = [_verdict_entry("lhs", lhs), _verdict_entry("pv", pv)]
    witness_values = {
        "chsh": float(chsh),
        "local_bound": 2.0,
        "quantum_bound": 2.0 * math.sqrt(2.0),
    }
    details = {
        "chsh_exact": str(chsh),
        "no_signalling": {"passed": ns.passed, "max_deviation": ns.max_deviation},
    }
    return _report("prbox", {}, verdicts, witness_values, details, t0)


def cmd_reid(
    r: float,
    sweep: tuple | None = None,
    eta: float = 1.0,
) -> RunReport:
    """Reid inferred-variance criterion for a two-mode squeezed vacuum at
    squeezing r, optionally swept over a range of r values."""
    t0 = time.perf_counter()
    witness_values = {}
    details = {}
    if sweep is None:
        cm = gaussian.apply_symmetric_loss(gaussian.tmsv_covariance(r), eta)
        var_x, var_p = gaussian.inferred_variances(cm)
        res = gaussian.reid_check(var_x, var_p)
        witness_values.update(
            {"r": float(r), "var_x_inf": var_x, "var_p_inf": var_p, "product": res.product}
        )
        details["steering"] = res.steering
    else:
        lo, hi, step = sweep
        if not (0.0 <= lo <= hi and step > 0):
            raise InputError(f"sweep must satisfy 0 <= lo <= hi with step > 0, got {sweep}")
        r_values = [float(round(v, 12)) for v in np.arange(lo, hi + step / 2, step)]
        rows = [list(row) for row in gaussian.reid_sweep(r_values, eta=eta)]
        details["csv_header"] = ["r", "var_x_inf", "var_p_inf", "product", "steering_flag"]
        details["csv_rows"] = rows
    inputs = {"r": float(r), "sweep": list(sweep) if sweep else None, "eta": eta}
    return _report("reid", inputs, [], witness_values, details, t0)


def cmd_check(
    path,
    mesh: int = engine.DEFAULT_MESH,
    tol: float = engine.DEFAULT_LP_TOL,
    mode: str = "float",
    backend: str = "auto",
) -> RunReport:
    """Validate a scenario file and run the applicable checks: exactness of
    no-signalling, predictability scan, feasibility, and witnesses."""
    t0 = time.perf_counter()
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None

    if isinstance(doc, dict) and "x_settings" in doc:
        return _check_box(path, doc, t0)
    if isinstance(doc, dict) and "dimA" in doc:
        return _check_quantum(path, doc, mesh, tol, mode, backend, t0)
    raise InputError(
        f"{path}: unrecognized scenario schema; expected quantum fields "
        "(dimA, dimB, state, alice_povms) or box fields (x_settings, a_outcomes, ...)"
    )


def _check_box(path, doc, t0) -> RunReport:
    asm = boxworld.load_box(doc)
    ns = boxworld.check_no_signalling_exact(asm)
    verdicts = [_verdict_entry("lhs", engine.lhs_feasibility_boxworld(asm))]
    witness_values = {}
    details = {
        "schema": "box",
        "no_signalling": {"passed": ns.passed, "max_deviation": ns.max_deviation},
    }
    if (asm.x_settings, asm.a_outcomes, asm.y_settings, asm.b_outcomes) == (2, 2, 2, 2):
        chsh = boxworld.chsh_value(boxworld.joint_from_assemblage(asm))
        witness_values["chsh"] = float(chsh)
        details["chsh_exact"] = str(chsh)
    inputs = {"file": str(path), "mode": "exact"}
    return _report("check", inputs, verdicts, witness_values, details, t0)


def _check_quantum(path, doc, mesh, tol, mode, backend, t0) -> RunReport:
    if mode == "exact":
        raise InputError("exact mode is only available for box-world scenarios")
    sc = scenario.load_scenario(doc)
    asm = scenario.assemblage_from_povms(sc["rho"], sc["alice"], dim_b=sc["dims"][1])
    ns = scenario.check_no_signalling(asm)
    verdicts = [
        _verdict_entry("lhs", engine.lhs_feasibility_qubit(asm, mesh=mesh, tol=tol, backend=backend))
    ]
    witness_values = {}
    details = {
        "schema": "quantum",
        "no_signalling": {"passed": ns.passed, "max_deviation": ns.max_deviation},
    }
    bob = sc["bob"]
    if bob:
        records = scenario.scan_predictability(asm, bob)
        details["certain_contexts"] = [
            {"context": list(r.context), "test": list(r.test), "probability": r.probability}
            for r in records
        ]
        verdicts.append(
            _verdict_entry("pv[all tests]", engine.pv_feasibility(asm, bob, mesh=mesh, tol=tol, backend=backend))
        )
        if len(bob) == asm.settings and all(p.num_outcomes == 2 for p in bob):
            try:
                corr = witnesses.correlators_from_assemblage(
                    asm, [p.effects[0] - p.effects[1] for p in bob]
                )
            except InputError:
                details["witness_skipped"] = "Bob tests are not +-1 observables"
            else:
                cj = witnesses.cjwr(corr)
                witness_values["F"] = cj.F
                witness_values["s_m"] = witnesses.s_m(corr)
                details["violated"] = cj.violated
    inputs = {"file": str(path), "mesh": mesh, "tol": tol, "mode": mode, "backend": backend}
    return _report("check", inputs, verdicts, witness_values, details, t0)


# ---------------------------------------------------------------------------
# argument parsing

def _parse_range(text: str, what: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"{what} must look like lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise InputError(f"{what} must be numeric lo:hi:step, got {text!r}") from None
    return lo, hi, step


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steercert",
        description="Certify steering: LP feasibility of local models, correlation witnesses, and the Reid criterion.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="report.json", help="write the RunReport as JSON")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized probes (canned commands are deterministic)")
    lp = argparse.ArgumentParser(add_help=False)
    lp.add_argument("--mesh", type=int, default=engine.DEFAULT_MESH, help="sphere mesh size (default %(default)s)")
    lp.add_argument("--tol", type=float, default=engine.DEFAULT_LP_TOL, help="LP feasibility tolerance (default %(default)s)")
    lp.add_argument("--backend", choices=["auto", "c", "py"], default="auto", help="pivot kernel (default auto)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("singlet-cjwr", parents=[common, lp], help="matched-Pauli witness + feasibility for the singlet")
    p.add_argument("--settings", type=int, choices=[2, 3], default=2)
    p.add_argument("--werner-p", type=float, default=None, help="replace the singlet by a Werner state of this weight")

    p = sub.add_parser("werner-scan", parents=[common, lp], help="scan Werner weight: witness values, verdicts, threshold bracket")
    p.add_argument("--settings", type=int, choices=[2, 3], default=2)
    p.add_argument("--grid", default="0.5:0.9:0.05", help="p grid as lo:hi:step (default %(default)s)")
    p.add_argument("--bracket-tol", type=float, default=0.01, help="bisection halting width (default %(default)s)")
    p.add_argument("--witness-only", action="store_true", help="skip LPs; report the exact witness crossing 1/sqrt(m)")
    p.add_argument("--csv", metavar="table.csv", help="write the (p, F, verdict) table")

    sub.add_parser("prbox", parents=[common], help="exact PR-box analysis: no-signalling, CHSH, local-model verdicts")

    p = sub.add_parser("reid", parents=[common], help="Reid criterion for a two-mode squeezed vacuum")
    p.add_argument("--r", type=float, required=True, help="squeezing parameter (>= 0)")
    p.add_argument("--sweep", default=None, help="sweep r over lo:hi:step instead of a single point")
    p.add_argument("--eta", type=float, default=1.0, help="symmetric loss transmissivity (default 1.0)")
    p.add_argument("--csv", metavar="table.csv", help="write the sweep table")

    p = sub.add_parser("check", parents=[common, lp], help="validate a scenario file and run the applicable checks")
    p.add_argument("file", help="scenario JSON (quantum or box-world schema)")
    p.add_argument("--mode", choices=["exact", "float"], default="float", help="LP arithmetic (box scenarios are always exact)")

    return parser


def _dispatch(args) -> RunReport:
    if args.command == "singlet-cjwr":
        return cmd_singlet_cjwr(
            settings=args.settings, werner_p=args.werner_p,
            mesh=args.mesh, tol=args.tol, backend=args.backend,
        )
    if args.command == "werner-scan":
        return cmd_werner_scan(
            settings=args.settings, grid=_parse_range(args.grid, "--grid"),
            mesh=args.mesh, bracket_tol=args.bracket_tol, tol=args.tol,
            backend=args.backend, witness_only=args.witness_only,
        )
    if args.command == "prbox":
        return cmd_prbox()
    if args.command == "reid":
        sweep = _parse_range(args.sweep, "--sweep") if args.sweep else None
        return cmd_reid(r=args.r, sweep=sweep, eta=args.eta)
    if args.command == "check":
        return cmd_check(args.file, mesh=args.mesh, tol=args.tol, mode=args.mode, backend=args.backend)
    raise InputError(f"unknown command {args.command!r}")


def _print_summary(report: RunReport) -> None:
    for name, value in sorted(report.witness_values.items()):
        print(f"{name} = {value:.6f}" if isinstance(value, float) else f"{name} = {value}")
    for entry in report.verdicts:
        print(f"{entry['name']}: {entry['status']}")
    details = report.details
    if "violated" in details:
        print(f"witness violated: {'yes' if details['violated'] else 'no'}")
    if "steering" in details:
        print(f"steering: {'yes' if details['steering'] else 'no'}")
    if "certain_contexts" in details:
        print(f"certain contexts: {len(details['certain_contexts'])}")
    if "no_signalling" in details:
        ns = details["no_signalling"]
        print(f"no-signalling: {'pass' if ns['passed'] else 'FAIL'} (max deviation {ns['max_deviation']})")
    if "bracket" in details:
        print(f"threshold bracket: {details['bracket']}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; those are input errors here
        return 0 if not exc.code else 1
    try:
        report = _dispatch(args)
        csv_path = getattr(args, "csv", None)
        if csv_path:
            if "csv_rows" not in report.details:
                raise InputError("this invocation produced no table; nothing to write to --csv")
            write_csv(csv_path, report.details["csv_header"], report.details["csv_rows"])
        if args.out:
            report.save(args.out)
        _print_summary(report)
        print(f"done in {report.timing_ms:.0f} ms")
        return 0
    except InternalCheckError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return 2
    except SteercertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        import traceback

        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
