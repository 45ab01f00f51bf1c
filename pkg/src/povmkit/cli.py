"""
Command-line front end.

Usage:
    povm validate povm.json
    povm analyze povm.json
    povm sharpen povm.json --labeling ternary --depth 16
    povm extract-kernel povm.json sharp.json
    povm smear sharp.json kernel.json
    povm continuity-report kernel.json --tests feller,uniform,norm1,abs --out report.json
    povm demo-gaussian --l 1.0 --grid -40:40:0.001 --report out.json

Every command prints a JSON report (schema ``povm-kit/1``). Exit status is
0 when all checks pass, 1 when a check fails, 2 on unreadable input. A path
of ``-`` reads stdin or writes stdout.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys

import numpy as np

from . import continuity, io, kernel, linalg, observables, povm, sharp
from .errors import NotAFunctionOfA, NotCommutative, PovmError, ValidationError
from .intervals import IntervalSet, RealGrid, ShrinkingFamily, random_interval_set

SCHEMA = "povm-kit/1"

TOLERANCES = {
    "hermitian": linalg.HERMITIAN_TOL,
    "eig": linalg.EIG_TOL,
    "proj": linalg.PROJ_TOL,
    "joint": linalg.JOINT_TOL,
    "cluster": linalg.CLUSTER_TOL,
    "recon": linalg.RECON_TOL,
    "norm": povm.NORM_TOL,
    "spectrum": povm.SPECTRUM_TOL,
    "entry": kernel.ENTRY_TOL,
    "row": kernel.ROW_TOL,
    "quad": continuity.QUAD_TOL,
    "uc": continuity.UC_TOL,
    "feller": continuity.FELLER_TOL,
    "ac": continuity.AC_TOL,
}

CONTINUITY_TESTS = ("feller", "uniform", "norm1", "abs", "strong-feller")

# argparse reads "-40:40:0.001" as an option, so these flags take their value verbatim
_VALUE_FLAGS = ("--grid", "--domain")


class InputError(Exception):
    pass


class _Inputs:
    """Reads input documents once, remembering their digests for the report."""

    def __init__(self):
        self.digests = {}
        self._stdin_used = False

    def load(self, name: str, path: str):
        if path == "-":
            if self._stdin_used:
                raise InputError("stdin ('-') can only be used for one input")
            self._stdin_used = True
            text = sys.stdin.read()
        else:
            try:
                with open(path, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise InputError(f"{name}: cannot read {path}: {exc.strerror}") from None
        self.digests[name] = {"path": path, "sha256": hashlib.sha256(text.encode()).hexdigest()}
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{name}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def _report(args, inputs: _Inputs, tols: dict, passed: bool, **sections) -> dict:
    return _jsonable({
        "schema": SCHEMA,
        "command": args.command,
        "argv": args.argv,
        "inputs": inputs.digests,
        "seed": args.seed,
        "tolerances": tols,
        **sections,
        "passed": bool(passed),
    })


def _tolerances(args) -> dict:
    return {name: getattr(args, f"tol_{name}") for name in TOLERANCES}


def _error(exc: Exception) -> dict:
    out = {"type": type(exc).__name__, "message": str(exc)}
    for attr in ("pair", "norm", "block", "outcome", "residual"):
        if hasattr(exc, attr):
            out[attr] = getattr(exc, attr)
    return out


# ------------------------------------------------------------------ commands


def cmd_validate(args, inputs, tol):
    P = io.povm_from_json(inputs.load("povm", args.povm))
    rep = povm.validate_povm(P, tol["eig"], tol["norm"], tol["hermitian"])
    return rep.passed, {"validation": rep.to_dict()}


def cmd_analyze(args, inputs, tol):
    P = io.povm_from_json(inputs.load("povm", args.povm))
    rep = povm.validate_povm(P, tol["eig"], tol["norm"], tol["hermitian"])
    commutes, pair, cnorm = povm.is_commutative(P, tol["joint"])
    results = {
        "validation": rep.to_dict(),
        "commutative": commutes,
        "worst_pair": pair,
        "max_commutator_norm": cnorm,
        "spectrum": povm.povm_spectrum(P, tol["spectrum"]),
        "is_pvm": povm.is_pvm(P, tol["proj"]),
    }
    if commutes:
        S = sharp.build_sharp_version(P, "index", joint_tol=tol["joint"], cluster_tol=tol["cluster"])
        T = kernel.extract_kernel(P, S, tol["joint"])
        separates, collisions = kernel.separates_points(T)
        results["sharp_version"] = {
            "n_blocks": len(S),
            "ranks": [int(round(np.trace(E).real)) for E in S.projectors],
            "generating_equality": sharp.verify_generating_equality(P, S, tol["joint"], tol["cluster"]),
        }
        results["kernel"] = {
            "validation": kernel.validate_markov_kernel(T, tol["entry"], tol["row"], seed=args.seed).to_dict(),
            "separates_points": separates,
            "collisions": collisions,
        }
    return rep.passed, results


def cmd_sharpen(args, inputs, tol):
    P = io.povm_from_json(inputs.load("povm", args.povm))
    try:
        S = sharp.build_sharp_version(P, args.labeling, args.depth, tol["joint"], tol["cluster"])
    except NotCommutative as exc:
        return False, {"error": _error(exc)}
    problems = sharp.check_sharp_version(S, tol["proj"])
    results = {
        "sharp_version": io.sharp_to_json(S),
        "invariant_problems": problems,
        "generating_equality": sharp.verify_generating_equality(P, S, tol["joint"], tol["cluster"]),
    }
    return not problems and results["generating_equality"], results


def cmd_extract_kernel(args, inputs, tol):
    P = io.povm_from_json(inputs.load("povm", args.povm))
    S = io.sharp_from_json(inputs.load("sharp", args.sharp))
    try:
        T = kernel.extract_kernel(P, S, tol["joint"])
    except NotAFunctionOfA as exc:
        return False, {"error": _error(exc)}
    rep = kernel.validate_markov_kernel(T, tol["entry"], tol["row"], seed=args.seed)
    separates, collisions = kernel.separates_points(T)
    return rep.passed, {
        "kernel": io.kernel_table_to_json(T),
        "validation": rep.to_dict(),
        "separates_points": separates,
        "collisions": collisions,
    }


def cmd_smear(args, inputs, tol):
    S = io.sharp_from_json(inputs.load("sharp", args.sharp))
    T = io.kernel_table_from_json(inputs.load("kernel", args.kernel))
    krep = kernel.validate_markov_kernel(T, tol["entry"], tol["row"], seed=args.seed)
    P = kernel.smear(S, T)
    rep = povm.validate_povm(P, tol["eig"], tol["norm"], tol["hermitian"])
    return krep.passed and rep.passed, {
        "povm": io.povm_to_json(P),
        "kernel_validation": krep.to_dict(),
        "validation": rep.to_dict(),
    }


def _uniform_families(Q: observables.UnsharpPosition, n: int = 40):
    lo, hi = Q.outcome_hull()
    mid = 0.5 * (Q.domain.start + Q.domain.stop)
    width = Q.domain.stop - Q.domain.start
    shrink = [IntervalSet.interval(mid - width * 2.0**-i, mid) for i in range(1, n + 1)]
    tail = [IntervalSet.interval(-math.inf, mid - i * (mid - lo) / n) for i in range(1, n + 1)]
    return {"shrink_to_empty": ShrinkingFamily(tuple(shrink)), "left_tail": ShrinkingFamily(tuple(tail))}


def cmd_continuity_report(args, inputs, tol):
    K = io.convolution_kernel_from_json(inputs.load("kernel", args.kernel))
    domain = RealGrid.parse(args.domain)
    Q = observables.build_unsharp_position(K, domain, tol["quad"])
    tests = [t.strip() for t in args.tests.split(",") if t.strip()]
    unknown = sorted(set(tests) - set(CONTINUITY_TESTS))
    if unknown:
        raise InputError(f"unknown tests: {', '.join(unknown)}")
    rng = np.random.default_rng(args.seed)
    lo, hi = Q.outcome_hull()
    results, passed = {"outcome_hull": [lo, hi], "sup_bound": K.sup_bound}, True

    uc_verdict = None
    if "uniform" in tests or "norm1" in tests:
        fams = {name: continuity.uniform_continuity_test(Q, fam, tol["uc"]) for name, fam in _uniform_families(Q).items()}
        uc_verdict = all(r.converging for r in fams.values())
        if "uniform" in tests:
            results["uniform"] = {name: r.to_dict() for name, r in fams.items()}
            results["uniform"]["uniformly_continuous"] = uc_verdict
    if "feller" in tests:
        lam = 0.5 * (domain.start + domain.stop)
        seq = lam + 2.0 ** -np.arange(0, 21)
        cos_res = continuity.feller_test(K, np.cos, seq, lam, tol["feller"])
        one_res = continuity.feller_test(K, np.ones_like, seq, lam, tol["feller"])
        results["feller"] = {"lambda": lam, "cos": cos_res.to_dict(), "one": one_res.to_dict()}
        passed &= cos_res.converged and one_res.converged
    if "strong-feller" in tests:
        fam = [random_interval_set(rng, lo, hi) for _ in range(20)]
        sf = continuity.strong_feller_test(K, fam, domain)
        results["strong_feller"] = {"family": [D.to_list() for D in fam], **sf.to_dict()}
        passed &= sf.passes
    if "norm1" in tests:
        pts = np.linspace(lo, hi, 23)[1:-1]
        n1 = continuity.norm1_test(Q, uc_verdict, tol=1e-6, points=pts, spectrum_tol=tol["spectrum"])
        results["norm1"] = n1.to_dict()
    if "abs" in tests:
        nu = continuity.WeightedLebesgue(K.sup_bound, (lo, hi))
        fam = [random_interval_set(rng, lo, hi) for _ in range(200)]
        ac = continuity.absolute_continuity_check(Q, nu, 1.0, fam, tol["ac"])
        results["abs"] = {"nu": {"weight": nu.weight, "window": list(nu.window)}, "c": 1.0, **ac.to_dict()}
        passed &= ac.holds
    return passed, results


def cmd_demo_gaussian(args, inputs, tol):
    l = args.l
    grid = RealGrid.parse(args.grid)
    K = observables.optimal_gaussian_kernel(l, grid)
    Q = observables.build_unsharp_position(K, grid, tol["quad"])
    rng = np.random.default_rng(args.seed)
    span = (grid.start + 5 * l, grid.stop - 5 * l)

    def exact(a, b, x):
        s = l * math.sqrt(2)
        return 0.5 * (math.erf((x - a) / s) - math.erf((x - b) / s))

    errs = []
    for _ in range(100):
        a, b = np.sort(rng.uniform(*span, size=2))
        x = rng.uniform(*span)
        errs.append(abs(continuity.kernel_value(K, IntervalSet.interval(a, b), x) - exact(a, b, x)))
    center = continuity.kernel_value(K, IntervalSet.interval(-l, l), 0.0)
    erf_ok = max(errs) <= tol["quad"] and abs(center - math.erf(1 / math.sqrt(2))) <= tol["quad"]

    bound = math.sqrt(2) / (l * math.sqrt(math.pi))
    worst_excess, worst_ratio = -math.inf, 0.0
    for _ in range(100):
        a, b = np.sort(rng.uniform(*span, size=2))
        x, x2 = rng.uniform(*span, size=2)
        D = IntervalSet.interval(a, b)
        diff = abs(continuity.kernel_value(K, D, x) - continuity.kernel_value(K, D, x2))
        worst_excess = max(worst_excess, diff - bound * abs(x - x2))
        worst_ratio = max(worst_ratio, diff / abs(x - x2))
    lip_ok = worst_excess <= 1e-5

    n_sets = int(min(30, (-grid.start) / l - 1))
    fam = [IntervalSet.interval(-math.inf, -i * l) for i in range(1, n_sets + 1)]
    uc = continuity.uniform_continuity_test(Q, fam, tol["uc"])
    norms_ok = n_sets > 0 and min(uc.norms) >= 1 - 1e-6 and not uc.converging

    n1 = continuity.norm1_test(Q, uc.converging, points=[-l, 0.0, l], spectrum_tol=tol["spectrum"])
    results = {
        "l": l,
        "grid": grid.to_dict(),
        "erf_checks": {"center_value": center, "center_exact": math.erf(1 / math.sqrt(2)),
                       "max_abs_error": max(errs), "passed": erf_ok},
        "lipschitz": {"bound": bound, "max_observed_slope": worst_ratio,
                      "max_excess": worst_excess, "passed": lip_ok},
        "non_uniform_continuity": {"sets": [D.to_list() for D in fam], **uc.to_dict(),
                                   "min_norm": min(uc.norms) if uc.norms else None, "passed": norms_ok},
        "norm1": n1.to_dict(),
    }
    return erf_ok and lip_ok and norms_ok, results


COMMANDS = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "sharpen": cmd_sharpen,
    "extract-kernel": cmd_extract_kernel,
    "smear": cmd_smear,
    "continuity-report": cmd_continuity_report,
    "demo-gaussian": cmd_demo_gaussian,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized test families")
    common.add_argument("--out", "--report", dest="out", default="-", help="report destination ('-' for stdout)")
    for name, default in TOLERANCES.items():
        common.add_argument(f"--tol.{name}", dest=f"tol_{name}", type=float, default=default, metavar="TOL")

    parser = argparse.ArgumentParser(prog="povm", description="Commutative POVM analysis toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check positivity and normalization")
    p.add_argument("povm")
    p = sub.add_parser("analyze", parents=[common], help="validation, commutativity, spectrum, kernel")
    p.add_argument("povm")
    p = sub.add_parser("sharpen", parents=[common], help="build a sharp version")
    p.add_argument("povm")
    p.add_argument("--labeling", choices=sharp.LABELINGS, default="ternary")
    p.add_argument("--depth", type=int, default=sharp.DEFAULT_DEPTH)
    p = sub.add_parser("extract-kernel", parents=[common], help="Markov kernel of a POVM w.r.t. a sharp version")
    p.add_argument("povm")
    p.add_argument("sharp")
    p = sub.add_parser("smear", parents=[common], help="smear a sharp version by a kernel")
    p.add_argument("sharp")
    p.add_argument("kernel")
    p = sub.add_parser("continuity-report", parents=[common], help="continuity diagnostics of a convolution kernel")
    p.add_argument("kernel")
    p.add_argument("--tests", default=",".join(CONTINUITY_TESTS))
    p.add_argument("--domain", default="0:1:0.01", help="position grid start:stop:step")
    p = sub.add_parser("demo-gaussian", parents=[common], help="optimal Gaussian unsharp position checks")
    p.add_argument("--l", type=float, default=1.0)
    p.add_argument("--grid", default="-40:40:0.001", help="grid start:stop:step")
    return parser


def _normalize_argv(argv: list[str]) -> list[str]:
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _emit(report: dict, dest: str):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if dest == "-":
        sys.stdout.write(text)
    else:
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)


def run(argv=None) -> int:
    argv = _normalize_argv(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    args.argv = argv
    inputs = _Inputs()
    tol = _tolerances(args)
    try:
        passed, results = COMMANDS[args.command](args, inputs, tol)
    except (InputError, ValidationError) as exc:
        print(f"povm {args.command}: input error: {exc}", file=sys.stderr)
        return 2
    except PovmError as exc:
        passed, results = False, {"error": _error(exc)}
    _emit(_report(args, inputs, tol, passed, results=results), args.out)
    return 0 if passed else 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
