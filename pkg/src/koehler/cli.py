"""Command-line front end: ``koehler <subcommand> ...`` prints one JSON report.

Exit codes: 0 all checks pass, 1 some check failed (the failing blocks are
named on stderr), 2 malformed input, 3 internal error.

Environment overrides for defaults: ``KOEHLER_TOL`` (matrix tolerance),
``KOEHLER_EPSILON`` (recurrence and collapse epsilon), ``KOEHLER_HORIZON``
(power horizon N).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from . import fixtures as fx
from .battery import run_battery
from .engine import (
    inverse_on_rev,
    minimal_idempotent_dynamical,
    minimal_idempotent_spectral,
)
from .errors import (
    CapExceededError,
    CollapseError,
    HorizonError,
    IllConditionedProjectionError,
    IllConditionedSplitError,
    InvalidInputError,
)
from .ip import find_fs_sequence
from .jdlg import decompose, verify_all
from .lattice import check_cyclicity, frobenius_oracle, peripheral_spectrum, verify_restricted_peripheral
from .linalg import DEFAULT_TOL, is_power_bounded, load_matrix, matrix_to_dict, spectrum
from .report import CheckReport, _plain
from .semigroup import (
    center,
    idempotent_order,
    idempotents,
    idempotents_by_powers,
    load as load_semigroup,
    minidem_correspondence,
    principal_ideals,
    rees_checks,
)

SCHEMA = 1
EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
#: errors meaning "the requested certificate could not be produced", reported as failing blocks
CHECK_ERRORS = (HorizonError, IllConditionedSplitError, IllConditionedProjectionError,
                CapExceededError, CollapseError)


def _env(name: str, default, cast):
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        value = cast(raw)
    except ValueError:
        raise InvalidInputError(f"{name}={raw!r} is not a valid {cast.__name__}") from None
    if value <= 0:
        raise InvalidInputError(f"{name} must be positive, got {raw}")
    return value


def settings() -> dict:
    return {
        "tol": _env("KOEHLER_TOL", DEFAULT_TOL, float),
        "epsilon": _env("KOEHLER_EPSILON", 1e-6, float),
        "horizon": _env("KOEHLER_HORIZON", 1000, int),
    }


def _digest(path) -> str:
    try:
        with open(path, "rb") as fh:
            return "sha256:" + hashlib.sha256(fh.read()).hexdigest()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc


def _args_digest(**kw) -> str:
    return "sha256:" + hashlib.sha256(json.dumps(kw, sort_keys=True).encode()).hexdigest()


# ---------------------------------------------------------------- analyses


def cmd_decompose(args, cfg):
    digest = _digest(args.input)
    T = load_matrix(args.input, cfg["tol"])
    checks = []
    P_spec = P_dyn = None
    if args.method in ("spectral", "both"):
        P_spec = minimal_idempotent_spectral(T)
    if args.method in ("dynamical", "both"):
        P_dyn = minimal_idempotent_dynamical(T, cfg["horizon"])
    P = P_spec if P_spec is not None else P_dyn
    if args.method == "both":
        rep = CheckReport("cross_oracle")
        rep.add("P_difference_over_n", np.linalg.norm(P_spec.P - P_dyn.P) / T.dim, 1e-6)
        checks.append(rep)
    proj = CheckReport("projection")
    nT = max(T.norm2(), 1e-300)
    proj.add("idempotency", np.linalg.norm(P.P @ P.P - P.P, 2), 1e-8)
    proj.add("commutation_over_norm", np.linalg.norm(P.P @ T.entries - T.entries @ P.P, 2) / nT, 1e-8)
    checks.append(proj)
    D = decompose(T, P)
    checks += verify_all(D, T, None, cfg["horizon"], cfg["epsilon"])
    inv = inverse_on_rev(T, P, cfg["horizon"])
    rep = CheckReport("inverse_on_rev")
    rep.add("left_residual", inv.left_residual, 1e-6)
    rep.add("right_residual", inv.right_residual, 1e-6)
    rep.add("direct_difference", inv.direct_difference, 1e-6)
    rep.certificates["return_time"] = inv.return_time
    checks.append(rep)
    analysis = {
        "dim": T.dim,
        "method": args.method,
        "rev_dim": D.rev_dim,
        "aws_dim": D.aws_dim,
        "spectrum": [[e.value, e.algebraic_multiplicity] for e in spectrum(T).eigenvalues],
        "P": matrix_to_dict(np.round(P.P, 12)),
        "membership_witness": P.membership_witness,
    }
    return digest, analysis, checks


def cmd_cyclicity(args, cfg):
    digest = _digest(args.input)
    T = load_matrix(args.input, cfg["tol"])
    ps = peripheral_spectrum(T)
    oracle = frobenius_oracle(T)
    cert = check_cyclicity(ps, T.dim)
    cyc = CheckReport("cyclicity")
    if not cert:
        cyc.fail(f"missing multiples k*theta for (theta, k) in {list(cert.violations)}")
    cyc.certificates["K_max"] = cert.K_max
    agree = CheckReport("oracle_agreement")
    if not ps.matches(oracle):
        agree.fail(f"eigenvalue angles {list(ps.angles)} != graph prediction {list(oracle.angles)}")
    agree.certificates["basic_components"] = [
        {"members": m, "radius": r, "period": h} for m, r, h in oracle.components
    ]
    checks = [cyc, agree]
    if ps.r > 0 and abs(ps.r - 1) <= ps.tol_r and is_power_bounded(T):
        checks.append(verify_restricted_peripheral(T, minimal_idempotent_spectral(T)))
    else:
        skip = CheckReport("restricted_peripheral", skipped=True)
        skip.notes.append("needs a power-bounded matrix with spectral radius 1")
        checks.append(skip)
    analysis = {
        "dim": T.dim,
        "spectral_radius": ps.r,
        "peripheral_angles": list(ps.angles),
        "oracle_angles": list(oracle.angles),
        "cyclic": cert.cyclic,
    }
    return digest, analysis, checks


def cmd_semigroup(args, cfg):
    digest = _digest(args.generators)
    eps = args.epsilon if args.epsilon is not None else (
        cfg["epsilon"] if "KOEHLER_EPSILON" in os.environ else None)
    S = load_semigroup(args.generators, eps)
    E = idempotents(S)
    cross = CheckReport("idempotent_cross_check")
    if idempotents_by_powers(S) != E:
        cross.fail("idempotents from power cycles differ from the table diagonal")
    if not E:
        cross.fail("no idempotent found")
    checks = [cross, rees_checks(S)]
    if S.kind == "abstract":
        skip = CheckReport("minidem_correspondence", skipped=True)
        skip.notes.append("abstract Cayley table: no kernels or images to compare")
        checks.append(skip)
    else:
        checks.append(minidem_correspondence(S))
    left, right = principal_ideals(S)
    analysis = {
        "size": S.size,
        "kind": S.kind,
        "labels": [list(w) for w in S.words] if S.words else None,
        "idempotents": E,
        "idempotent_order": [list(p) for p in idempotent_order(S)],
        "left_ideals": [{"members": sorted(I.members), "minimal": I.minimal} for I in left],
        "right_ideals": [{"members": sorted(I.members), "minimal": I.minimal} for I in right],
        "center": center(S),
        "cayley": S.cayley.tolist(),
    }
    return digest, analysis, checks


def cmd_ipsearch(args, cfg):
    digest = _digest(args.set)
    try:
        with open(args.set) as fh:
            A = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{args.set}: {exc}") from exc
    if not isinstance(A, list) or not all(isinstance(a, int) and a > 0 for a in A):
        raise InvalidInputError("the set must be a JSON array of positive integers")
    bound = args.bound if args.bound is not None else max(A, default=0)
    w = find_fs_sequence(A, args.length, bound)
    rep = CheckReport("ipsearch")
    rep.certificates.update(found=w is not None, length=args.length, bound=bound)
    if w is None:
        rep.notes.append("exhaustive search found no witness; absence is a valid result")
    return digest, {"witness": w.to_dict() if w else None}, [rep]


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def cmd_fixtures(args, cfg):
    if args.list:
        analysis = {"fixtures": [{"name": s.name, "family": s.family, "params": _jsonable(s.params)}
                                 for s in sorted(fx.REGISTRY.values(), key=lambda s: s.name)]}
        return _args_digest(list=True), analysis, []
    name, seed = args.emit
    try:
        seed = int(seed)
    except ValueError:
        raise InvalidInputError(f"seed must be an integer, got {seed!r}") from None
    f = fx.get(name, seed)
    analysis = {"name": name, "seed": seed, "matrix": matrix_to_dict(f.T),
                "expected": _jsonable(f.expected)}
    return _args_digest(emit=[name, seed]), analysis, []


def cmd_battery(args, cfg):
    checks = run_battery(args.seed, args.count)
    analysis = {"seed": args.seed, "criteria": [c.name for c in checks]}
    return _args_digest(seed=args.seed, count=args.count), analysis, checks


# ------------------------------------------------------------------ driver


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="koehler", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="reversible/stable splitting and its verification")
    d.add_argument("--input", required=True, help="matrix as JSON or CSV")
    d.add_argument("--method", choices=("spectral", "dynamical", "both"), default="both")
    d.set_defaults(func=cmd_decompose)

    c = sub.add_parser("cyclicity", help="peripheral spectrum of a nonnegative matrix")
    c.add_argument("--input", required=True)
    c.set_defaults(func=cmd_cyclicity)

    s = sub.add_parser("semigroup", help="structure of a finite semigroup")
    s.add_argument("--generators", required=True,
                   help='JSON {"kind", "generators"} or {"size", "cayley"}')
    s.add_argument("--epsilon", type=float, default=None, help="collapse radius for float matrices")
    s.set_defaults(func=cmd_semigroup)

    i = sub.add_parser("ipsearch", help="finite-sums witness inside a set")
    i.add_argument("--set", required=True, help="JSON array of positive integers")
    i.add_argument("--length", type=int, default=4)
    i.add_argument("--bound", type=int, default=None)
    i.set_defaults(func=cmd_ipsearch)

    f = sub.add_parser("fixtures", help="list or emit canonical fixtures")
    g = f.add_mutually_exclusive_group(required=True)
    g.add_argument("--list", action="store_true")
    g.add_argument("--emit", nargs=2, metavar=("NAME", "SEED"))
    f.set_defaults(func=cmd_fixtures)

    b = sub.add_parser("battery", help="full acceptance battery")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--count", type=int, default=None, help="override fixture counts (quick runs)")
    b.set_defaults(func=cmd_battery)
    return p


def render(report: dict) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2)


def run(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_INPUT
    t0 = time.perf_counter()
    report = {"schema": SCHEMA, "tool_version": __version__, "analysis_name": args.command}
    try:
        cfg = settings()
        digest, analysis, checks = args.func(args, cfg)
    except CHECK_ERRORS as exc:
        rep = CheckReport(type(exc).__name__)
        rep.fail(str(exc))
        digest, analysis, checks = None, None, [rep]
    except (ValueError, OSError) as exc:
        print(f"koehler: malformed input: {exc}", file=err)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"koehler: internal error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_INTERNAL
    checks = sorted(checks, key=lambda c: c.name)
    report.update(input_digest=digest, analysis=analysis,
                  checks=[c.to_dict() for c in checks],
                  wall_time=round(time.perf_counter() - t0, 6))
    print(render(report), file=out)
    failing = [c for c in checks if c.status == "fail"]
    for c in failing:
        print(f"koehler: check failed: {c.name}: {'; '.join(c.violations())}", file=err)
    return EXIT_FAIL if failing else EXIT_PASS


def main() -> None:
    sys.exit(run())
