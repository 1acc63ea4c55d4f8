"""Command-line interface.

Exit codes: 0 when everything checked passes, 1 on a verification failure,
2 on a usage error.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import __version__, jsonio
from .cosets import build_index_table, rep_system
from .formal import PeriodVector, SeedFunction, constant_vector, lewis_check_function
from .gl2 import DomainError
from .hecke import detect_eigenvalue, h_hat_coset_sum, t_tilde_apply, verify_algebra
from .stern import farey_path, matrix_sets, psi_vector
from .suite import SuiteConfig, default_threads, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_beta(text: str):
    """``"2"`` gives an int, ``"0.5"`` a float and ``"0.5+14i"`` a complex weight."""
    s = text.strip().replace("i", "j")
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        pass
    try:
        return complex(s)
    except ValueError:
        raise UsageError(f"cannot parse beta {text!r}") from None


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse rational {text!r}") from None


def positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text!r} is not positive")
    return value


def int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated integer list") from None


def make_seed(kind: str, beta) -> SeedFunction:
    return SeedFunction(kind, beta)


def emit(args, obj, text: str):
    print(jsonio.dumps_pretty(obj) if args.json else text)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_index(args) -> int:
    table = build_index_table(args.n)
    lines = [f"level {table.n}, index {table.mu}", "  i  (c, b)     d  A                R                h"]
    for e in table.entries:
        lines.append(f"{e.ordinal:3d}  ({e.c}, {e.b})  {e.d:4d}  {e.A!r:<16} {e.R!r:<16} {table.h[e.ordinal]}")
    emit(args, table.to_dict(), "\n".join(lines))
    return EXIT_OK


def cmd_sets(args) -> int:
    sets = matrix_sets(args.n)
    obj = {
        "n": str(args.n),
        "S": [A.to_json() for A in sets.S],
        "X": [A.to_json() for A in sets.X],
        "Y": [A.to_json() for A in sets.Y],
        "Xstar": [A.to_json() for A in sets.X_star],
    }
    lines = []
    for name, mats in (("S", sets.S), ("X", sets.X), ("Y", sets.Y), ("X*", sets.X_star)):
        lines.append(f"{name}_{args.n} ({len(mats)}): " + ", ".join(repr(A) for A in mats))
    emit(args, obj, "\n".join(lines))
    return EXIT_OK


def cmd_psi(args) -> int:
    psi = psi_vector(args.n)
    table = build_index_table(args.n)
    lines = [f"psi_{i} [A = {table.entries[i].A!r}] = {w!r}" for i, w in enumerate(psi)]
    emit(args, jsonio.export("psi", n=args.n), "\n".join(lines))
    return EXIT_OK


def cmd_farey(args) -> int:
    path = farey_path(parse_fraction(args.q))
    lines = [f"q = {path.q}, L = {path.L}"]
    lines.append("fractions: " + ", ".join(f"{a}/{b}" for a, b in path.fractions))
    lines += [f"m_{r} = {m!r}" for r, m in enumerate(path.matrices, 1)]
    emit(args, path.to_dict(), "\n".join(lines))
    return EXIT_OK


def cmd_cosets(args) -> int:
    reps = rep_system(args.n, args.m)
    hsum = h_hat_coset_sum(args.n, args.m)
    obj = {
        "n": str(args.n),
        "m": str(args.m),
        "representatives": [r.to_json() for r in reps.reps],
        "cosetSum": hsum.to_dict(),
    }
    lines = [f"representatives of Gamma0({args.n * args.m}) in Gamma0({args.n}): {len(reps)}"]
    lines += [f"  {r!r}" for r in reps.reps]
    lines.append(f"Hecke coset sum for m = {args.m} at level {args.n}: {hsum.size()} cosets")
    for key, mult in sorted(hsum.counts.items()):
        lines.append(f"  {mult} x [{key.proj[0]}:{key.proj[1]}] {key.hnf!r}")
    emit(args, obj, "\n".join(lines))
    return EXIT_OK


def _input_vector(args, seed: SeedFunction) -> PeriodVector:
    if args.input == "constant":
        return constant_vector(args.n, seed)
    return PeriodVector(args.n, seed, psi_vector(args.n))


def cmd_apply(args) -> int:
    beta = parse_beta(args.beta)
    seed = make_seed(args.seed, beta)
    v = _input_vector(args, seed)
    w = t_tilde_apply(args.n, args.m, v)
    lam = detect_eigenvalue(v, w) if isinstance(beta, int) else None
    obj = {
        "n": str(args.n),
        "m": str(args.m),
        "seed": args.seed,
        "beta": str(beta),
        "weights": jsonio.weights_to_json(w.weights),
        "eigenvalue": None if lam is None else str(lam),
    }
    lines = [f"component {i}: {x!r}" for i, x in enumerate(w.weights)]
    lines.append("eigenvalue: " + ("none detected" if lam is None else str(lam)))
    emit(args, obj, "\n".join(lines))
    return EXIT_OK


def cmd_verify_lewis(args) -> int:
    beta = parse_beta(args.beta)
    if args.mode == "exact" and not isinstance(beta, int):
        raise UsageError("exact mode needs an integer beta")
    v = _input_vector(args, make_seed(args.seed, beta))
    report = lewis_check_function(args.n, v, args.mode)
    lines = [f"{c.index:4d} {c.status}" + (f"  at {c.fail_points}" if c.fail_points else "") for c in report.components]
    lines.append(f"overall: {'pass' if report.passed else 'fail'}")
    emit(args, report.to_dict(), "\n".join(lines))
    return EXIT_OK if report.passed else EXIT_FAIL


def _hecke_params(args) -> list[dict]:
    from math import gcd

    from .cosets import prime_factors

    primes = [p for p in range(2, args.pmax + 1) if prime_factors(p) == [p]]
    if args.family in ("divides", "coprime"):
        return [
            {"p": p, "e": e}
            for p in primes
            if (args.n % p == 0) == (args.family == "divides")
            for e in range(1, args.emax + 1)
        ]
    if args.family == "mult":
        return [
            {"m": a, "m2": b}
            for a in range(2, args.pmax + 1)
            for b in range(a + 1, args.pmax + 1)
            if gcd(a, b) == 1
        ]
    return [{"a": a, "b": b} for a in range(2, args.pmax + 1) for b in range(a + 1, args.pmax + 1)]


def cmd_verify_hecke(args) -> int:
    reports = [verify_algebra(args.n, args.family, **params) for params in _hecke_params(args)]
    passed = all(r.passed for r in reports)
    obj = {
        "n": str(args.n),
        "family": args.family,
        "status": "pass" if passed else "fail",
        "relations": [r.to_dict() for r in reports],
    }
    lines = [
        f"{'pass' if r.passed else 'fail':<5} {r.family} "
        + " ".join(f"{k}={v}" for k, v in sorted(r.params.items()))
        + f"  ({r.lhs_size} cosets)"
        for r in reports
    ]
    if not reports:
        lines.append(f"no parameters of family {args.family!r} apply at level {args.n}")
    lines.append(f"overall: {'pass' if passed else 'fail'}")
    emit(args, obj, "\n".join(lines))
    return EXIT_OK if passed else EXIT_FAIL


def cmd_verify_suite(args) -> int:
    config = SuiteConfig(
        n_max=args.n_max,
        m_max=args.m_max,
        p_set=args.p_set,
        e_max=args.e_max,
        depth_cap=args.depth_cap,
        sample_point_count=args.sample_points,
        mode=args.mode,
        betas=tuple(parse_beta(b) for b in args.betas.split(",")),
        output_format="json" if args.json else "text",
        threads=args.threads if args.threads is not None else default_threads(),
        rng_seed=args.rng_seed,
        fail_fast=args.fail_fast,
        corrupt_psi=args.corrupt_psi,
    )
    report = run_suite(config)
    if args.json:
        print(jsonio.dumps_pretty(report.to_dict(args.timings)))
    else:
        print(report.to_text(args.timings))
    return report.exit_code


def cmd_export(args) -> int:
    params: dict = {}
    if args.entity in ("table", "psi", "cosetsum"):
        if args.n is None:
            raise UsageError(f"export {args.entity} needs --n")
        params["n"] = args.n
    if args.entity == "cosetsum":
        if args.m is None:
            raise UsageError("export cosetsum needs --m")
        params["m"] = args.m
    if args.entity == "farey":
        if args.q is None:
            raise UsageError("export farey needs --q")
        params["q"] = parse_fraction(args.q)
    if args.entity == "weights":
        if args.n is None or args.m is None:
            raise UsageError("export weights needs --n and --m")
        v = PeriodVector(args.n, SeedFunction.inverse_z(), psi_vector(args.n))
        params["weights"] = t_tilde_apply(args.n, args.m, v).weights
    text = jsonio.dumps(jsonio.export(args.entity, **params))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hecke-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, parent=sub, json_flag=True):
        p = parent.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        if json_flag:
            p.add_argument("--json", action="store_true", help="emit JSON")
        return p

    p = add("index", cmd_index, "coset index table of Gamma0(n)")
    p.add_argument("--n", type=positive, required=True)

    p = add("sets", cmd_sets, "the matrix sets S_n, X_n, Y_n and X_n*")
    p.add_argument("--n", type=positive, required=True)

    p = add("psi", cmd_psi, "K-orbit sums at level n")
    p.add_argument("--n", type=positive, required=True)

    p = add("farey", cmd_farey, "Farey path of a rational q in [0, 1)")
    p.add_argument("--q", required=True, help="a/b")

    p = add("cosets", cmd_cosets, "representatives and the Hecke coset sum for (n, m)")
    p.add_argument("--n", type=positive, required=True)
    p.add_argument("--m", type=positive, required=True)

    seeds = ("inversez", "eisenstein", "constant")
    p = add("apply", cmd_apply, "apply the level-n operator of index m to a seed vector")
    p.add_argument("--n", type=positive, required=True)
    p.add_argument("--m", type=positive, required=True)
    p.add_argument("--seed", choices=seeds, default="inversez")
    p.add_argument("--beta", default="1")
    p.add_argument("--input", choices=("psi", "constant"), default="psi")

    verify = sub.add_parser("verify", help="verification commands").add_subparsers(dest="what", required=True)

    p = add("lewis", cmd_verify_lewis, "three-term check of a seed vector", verify)
    p.add_argument("--n", type=positive, required=True)
    p.add_argument("--seed", choices=seeds, default="inversez")
    p.add_argument("--beta", default="1")
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.add_argument("--input", choices=("psi", "constant"), default="psi")

    p = add("hecke", cmd_verify_hecke, "Hecke coset-sum relations", verify)
    p.add_argument("--n", type=positive, required=True)
    p.add_argument("--family", choices=("divides", "coprime", "mult", "commute"), required=True)
    p.add_argument("--pmax", type=positive, default=5)
    p.add_argument("--emax", type=positive, default=2)

    p = add("suite", cmd_verify_suite, "run the full verification suite", verify)
    p.add_argument("--n-max", type=positive, default=10)
    p.add_argument("--m-max", type=positive, default=6)
    p.add_argument("--p-set", type=int_list, default=(2, 3, 5))
    p.add_argument("--e-max", type=positive, default=2)
    p.add_argument("--depth-cap", type=positive, default=10_000)
    p.add_argument("--sample-points", type=positive, default=20)
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.add_argument("--betas", default="1,2", help="comma-separated weights for the second seed")
    p.add_argument("--threads", type=positive, default=None, help="overrides HECKE_LAB_THREADS")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--fail-fast", action="store_true")
    p.add_argument("--timings", action="store_true", help="include wall times (output is then not reproducible)")
    p.add_argument("--corrupt-psi", action="store_true", help=argparse.SUPPRESS)

    p = add("export", cmd_export, "canonical JSON of a table, psi vector, path, coset sum or weights", json_flag=False)
    p.add_argument("entity", choices=jsonio.ENTITIES)
    p.add_argument("--n", type=positive)
    p.add_argument("--m", type=positive)
    p.add_argument("--q")
    p.add_argument("--output", "-o")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"hecke-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
