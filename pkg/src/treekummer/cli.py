"""Command-line front end.

Exit codes: 0 success, 1 statistical rejection or failed invariant,
2 malformed input.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .errors import InputError, QuadratureNotConverged, TreeKummerError
from .stats import any_reject, hv15_check, independence_battery
from .suites import (
    VERIFY_MAX_P,
    gof_suite,
    identity_suite,
    independence_suite,
    verify_all,
)
from .tk import component_laws, tk_log_density, tk_log_density_unnorm, tk_log_density_unnorm_bruteforce, tk_sample
from .transform import IDENTITY_RTOL, log_jacobian_inverse, phi_forward, phi_inverse
from .trees import SUBTREE_CAP, enumerate_subtrees, leaves

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _level(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("level must lie in (0, 1)")
    return v


def _count(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {exc}")


def _roots(text: str) -> list[int] | str:
    if text in ("all", "leaves"):
        return text
    return [int(v) for v in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="treekummer", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help_text, spec=True):
        p = sub.add_parser(name, help=help_text)
        if spec:
            p.add_argument("--spec", required=True, help="JSON spec file")
        p.add_argument("--out", help="also write the JSON report to this path")
        return p

    cmd("check-tree", "validate a tree spec")
    cmd("subtrees", "list all connected subtrees")

    p = cmd("transform", "apply the rooted map (or its inverse) to one point")
    p.add_argument("--root", type=int, default=0)
    p.add_argument("--values", type=_values, required=True, help="comma-separated positive values")
    p.add_argument("--inverse", action="store_true")

    p = cmd("identity", "randomised subtree-sum identity and root invariance")
    p.add_argument("--trials", type=_count, default=1000)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float, default=IDENTITY_RTOL)

    p = cmd("sample", "draw from a TK spec and write CSV")
    p.add_argument("--root", type=int, default=0)
    p.add_argument("--n", type=_count, default=1000)
    p.add_argument("--seed", type=int)

    p = cmd("density", "log density of a TK spec at one point")
    p.add_argument("--root", type=int, default=0)
    p.add_argument("--values", type=_values, required=True)

    for name, text in (("gof", "KS of transformed coordinates against predicted laws"),
                       ("indep", "independence battery on transformed coordinates")):
        p = cmd(name, text)
        p.add_argument("--n", type=_count, default=100_000)
        p.add_argument("--seed", type=int)
        p.add_argument("--level", type=_level, default=1e-3)
        p.add_argument("--sample-root", type=int, default=0, help="root used to draw the sample")
        p.add_argument("--roots", type=_roots, default="all", help="'all', 'leaves' or a comma list")
        if name == "indep":
            p.add_argument("--raw", action="store_true", help="test the untransformed coordinates")

    p = cmd("hv15-demo", "Monte Carlo check of the Kummer-Gamma involution property", spec=False)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--n", type=_count, default=100_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--level", type=_level, default=1e-3)

    p = cmd("verify-all", "run every check for one TK spec")
    p.add_argument("--n", type=_count, default=100_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--level", type=_level, default=1e-3)
    p.add_argument("--trials", type=_count, default=200)
    return parser


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    seed = int(np.random.SeedSequence().entropy % 2**63)
    print(f"treekummer: no --seed given, using {seed}", file=sys.stderr)
    return seed


def _check_root(root: int, p: int):
    if not 0 <= root < p:
        raise InputError(f"--root {root} is out of range 0..{p - 1}")


def _resolve_roots(spec_roots, tree) -> list[int]:
    if spec_roots == "all":
        return list(tree.vertices)
    if spec_roots == "leaves":
        return leaves(tree) if tree.size > 1 else [0]
    for r in spec_roots:
        _check_root(r, tree.size)
    return list(spec_roots)


def _check_values(values, p: int):
    if len(values) != p:
        raise InputError(f"--values has {len(values)} entries, the tree has {p} vertices")


def run(args) -> tuple[int, dict]:
    """Execute a parsed command; returns ``(exit_code, report)``."""
    spec = io.load_json(args.spec) if getattr(args, "spec", None) else None
    cmd = args.command
    seed = None
    code = EXIT_OK

    if cmd == "check-tree":
        tree = io.parse_tree(spec)
        result = {
            "valid": True,
            "vertices": tree.size,
            "edges": [list(e) for e in tree.sorted_edges()],
            "degrees": [tree.degree(v) for v in tree.vertices],
            "leaves": leaves(tree) if tree.size > 1 else [],
        }
    elif cmd == "subtrees":
        tree = io.parse_tree(spec)
        if tree.size > SUBTREE_CAP:
            raise InputError(f"tree has {tree.size} vertices; subtree enumeration is capped at {SUBTREE_CAP}")
        subs = enumerate_subtrees(tree)
        result = {"count": len(subs), "subtrees": [list(s.vertices) for s in subs]}
    elif cmd == "transform":
        C = io.parse_param_matrix(spec)
        _check_root(args.root, C.tree.size)
        _check_values(args.values, C.tree.size)
        if args.inverse:
            out = phi_inverse(C, args.root, args.values)
            ljac = log_jacobian_inverse(C, args.root, args.values)
        else:
            out = phi_forward(C, args.root, args.values)
            ljac = log_jacobian_inverse(C, args.root, out)
        result = {"root": args.root, "inverse": args.inverse, "input": args.values,
                  "output": out, "log_jacobian_inverse": ljac}
    elif cmd == "identity":
        C = io.parse_param_matrix(spec)
        if C.tree.size > SUBTREE_CAP:
            raise InputError(f"tree has {C.tree.size} vertices; subtree enumeration is capped at {SUBTREE_CAP}")
        seed = _seed(args)
        result = identity_suite(C, args.trials, np.random.default_rng(seed), tol=args.tol)
        if not (result["identity_pass"] and result["root_invariance_pass"]):
            code = EXIT_FAIL
    elif cmd == "sample":
        d = io.parse_tk(spec)
        _check_root(args.root, d.p)
        seed = _seed(args)
        sample = tk_sample(d, args.root, seed, args.n)
        result = {"n": args.n, "root": args.root, "columns": list(range(d.p))}
        rep = io.report(cmd, spec, seed, result)
        if args.out:
            io.write_samples_csv(args.out, sample, rep)
            return code, rep
        sys.stdout.write(",".join(map(str, range(d.p))) + "\n")
        for row in sample.data:
            sys.stdout.write(",".join(repr(float(v)) for v in row) + "\n")
        return code, None
    elif cmd == "density":
        d = io.parse_tk(spec)
        _check_root(args.root, d.p)
        _check_values(args.values, d.p)
        result = {
            "values": args.values,
            "root": args.root,
            "log_density_unnorm": tk_log_density_unnorm(d, args.values, args.root),
            "log_density": tk_log_density(d, args.root, args.values),
        }
        if d.p <= SUBTREE_CAP:
            result["log_density_unnorm_bruteforce"] = tk_log_density_unnorm_bruteforce(d, args.values)
    elif cmd in ("gof", "indep"):
        d = io.parse_tk(spec)
        _check_root(args.sample_root, d.p)
        roots = _resolve_roots(args.roots, d.tree)
        seed = _seed(args)
        s_sample, s_test = np.random.SeedSequence(seed).spawn(2)
        sample = tk_sample(d, args.sample_root, np.random.default_rng(s_sample), args.n).data
        if cmd == "gof":
            result = gof_suite(d, sample, roots, args.level)
        elif args.raw:
            if d.p < 2:
                raise InputError("independence testing needs at least two vertices")
            reports = independence_battery(sample, args.level, rng=s_test)
            result = {"raw": True, "level": args.level, "reports": [r.to_json() for r in reports],
                      "pass": not any_reject(reports)}
        else:
            if d.p < 2:
                raise InputError("independence testing needs at least two vertices")
            result = independence_suite(d, sample, roots, args.level, s_test)
        result["laws"] = {str(r): [{"vertex": law.vertex, "kind": law.kind, "scale_factor": law.scale_factor,
                                    "params": vars(law.params)} for law in component_laws(d, r)]
                          for r in roots}
        if not result["pass"]:
            code = EXIT_FAIL
    elif cmd == "hv15-demo":
        for name in ("a", "b", "c"):
            if not getattr(args, name) > 0:
                raise InputError(f"--{name} must be > 0")
        seed = _seed(args)
        reports = hv15_check(args.a, args.b, args.c, args.n, rng=seed, level=args.level)
        result = {"a": args.a, "b": args.b, "c": args.c, "n": args.n,
                  "reports": [r.to_json() for r in reports], "pass": not any_reject(reports)}
        if not result["pass"]:
            code = EXIT_FAIL
    elif cmd == "verify-all":
        d = io.parse_tk(spec)
        if d.p > VERIFY_MAX_P:
            raise InputError(f"verify-all supports at most {VERIFY_MAX_P} vertices, spec has {d.p}")
        seed = _seed(args)
        result = verify_all(d, args.n, seed, level=args.level, trials=args.trials)
        if not result["pass"]:
            code = EXIT_FAIL
    else:  # pragma: no cover - argparse restricts the choices
        raise InputError(f"unknown command {cmd}")
    return code, io.report(cmd, spec, seed, result)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, rep = run(args)
    except QuadratureNotConverged as exc:
        print(f"treekummer {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except TreeKummerError as exc:
        print(f"treekummer {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if rep is not None:
        text = io.dumps(rep)
        sys.stdout.write(text)
        if args.out and args.command != "sample":
            with open(args.out, "w") as fh:
                fh.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
