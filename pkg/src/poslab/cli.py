"""Command-line entry point: ``poslab <subcommand> [options]``.

Output is one JSON object per line unless ``--format csv`` is given.  Exit
codes: 0 success, 2 precondition violation, 3 budget exceeded, 4 I/O or
parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Callable, Optional

from . import graphcodes, indpoly, kernels, quasi, sidorenko, structures, tournaments
from .errors import BudgetExceeded, PreconditionError

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_BUDGET = 3
EXIT_IO = 4


class InputError(Exception):
    pass


def _read(path: Optional[str], what: str = "--input") -> str:
    if not path:
        raise InputError(f"{what} is required")
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _hypergraph(path: Optional[str]) -> structures.Hypergraph:
    text = _read(path)
    try:
        return structures.Hypergraph.from_text(text)
    except ValueError as exc:
        if isinstance(exc, PreconditionError):
            raise
        raise InputError(f"{path}: {exc}") from exc


def _kernel(path: Optional[str]) -> kernels.StepKernel:
    text = _read(path, "--kernel")
    try:
        return kernels.StepKernel.from_json(text)
    except (ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, PreconditionError):
            raise
        raise InputError(f"{path}: {exc}") from exc


def _family(r: int, text: Optional[str]) -> quasi.SubsetFamily:
    if not text:
        return quasi.cycle_family(r)
    if os.path.exists(text):
        text = _read(text, "--family")
    try:
        return quasi.SubsetFamily.from_json(r, text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise InputError(f"bad family {text!r}: {exc}") from exc


def _seed(args) -> int:
    if args.seed is None:
        raise PreconditionError("--seed is required for this subcommand")
    if not 0 <= args.seed < 2**64:
        raise PreconditionError("--seed must be an unsigned 64-bit integer")
    return args.seed


def _tol(args) -> Fraction:
    try:
        return Fraction(args.tol) if args.tol else indpoly.DEFAULT_TOL
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad tolerance {args.tol!r}") from exc


def _budget(args) -> int:
    if args.budget is None:
        return kernels.DEFAULT_BUDGET
    if args.budget <= 0:
        raise PreconditionError("--budget must be positive")
    return args.budget


def _frac_dict(x: Fraction) -> dict:
    return {"value": str(x), "numerator": str(x.numerator), "denominator": str(x.denominator)}


# ---------------------------------------------------------------------------
# subcommands; each returns a list of output lines


def cmd_density(args) -> list[str]:
    h = _hypergraph(args.input)
    w = _kernel(args.kernel)
    return [json.dumps({"density": str(kernels.density(h, w, _budget(args)))})]


def cmd_indpoly(args) -> list[str]:
    g = _hypergraph(args.input)
    p = indpoly.independence_polynomial(g)
    out = {"polynomial": p.to_strings()}
    if g.edges and structures.is_connected(g):
        lo, hi = indpoly.smallest_root_bracket(p, _tol(args))
        out["bracket"] = [str(lo), str(hi)]
    return [json.dumps(out)]


def cmd_certify_odd(args) -> list[str]:
    cert = indpoly.certify_nonpositive_odd(_hypergraph(args.input), _tol(args))
    return [json.dumps(cert.to_dict())]


def cmd_levi(args) -> list[str]:
    cert = indpoly.levi_nonpositivity(_hypergraph(args.input), _tol(args))
    return [json.dumps(cert.to_dict())]


def cmd_qvanish(args) -> list[str]:
    h = _hypergraph(args.input)
    fam = _family(h.r, args.family)
    cert = quasi.q_vanishing(h, fam)
    out = {
        "kind": "q-vanishing",
        "hypergraph": h.to_text(),
        "family": json.loads(fam.to_json()),
        "vanishing": cert is not None,
        "certificate": None if cert is None else cert.to_dict(),
    }
    return [json.dumps(out)]


def cmd_build_hq(args) -> list[str]:
    if args.r is None:
        raise PreconditionError("--r is required")
    fam = _family(args.r, args.family)
    h = quasi.build_hq(args.r, fam)
    labels = [[i, list(s)] for i, s in quasi.hq_vertex_labels(args.r, fam)]
    return [json.dumps({"hypergraph": h.to_text(), "labels": labels, "edges": h.e})]


def cmd_copy_prob(args) -> list[str]:
    h = _hypergraph(args.input)
    system = tournaments.copy_system(h)
    rank, consistent = system.eliminate()
    p = system.probability()
    out = {"kind": "copy-probability", "hypergraph": h.to_text(), "probability": str(p)}
    out.update({"numerator": str(p.numerator), "denominator": str(p.denominator)})
    out.update({"rank": rank, "consistent": consistent, "variables": len(system.variables)})
    return [json.dumps(out)]


def cmd_mc_density(args) -> list[str]:
    h = _hypergraph(args.input)
    seed = _seed(args)
    n = args.n if args.n is not None else 200
    samples = args.samples if args.samples is not None else 10**5
    res = tournaments.mc_density(h, n, samples, seed)
    name = args.name or os.path.splitext(os.path.basename(args.input))[0]
    if args.format == "csv":
        return [tournaments.CSV_HEADER, res.csv_row(name, h.r)]
    out = {"name": name, "r": h.r, "n": n, "samples": samples, "estimate": res.estimate}
    out.update({"stderr": res.stderr, "ci95": [res.low, res.high], "seed": seed})
    return [json.dumps(out)]


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("POSLAB_THREADS", "1")))
    except ValueError:
        return 1


def cmd_minimize(args) -> list[str]:
    h = _hypergraph(args.input)
    res = sidorenko.minimize_density(
        h, args.k, restarts=args.restarts, steps=args.steps, seed=_seed(args),
        max_evals=args.samples, workers=_threads(), budget=_budget(args),
    )
    out = {"value": str(res.value), "float_value": res.float_value, "success": res.success}
    out.update({"exhausted": res.exhausted, "restarts": res.restarts, "kernel": res.kernel.to_dict()})
    return [json.dumps(out)]


def cmd_cycle_demo(args) -> list[str]:
    report = sidorenko.cycle_demo(args.r or 3, args.length or 6, args.n or 12, _seed(args))
    print(sidorenko.cycle_summary(report), file=sys.stderr)
    return [json.dumps(report)]


def cmd_grid_demo(args) -> list[str]:
    report = sidorenko.grid_demo(args.r or 3, args.k, _seed(args), restarts=args.restarts, steps=args.steps)
    return [json.dumps(report)]


def _graph_and_n(args):
    g = _hypergraph(args.input)
    if args.n is None:
        raise PreconditionError("--n is required")
    return g, args.n


def cmd_code_spectrum(args) -> list[str]:
    g, n = _graph_and_n(args)
    _, table = graphcodes.spectrum(g, n)
    rows = [(graphcodes.GraphVector(n, x).to_hex(), str(table.exact(x))) for x in range(len(table.raw))]
    if args.format == "csv":
        return ["x-hex,coefficient"] + [f"{x},{c}" for x, c in rows]
    return [json.dumps({"x": x, "coefficient": c}) for x, c in rows]


def cmd_code_bound(args) -> list[str]:
    g, n = _graph_and_n(args)
    return [json.dumps(graphcodes.code_density_bound(g, n).to_dict())]


def cmd_max_code(args) -> list[str]:
    g, n = _graph_and_n(args)
    size, code = graphcodes.bruteforce_max_code(g, n)
    total = 2 ** graphcodes.num_pairs(n)
    out = {"n": n, "size": size, "density": str(Fraction(size, total))}
    out["code"] = [graphcodes.GraphVector(n, x).to_hex() for x in code]
    return [json.dumps(out)]


def cmd_stable_involution(args) -> list[str]:
    g = _hypergraph(args.input)
    cert = structures.detect_stable_involution(g)
    out = {"kind": "stable-involution", "graph": g.to_text(), "found": cert is not None}
    if cert is not None:
        out.update({"left": sorted(cert.left), "right": sorted(cert.right)})
        out.update({"fixed": sorted(cert.fixed), "phi": list(cert.phi)})
    return [json.dumps(out)]


COMMANDS: dict[str, Callable] = {
    "density": cmd_density,
    "indpoly": cmd_indpoly,
    "certify-odd": cmd_certify_odd,
    "levi": cmd_levi,
    "qvanish": cmd_qvanish,
    "build-hq": cmd_build_hq,
    "copy-prob": cmd_copy_prob,
    "mc-density": cmd_mc_density,
    "minimize": cmd_minimize,
    "cycle-demo": cmd_cycle_demo,
    "grid-demo": cmd_grid_demo,
    "code-spectrum": cmd_code_spectrum,
    "code-bound": cmd_code_bound,
    "max-code": cmd_max_code,
    "stable-involution": cmd_stable_involution,
}


# ---------------------------------------------------------------------------
# certificate replay


def verify_record(rec: dict) -> bool:
    kind = rec.get("kind")
    if kind in ("odd-witness", "levi-witness"):
        cert = indpoly.OddCertificate.from_dict(rec)
        if cert.source is not None and structures.levi(cert.source) != cert.graph:
            return False
        return cert.validate()
    if kind == "nonsidorenko":
        return sidorenko.NonSidorenkoCertificate.from_dict(rec).validate()
    if kind == "q-vanishing":
        if not rec["vanishing"]:
            h = structures.Hypergraph.from_text(rec["hypergraph"])
            return quasi.q_vanishing(h, quasi.SubsetFamily(h.r, rec["family"])) is None
        h = structures.Hypergraph.from_text(rec["hypergraph"])
        cert = quasi.VanishingCertificate.from_dict(rec["certificate"])
        return cert.validate(h, quasi.SubsetFamily(h.r, rec["family"]))
    if kind == "copy-probability":
        h = structures.Hypergraph.from_text(rec["hypergraph"])
        return tournaments.copy_probability_exact(h) == Fraction(rec["probability"])
    if kind == "stable-involution":
        g = structures.Hypergraph.from_text(rec["graph"])
        if not rec["found"]:
            return structures.detect_stable_involution(g) is None
        cert = structures.StableInvolutionCertificate(
            frozenset(rec["left"]), frozenset(rec["right"]), frozenset(rec["fixed"]), tuple(rec["phi"])
        )
        return cert.validate(g)
    raise InputError(f"unknown certificate kind {kind!r}")


def run_verify(path: str) -> tuple[int, list[str]]:
    lines = []
    ok = True
    for i, raw in enumerate(_read(path, "--verify").splitlines()):
        if not raw.strip():
            continue
        try:
            rec = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:{i + 1}: {exc}") from exc
        valid = verify_record(rec)
        ok &= valid
        lines.append(json.dumps({"line": i + 1, "kind": rec.get("kind"), "valid": valid}))
    return (EXIT_OK if ok else EXIT_PRECONDITION), lines


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poslab", description="Exact positivity and Sidorenko experiments.")
    parser.add_argument("--verify", metavar="PATH", help="replay certificates (JSON lines) and exit")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", help="hypergraph file: 'r v m' then one edge per line")
        p.add_argument("--kernel", help="kernel JSON file (density)")
        p.add_argument("--family", help="subset family as JSON, e.g. [[1,2],[3]], or a file")
        p.add_argument("--seed", type=int)
        p.add_argument("--samples", type=int)
        p.add_argument("--budget", type=int)
        p.add_argument("--tol")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--name", help="label for Monte Carlo rows")
        p.add_argument("--n", type=int)
        p.add_argument("--r", type=int)
        p.add_argument("--length", type=int)
        p.add_argument("--k", type=int, default=2)
        p.add_argument("--restarts", type=int, default=8)
        p.add_argument("--steps", type=int, default=300)
    return parser


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verify:
            code, lines = run_verify(args.verify)
        elif args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_PRECONDITION
        else:
            code, lines = EXIT_OK, COMMANDS[args.command](args)
    except InputError as exc:
        print(f"poslab: {exc}", file=sys.stderr)
        return EXIT_IO
    except BudgetExceeded as exc:
        print(f"poslab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PreconditionError as exc:
        print(f"poslab: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    for line in lines:
        print(line, file=out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
