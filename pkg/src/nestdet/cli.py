"""Command-line front end.

Every command prints a JSON report (``survey`` prints JSON lines) with
sorted keys, the tool version, the graph hash and the seed, so identical
inputs give byte-identical output.  Exit status 1 signals a domain error,
2 a usage error; verdicts themselves are carried in the JSON.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .constraints import (
    ConstraintError,
    candidate_pairs,
    expand_nested,
    expr_from_json,
    expr_to_json,
    parentally_nested_determinants,
    parental_expr,
    theorem_constraint_set,
)
from .graph import (
    CycleError,
    GraphError,
    MixedGraph,
    find_cycle,
    graph_sha256,
    is_ancestral_vertex,
    is_globally_identifiable,
    label_to_json,
    parse_graph,
    topological_order,
)
from .linalg import SingularMatrixError
from .poly import PolynomialError, parse_polynomial
from .symbolic import restricted_covariance
from .treks import (
    SeparationCertificate,
    generic_rank,
    is_restricted_trek_separated,
    min_restricted_cut,
)
from .verify import (
    FitError,
    SampleSpec,
    fit_parameters,
    fraction_str,
    membership_check,
    sample_covariance,
    vanishes_numerically,
    vanishes_symbolically,
)

DOMAIN_ERRORS = (GraphError, PolynomialError, FitError, SingularMatrixError, ValueError, OSError)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- helpers


def _read_graph(path: str) -> MixedGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def _vertex_set(g: MixedGraph, text: str | None, default=None) -> list[str] | None:
    """Comma-separated labels; ``-`` is the empty set."""
    if text is None:
        return default
    text = text.strip()
    if text == "-":
        return []
    labels = [x.strip() for x in text.split(",") if x.strip()]
    unknown = [x for x in labels if x not in g]
    if unknown:
        raise GraphError(f"unknown vertices: {', '.join(unknown)}")
    return labels


def _labels(xs) -> list:
    return [label_to_json(x) for x in xs]


def _matrix(m) -> list[list[str]]:
    return [[fraction_str(x) for x in r] for r in m]


def _report(command: str, g: MixedGraph | None, seed: int | None = None, **fields) -> dict:
    out = {
        "tool_version": __version__,
        "command": command,
        "graph_sha256": graph_sha256(g) if g is not None else None,
        "seed": seed,
    }
    out.update(fields)
    return out


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from None


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> str:
    g = _read_graph(args.graph)
    cycle = find_cycle(g)
    fields = {
        "vertices": _labels(g.vertices),
        "num_directed": len(g.directed),
        "num_bidirected": len(g.bidirected),
        "acyclic": cycle is None,
        "ancestral_vertices": _labels(v for v in g.vertices if is_ancestral_vertex(g, v)),
    }
    if cycle is None:
        fields["topological_order"] = _labels(topological_order(g))
        fields["globally_identifiable"] = is_globally_identifiable(g)
        fields["candidate_pairs"] = [{"i": label_to_json(i), "J": _labels(J)} for i, J in candidate_pairs(g)]
    else:
        fields["cycle"] = _labels(cycle)
    return _dump(_report("validate", g, args.seed, **fields))


def _separation(args, command: str, restricted: bool) -> str:
    g = _read_graph(args.graph)
    A = _vertex_set(g, args.A, [])
    B = _vertex_set(g, args.B, [])
    P = _vertex_set(g, getattr(args, "P", None)) if restricted else None
    Q = _vertex_set(g, getattr(args, "Q", None)) if restricted else None
    cert = min_restricted_cut(g, A, B, P, Q)
    fields = {"certificate": cert.to_json(), "separated_below_size": cert.size < min(len(cert.A), len(cert.B))}
    if getattr(args, "check", None):
        data = _load_json(args.check)
        given = SeparationCertificate.from_json(data.get("certificate", data))
        fields["check"] = {
            "separates": is_restricted_trek_separated(g, given.A, given.B, given.SL, given.SR, given.P, given.Q),
            "minimum": given.size == len(given.SL) + len(given.SR)
            == min_restricted_cut(g, given.A, given.B, given.P, given.Q).size,
        }
    return _dump(_report(command, g, args.seed, **fields))


def cmd_tsep(args) -> str:
    return _separation(args, "tsep", restricted=False)


def cmd_rtsep(args) -> str:
    return _separation(args, "rtsep", restricted=True)


def cmd_rank(args) -> str:
    g = _read_graph(args.graph)
    A, B = _vertex_set(g, args.A, []), _vertex_set(g, args.B, [])
    P, Q = _vertex_set(g, args.P), _vertex_set(g, args.Q)
    r = generic_rank(g, A, B, P, Q)
    return _dump(_report("rank", g, args.seed, A=_labels(A), B=_labels(B),
                         P=_labels(P if P is not None else g.vertices),
                         Q=_labels(Q if Q is not None else g.vertices), generic_rank=r))


def cmd_sigma(args) -> str:
    g = _read_graph(args.graph)
    m = restricted_covariance(g, _vertex_set(g, args.P), _vertex_set(g, args.Q))
    return _dump(_report("sigma", g, args.seed, rows=_labels(m.rows), cols=_labels(m.cols),
                         entries=m.as_strings()))


def cmd_constraints(args) -> str:
    g = _read_graph(args.graph)
    if find_cycle(g) is not None:
        raise CycleError(find_cycle(g))
    pairs = []
    for i, J in candidate_pairs(g):
        dets = [{"rows": _labels(rows), "polynomial": str(p), "expr": expr_to_json(parental_expr(g, i, J, rows))}
                for rows, p in parentally_nested_determinants(g, i, J)]
        pairs.append({"i": label_to_json(i), "J": _labels(J), "determinants": dets})
    fields = {"candidate_pairs": pairs}
    try:
        fields["theorem_constraints"] = [r.to_json() for r in theorem_constraint_set(g)]
    except ConstraintError as exc:
        fields["theorem_constraints"] = None
        fields["theorem_error"] = str(exc)
    return _dump(_report("constraints", g, args.seed, **fields))


def cmd_expand(args) -> str:
    expr = expr_from_json(_load_json(args.expr))
    return _dump(_report("expand", None, args.seed, polynomial=str(expand_nested(expr))))


def cmd_verify(args) -> str:
    g = _read_graph(args.graph)
    if (args.poly is None) == (args.expr is None):
        raise UsageError("give exactly one of --poly or --expr")
    if args.poly is not None:
        f = parse_polynomial(Path(args.poly).read_text(encoding="utf-8"))
    else:
        f = expr_from_json(_load_json(args.expr))
    if args.mode == "symbolic":
        if args.observed is not None:
            raise UsageError("--observed needs --mode numeric")
        verdict = vanishes_symbolically(g, f, seed=args.seed)
    else:
        obs = _vertex_set(g, args.observed)
        verdict = vanishes_numerically(g, f, trials=args.trials, seed=args.seed, modulus=args.modulus, observed=obs)
    fields = verdict.to_json()
    fields.pop("graph_sha256")
    fields.pop("seed")
    return _dump(_report("verify", g, args.seed, mode=args.mode, verdict=fields))


def cmd_sample(args) -> str:
    g = _read_graph(args.graph)
    obs = _vertex_set(g, args.observed)
    smp = sample_covariance(SampleSpec(seed=args.seed, observed=None if obs is None else tuple(obs)), g)
    return _dump(_report("sample", g, args.seed, labels=_labels(smp.labels), sigma=_matrix(smp.sigma),
                         Lambda=_matrix(smp.draw.Lambda), Omega=_matrix(smp.draw.Omega),
                         parameter_labels=_labels(smp.draw.labels)))


def cmd_member(args) -> str:
    g = _read_graph(args.graph)
    data = _load_json(args.sigma)
    if not isinstance(data, dict) or "sigma" not in data:
        raise ValueError("covariance file needs a 'sigma' matrix (and optionally 'labels')")
    cov = [[Fraction(str(x)) for x in r] for r in data["sigma"]]
    labels = [str(x) for x in data.get("labels", g.vertices)]
    member = membership_check(g, cov, labels)
    fields = {"member": member}
    try:
        fields["fit"] = fit_parameters(g, cov, labels).to_json()
    except FitError as exc:
        fields["fit"] = None
        fields["fit_error"] = str(exc)
    return _dump(_report("member", g, args.seed, **fields))


def _survey_lines(g: MixedGraph, args):
    acyclic = find_cycle(g) is None
    base = {"tool_version": __version__, "graph_sha256": graph_sha256(g), "seed": args.seed}
    for i, J in candidate_pairs(g) if acyclic else []:
        for rows, p in parentally_nested_determinants(g, i, J):
            if args.verify == "symbolic":
                status = vanishes_symbolically(g, p, seed=args.seed).status
            elif args.verify == "numeric":
                status = vanishes_numerically(g, p, trials=args.trials, seed=args.seed).status
            else:
                status = None
            yield dict(base, kind="candidate", i=label_to_json(i), J=_labels(J), rows=_labels(rows),
                       polynomial=str(p), status=status)
    if not acyclic:
        return
    V = list(g.vertices)
    for k in range(1, args.max_size + 1):
        for A in itertools.combinations(V, k):
            for B in itertools.combinations(V, k):
                for P in _supersets(V, A):
                    for Q in _supersets(V, B):
                        cert = min_restricted_cut(g, A, B, P, Q)
                        if cert.size < k or args.all:
                            yield dict(base, kind="separation", certificate=cert.to_json())


def _supersets(V, S):
    rest = [v for v in V if v not in S]
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            yield [v for v in V if v in S or v in extra]


def cmd_survey(args):
    g = _read_graph(args.graph)
    for line in _survey_lines(g, args):
        yield json.dumps(line, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nestdet", description="Trek separation and nested determinant constraints.")
    p.add_argument("--version", action="version", version=f"nestdet {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, func, help_, graph=True):
        sp = sub.add_parser(name, help=help_)
        if graph:
            sp.add_argument("graph", help="graph file")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.set_defaults(func=func)
        return sp

    cmd("validate", cmd_validate, "parse a graph and report its structural predicates")

    sp = cmd("tsep", cmd_tsep, "minimum trek-separating certificate")
    sp.add_argument("--A", required=True)
    sp.add_argument("--B", required=True)
    sp.add_argument("--check", help="certificate JSON to re-verify")

    sp = cmd("rtsep", cmd_rtsep, "minimum restricted trek-separating certificate")
    for flag in ("--A", "--B"):
        sp.add_argument(flag, required=True)
    sp.add_argument("--P")
    sp.add_argument("--Q")
    sp.add_argument("--check", help="certificate JSON to re-verify")

    sp = cmd("rank", cmd_rank, "generic rank of a restricted covariance block")
    for flag in ("--A", "--B"):
        sp.add_argument(flag, required=True)
    sp.add_argument("--P")
    sp.add_argument("--Q")

    sp = cmd("sigma", cmd_sigma, "symbolic (restricted) covariance matrix")
    sp.add_argument("--P")
    sp.add_argument("--Q")

    cmd("constraints", cmd_constraints, "parentally nested determinants of a graph")

    sp = cmd("expand", cmd_expand, "expand a nested determinant expression", graph=False)
    sp.add_argument("expr", help="expression JSON file")

    sp = cmd("verify", cmd_verify, "does a polynomial or expression vanish on the model?")
    sp.add_argument("--poly", help="polynomial file")
    sp.add_argument("--expr", help="expression JSON file")
    sp.add_argument("--mode", choices=("symbolic", "numeric"), default="symbolic")
    sp.add_argument("--trials", type=int, default=8)
    sp.add_argument("--modulus", type=int, default=None)
    sp.add_argument("--observed", help="observed vertices (numeric mode)")

    sp = cmd("sample", cmd_sample, "draw an exact covariance matrix from the model")
    sp.add_argument("--observed")

    sp = cmd("member", cmd_member, "model membership test and parameter fit")
    sp.add_argument("--sigma", required=True, help="JSON file with 'labels' and 'sigma'")

    sp = cmd("survey", cmd_survey, "enumerate constraints and restricted separations as JSON lines")
    sp.add_argument("--max-size", type=int, default=2)
    sp.add_argument("--verify", choices=("none", "symbolic", "numeric"), default="numeric")
    sp.add_argument("--trials", type=int, default=4)
    sp.add_argument("--all", action="store_true", help="also emit non-separating quadruples")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "trials", 1) is not None and getattr(args, "trials", 1) <= 0:
            raise UsageError("--trials must be positive")
        out = args.func(args)
        if isinstance(out, str):
            out = [out]
        sink = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
        try:
            for chunk in out:
                sink.write(chunk)
                sink.flush()
        finally:
            if args.out:
                sink.close()
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head); not an error
        sys.stdout = open(os.devnull, "w")
        return 0
    except UsageError as exc:
        print(f"nestdet: error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"nestdet: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
