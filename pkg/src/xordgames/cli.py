"""Command-line front end.

Exit codes: 0 success, 1 unexpected failure, 2 invalid input (including
game-file parse errors), 3 resource limit, 4 solver did not converge.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import classical, equivalence, quantum, sdp, survey
from .errors import InvalidArgument, ParseError, ResourceLimit, XorDError
from .game import GRAY, format_game, read_game
from .perms import make_ld, verify_p1p2

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_LIMIT, EXIT_SOLVER = 0, 1, 2, 3, 4


class SolverFailure(Exception):
    pass


class Report:
    """Collects one verb's output and renders it as text, tsv or json."""

    def __init__(self, precision: int = 6):
        self.precision = precision
        self.values: dict = {}
        self.solver: dict = {}
        self.verdicts: list = []
        self.game: dict | None = None
        self.text: list[str] = []
        self.table: list[list] = []

    def num(self, x) -> str:
        if isinstance(x, (int, bool)) or x is None:
            return str(x)
        if isinstance(x, Fraction):
            x = float(x)
        return f"{x:.{self.precision}g}"

    def kv(self, **items) -> str:
        return " ".join(f"{k}={self.num(v) if not isinstance(v, str) else v}" for k, v in items.items())

    def render(self, fmt: str) -> str:
        if fmt == "json":
            out = {"game": self.game, "values": _jsonable(self.values), "solver": _jsonable(self.solver),
                   "verdicts": self.verdicts}
            return json.dumps(out, indent=2, sort_keys=True)
        if fmt == "tsv":
            if self.table:
                return "\n".join("\t".join(str(c) for c in row) for row in self.table)
            keys = list(self.values) + [f"solver_{k}" for k in self.solver]
            vals = [self.num(v) if not isinstance(v, (str, list)) else json.dumps(v) if isinstance(v, list) else v
                    for v in list(self.values.values()) + list(self.solver.values())]
            return "\t".join(keys) + "\n" + "\t".join(vals)
        return "\n".join(self.text)


def _jsonable(d):
    out = {}
    for k, v in d.items():
        out[k] = float(v) if isinstance(v, Fraction) else v
    return out


def _game_json(g) -> dict:
    return {"n": g.n, "d": g.d,
            "edges": [[u, v, "gray" if c is GRAY else c] for u, v, c in g.edges],
            "bipartition": None if g.bipartition is None else [sorted(s) for s in g.bipartition]}


def _opts(args) -> sdp.SdpOptions:
    return sdp.SdpOptions(gap_tol=args.gap_tol, max_iter=args.max_iter)


def _check_solver(rep: Report, status, gap, iters):
    rep.solver = {"status": status.value, "gap": gap, "iters": iters}
    if status is not sdp.Status.OPTIMAL:
        raise SolverFailure(f"solver stopped with status {status.value}")


# ---------------------------------------------------------------- verbs

def cmd_perms(args, rep: Report):
    ld = make_ld(args.d)
    chk = verify_p1p2(ld)
    for i, p in enumerate(ld):
        rep.text.append(f"pi_{i} = {p}  map={list(p.map)}")
    rep.text.append(f"P1: {'ok' if chk.p1 else 'violated'}, P2: {'ok' if chk.p2 else 'violated'}")
    rep.values = {"perms": [list(p.map) for p in ld], "p1": chk.p1, "p2": chk.p2}
    rep.table = [["index", "map", "cycles"]] + [[i, " ".join(map(str, p.map)), str(p)] for i, p in enumerate(ld)]


def cmd_classical(args, rep: Report):
    g = read_game(args.file)
    r = classical.classical_value(g)
    rep.game = _game_json(g)
    rep.values = {"beta_c": r.beta_c, "gamma_c": r.gamma_c, "omega_c": r.omega_c, "witness": list(r.witness)}
    rep.text.append(rep.kv(beta_c=r.beta_c, gamma_c=r.gamma_c, omega_c=r.omega_c))
    rep.text.append("witness=" + " ".join(map(str, r.witness)))


def cmd_cycles(args, rep: Report):
    g = read_game(args.file)
    r = classical.classify_cycles(g)
    lo, hi = classical.contradiction_bounds(g, r)
    rep.game = _game_json(g)
    rep.table = [["cycle", "composed", "fixed_points", "kind"]]
    rep.text.append(f"{'cycle':<24}{'composed':<14}{'fixed':>6}  kind")
    for e in r.cycles:
        cyc = "-".join(map(str, e.vertices))
        rep.table.append([cyc, str(e.perm), e.fixed_points, r.kind(e)])
        rep.text.append(f"{cyc:<24}{str(e.perm):<14}{e.fixed_points:>6}  {r.kind(e)}")
    rep.text.append(rep.kv(xi_good=r.xi_good, xi_bad=r.xi_bad, xi_ugly=r.xi_ugly))
    rep.text.append(rep.kv(lower=lo, upper=hi))
    rep.values = {"xi_good": r.xi_good, "xi_bad": r.xi_bad, "xi_ugly": r.xi_ugly, "lower": lo, "upper": hi}


def cmd_bipartize(args, rep: Report):
    g = read_game(args.file)
    if g.d != 2 or any(c != 1 for _, _, c in g.edges):
        raise InvalidArgument("bipartize expects a d=2 game with every edge dashed (color 1)")
    beta2, removed = classical.edge_bipartization(g)
    rep.game = _game_json(g)
    rep.values = {"beta2": beta2, "removed": [list(e) for e in removed]}
    rep.text.append(rep.kv(beta2=beta2))
    rep.text.append("removed=" + " ".join(f"{u}-{v}" for u, v in removed))


def cmd_kg(args, rep: Report):
    g = read_game(args.file)
    kg = equivalence.build_kg(g)
    rep.game = _game_json(g)
    rep.values = {"vertices": kg.n_vertices, "edges": [list(e) for e in kg.edges]}
    rep.text.append(format_game(kg.to_game(), comment=f"KG cover: vertex (i, s) is i*{g.d} + s").rstrip("\n"))


def cmd_canon(args, rep: Report):
    g = read_game(args.file)
    code = equivalence.canonical_id(g)
    rep.game = _game_json(g)
    rep.values = {"canonical_id": code}
    rep.text.append(code)


def cmd_equiv(args, rep: Report):
    g1, g2 = read_game(args.file1), read_game(args.file2)
    eq = equivalence.equivalent(g1, g2)
    rep.values = {"equivalent": eq}
    rep.text.append(f"equivalent: {'yes' if eq else 'no'}")
    if eq:
        w = equivalence.equivalence_witness(g1, g2)
        if w is None:
            rep.verdicts.append("no witness found within budget")
            rep.text.append("witness: not found")
        else:
            ops = [f"s({op.vertex},{op.sigma})" for op in w.ops]
            scal = [f"{v}:x{m}" for v, m in enumerate(w.multipliers) if m != 1]
            rep.values["witness"] = {"vertex_map": list(w.vertex_map), "multipliers": list(w.multipliers),
                                     "switches": [[op.vertex, list(op.sigma.map)] for op in w.ops]}
            if scal:
                rep.text.append("rescale: " + " ".join(scal))
            rep.text.append("switches: " + (" ".join(ops) if ops else "none"))
            rep.text.append("vertex map: " + " ".join(f"{v}->{t}" for v, t in enumerate(w.vertex_map)))


def _maybe_dump(args, problem):
    if getattr(args, "dump_sdp", None):
        with open(args.dump_sdp, "w") as fh:
            fh.write(sdp.dump_sdp(problem))


def _theta_problem(g):
    og = quantum.build_orthogonality_graph(g)
    return sdp.theta_sdp(og.adjacency(), og.weight_array())


def _aq_problem(g):
    return quantum.moment_lmi(quantum.build_moment_index(g)).to_standard()


def cmd_theta(args, rep: Report):
    g = read_game(args.file)
    rep.game = _game_json(g)
    _maybe_dump(args, _theta_problem(g))
    r = quantum.theta_upper_bound(g, _opts(args))
    rep.values = {"theta": r.value, "events": r.events}
    rep.text.append(rep.kv(theta=r.value, status=r.status.value) + f" gap={r.gap:.1g}")
    _check_solver(rep, r.status, r.gap, r.iterations)


def cmd_aq(args, rep: Report):
    g = read_game(args.file)
    rep.game = _game_json(g)
    _maybe_dump(args, _aq_problem(g))
    r = quantum.almost_quantum_value(g, _opts(args))
    rep.values = {"gamma_aq": r.value}
    rep.text.append(rep.kv(gamma_aq=r.value) + f" gap={r.gap:.1g}")
    rep.text.append(rep.kv(status=r.status.value, iters=r.iterations, dim=r.dim))
    if quantum.is_chsh3_class(g):
        rep.verdicts.append("CHSH-3 class")
        rep.text.append("note: CHSH-3 class instance")
    _check_solver(rep, r.status, r.gap, r.iterations)


def cmd_screen(args, rep: Report):
    g = read_game(args.file)
    r = quantum.pseudo_telepathy_screen(g, _opts(args))
    rep.game = _game_json(g)
    rep.values = {"beta_c": r.beta_c, "gamma_c": r.gamma_c, "gamma_aq": r.gamma_aq}
    rep.verdicts = [r.verdict, *r.notes]
    rep.text.append(rep.kv(beta_c=r.beta_c, gamma_c=r.gamma_c, edges=r.edges)
                    + ("" if r.gamma_aq is None else " " + rep.kv(gamma_aq=r.gamma_aq)))
    rep.text.append(f"verdict: {r.verdict}")
    rep.text += [f"note: {x}" for x in r.notes]


def cmd_sdp_dump(args, rep: Report):
    g = read_game(args.file)
    p = _theta_problem(g) if args.kind == "theta" else _aq_problem(g)
    text = sdp.dump_sdp(p)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        rep.text.append(f"wrote {args.out}: dim={p.dim} constraints={p.n_constraints}")
    else:
        rep.text.append(text.rstrip("\n"))
    rep.values = {"dim": p.dim, "constraints": p.n_constraints}


def cmd_survey(args, rep: Report):
    values = tuple(v.strip() for v in args.values.split(",") if v.strip())
    flt = survey.GraphFilter(connected=not args.allow_disconnected, min_degree=args.min_degree,
                             bipartite=True if args.bipartite else None,
                             complete_bipartite=args.complete_bipartite)
    spec = survey.SurveySpec(tuple(args.n), args.d, flt, args.mode, args.color, values,
                             bell=args.bell, max_sdps=args.max_sdps)
    log = (lambda msg: print(msg, file=sys.stderr)) if args.verbose else None
    inst = survey.survey_instances(spec)
    est = survey.estimate(spec, inst)
    print(f"estimate: {est}", file=sys.stderr)
    res = survey.run_survey(spec, out=args.out, resume=args.resume, workers=args.workers,
                            force=args.force, progress=log)
    s = res.summary
    rep.values = {"instances": s.total, "flagged": s.flagged,
                  "gap_histogram": {f"{k:.3f}": v for k, v in sorted(s.gap_histogram.items())},
                  "theta_certified": s.theta_certified, "errors": s.errors,
                  "pseudo_telepathy_candidates": s.telepathy_candidates}
    rep.text += s.lines()
    rep.table = [survey.TSV_COLUMNS] + [r.to_tsv() for r in res.rows]


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "tsv", "json"), default="text")
    common.add_argument("--precision", type=int, default=6, help="significant digits")
    common.add_argument("--gap-tol", type=float, default=1e-7)
    common.add_argument("--max-iter", type=int, default=200)

    p = argparse.ArgumentParser(prog="xordgames", description="XOR-d game analysis")
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help_, files=("file",)):
        sp_ = sub.add_parser(name, parents=[common], help=help_)
        for f in files:
            sp_.add_argument(f)
        sp_.set_defaults(fn=fn)
        return sp_

    x = sub.add_parser("perms", parents=[common], help="print L_d and check P1/P2")
    x.add_argument("d", type=int)
    x.set_defaults(fn=cmd_perms)
    verb("classical", cmd_classical, "exact classical value")
    verb("cycles", cmd_cycles, "good/bad/ugly cycle table")
    verb("bipartize", cmd_bipartize, "edge bipartization number")
    verb("kg", cmd_kg, "permutation cover graph")
    verb("canon", cmd_canon, "canonical encoding (hex)")
    verb("equiv", cmd_equiv, "equivalence test", files=("file1", "file2"))
    verb("theta", cmd_theta, "weighted theta of the orthogonality graph").add_argument("--dump-sdp")
    verb("aq", cmd_aq, "almost-quantum (level 1+AB) value").add_argument("--dump-sdp")
    verb("screen", cmd_screen, "pseudo-telepathy screen")
    x = verb("sdp-dump", cmd_sdp_dump, "write an SDP in coordinate text form")
    x.add_argument("--kind", choices=("theta", "aq"), default="aq")
    x.add_argument("--out")

    x = sub.add_parser("survey", parents=[common], help="enumerate and evaluate a class of games")
    x.add_argument("--n", type=int, nargs="+", required=True)
    x.add_argument("--d", type=int, default=2)
    x.add_argument("--mode", choices=survey.MODES, default=survey.SINGLE_COLOR)
    x.add_argument("--color", type=int, default=1, help="color for single-color mode")
    x.add_argument("--values", default="classical,aq")
    x.add_argument("--min-degree", type=int, default=2)
    x.add_argument("--allow-disconnected", action="store_true")
    x.add_argument("--bipartite", action="store_true")
    x.add_argument("--complete-bipartite", action="store_true")
    x.add_argument("--bell", action="store_true", help="declare the bipartition (two-party games)")
    x.add_argument("--out")
    x.add_argument("--resume")
    x.add_argument("--workers", type=int, default=1)
    x.add_argument("--max-sdps", type=int, default=20_000)
    x.add_argument("--force", action="store_true", help="run even above the SDP budget")
    x.add_argument("--verbose", action="store_true")
    x.set_defaults(fn=cmd_survey)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    rep = Report(args.precision)
    code = EXIT_OK
    try:
        args.fn(args, rep)
    except ParseError as exc:
        print(f"{getattr(args, 'file', '')}: parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except SolverFailure as exc:
        print(f"solver: {exc}", file=sys.stderr)
        code = EXIT_SOLVER
    except XorDError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(rep.render(args.format))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
