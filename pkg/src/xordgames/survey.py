"""Bulk enumeration of graphs and labelings, and value surveys over them.

Graphs are generated by vertex augmentation with certificate dedupe.
Labelings of a fixed graph are first reduced modulo switching (spanning
forest edges fixed to color 0), then deduplicated by canonical form.
"""
from __future__ import annotations

import csv
import itertools
import math
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np

from .classical import classical_value
from .equivalence import (_structure_adjacency, canonical_form, scale_outcomes,
                          switch_by_shifts, units)
from .errors import InvalidArgument, ResourceLimit
from .game import GRAY, LabeledGameGraph
from .graphs import (adjacency, canonical_certificate, canonical_labelings,
                     connected_components, is_bipartite)
from .quantum import almost_quantum_value, theta_upper_bound
from .sdp import SdpOptions, Status

MAX_N = 8


# ---------------------------------------------------------------- graphs

def _all_graphs(n: int) -> list[tuple[tuple[int, int], ...]]:
    """One edge list per isomorphism class on ``n`` vertices (unfiltered)."""
    if n > MAX_N:
        raise ResourceLimit(f"graph enumeration is limited to n <= {MAX_N}")
    graphs = [()]
    for k in range(1, n + 1):
        seen = {}
        for edges in graphs:
            for mask in range(1 << (k - 1)):
                new = tuple(edges) + tuple((v, k - 1) for v in range(k - 1) if mask >> v & 1)
                cert = canonical_certificate(k, adjacency(k, new))
                if cert not in seen:
                    seen[cert] = tuple(sorted(new))
        graphs = [seen[c] for c in sorted(seen)]
    return graphs


@dataclass(frozen=True)
class GraphFilter:
    connected: bool = True
    min_degree: int = 2
    bipartite: bool | None = None
    complete_bipartite: bool = False

    def accepts(self, n: int, edges) -> bool:
        deg = [0] * n
        nb = [[] for _ in range(n)]
        for u, v in edges:
            deg[u] += 1
            deg[v] += 1
            nb[u].append(v)
            nb[v].append(u)
        if n and min(deg) < self.min_degree:
            return False
        if self.connected and len(connected_components(n, nb)) > 1:
            return False
        bip = is_bipartite(n, nb)
        if self.bipartite is not None and bip != self.bipartite:
            return False
        if self.complete_bipartite:
            if not bip:
                return False
            left, right = bipartition_of(n, edges)
            if len(edges) != len(left) * len(right):
                return False
        return True


def bipartition_of(n, edges) -> tuple[frozenset, frozenset]:
    """2-coloring with vertex 0 (and each component's smallest vertex) on the left."""
    nb = [[] for _ in range(n)]
    for u, v in edges:
        nb[u].append(v)
        nb[v].append(u)
    side = [-1] * n
    for s in range(n):
        if side[s] >= 0:
            continue
        side[s] = 0
        stack = [s]
        while stack:
            u = stack.pop()
            for w in nb[u]:
                if side[w] < 0:
                    side[w] = 1 - side[u]
                    stack.append(w)
                elif side[w] == side[u]:
                    raise InvalidArgument("graph is not bipartite")
    return frozenset(v for v in range(n) if side[v] == 0), frozenset(v for v in range(n) if side[v] == 1)


def enum_graphs(n: int, flt: GraphFilter | None = None) -> list[tuple[tuple[int, int], ...]]:
    """Non-isomorphic graphs on ``n`` vertices passing the filter, ordered by
    edge count then canonical certificate."""
    flt = flt or GraphFilter()
    out = [e for e in _all_graphs(n) if flt.accepts(n, e)]
    out.sort(key=lambda e: (len(e), canonical_certificate(n, adjacency(n, e))))
    return out


# ---------------------------------------------------------------- labelings

SINGLE_COLOR = "single-color"
ALL_LD = "all-ld"
WITH_GRAY = "with-gray"
MODES = (SINGLE_COLOR, ALL_LD, WITH_GRAY)


@dataclass(frozen=True)
class LabelingClass:
    game: LabeledGameGraph
    canonical: bytes
    size: int | None = None      # labelings of the fixed graph in this class


def _forest_edges(n, pairs):
    """Indices of a BFS spanning forest of ``pairs`` (smallest vertex first)."""
    nb = [[] for _ in range(n)]
    for k, (u, v) in enumerate(pairs):
        nb[u].append((v, k))
        nb[v].append((u, k))
    seen = [False] * n
    tree = set()
    for r in range(n):
        if seen[r]:
            continue
        seen[r] = True
        queue = [r]
        for u in queue:
            for w, k in sorted(nb[u]):
                if not seen[w]:
                    seen[w] = True
                    tree.add(k)
                    queue.append(w)
    return tree


def switching_reduced_labelings(n, pairs, d) -> Iterator[tuple[int, ...]]:
    """Colorings with spanning-forest edges at 0; every switching class of
    colorings of the fixed graph contains at least one of them."""
    tree = _forest_edges(n, pairs)
    free = [k for k in range(len(pairs)) if k not in tree]
    for vals in itertools.product(range(d), repeat=len(free)):
        lab = [0] * len(pairs)
        for k, c in zip(free, vals):
            lab[k] = c
        yield tuple(lab)


def _automorphisms(g: LabeledGameGraph) -> list[list[int]]:
    adj = _structure_adjacency(g)
    _, orders = canonical_labelings(g.n, adj)
    base = orders[0]
    inv = [0] * g.n
    for i, v in enumerate(base):
        inv[v] = i
    # order maps position -> vertex; base^-1 then order is an automorphism
    return [[o[inv[v]] for v in range(g.n)] for o in orders]


def fixed_graph_orbit(g: LabeledGameGraph, max_labelings: int = 5_000_000) -> np.ndarray:
    """Codes of all labelings of ``g``'s graph equivalent to ``g``.

    Breadth-first closure under single-vertex shifts, unit rescalings per
    colored component and graph automorphisms, run on integer codes
    ``sum_k label_k d^k``.  Every edge must be colored.
    """
    d, n = g.d, g.n
    pairs = g.pairs()
    m = len(pairs)
    if not g.is_total():
        raise InvalidArgument("orbit sizes are computed for fully colored graphs")
    if d ** m > max_labelings:
        raise ResourceLimit(f"{d}^{m} labelings exceed {max_labelings}")
    pos = {p: k for k, p in enumerate(pairs)}
    gens = []   # (edge permutation, additive shift, multiplier per edge)
    ident = np.arange(m)
    for v in range(n):
        gens.append((ident, np.array([-1 if v in p else 0 for p in pairs]), np.ones(m, dtype=np.int64)))
    for comp in connected_components(n, g.neighbors(colored_only=True)):
        for u in units(d):
            gens.append((ident, np.zeros(m, dtype=np.int64),
                         np.array([u if p[0] in comp else 1 for p in pairs])))
    for a in _automorphisms(g):
        perm = np.empty(m, dtype=np.int64)
        for k, (x, y) in enumerate(pairs):
            perm[pos[(min(a[x], a[y]), max(a[x], a[y]))]] = k
        gens.append((perm, np.zeros(m, dtype=np.int64), np.ones(m, dtype=np.int64)))
    powers = d ** np.arange(m, dtype=np.int64)
    seen = np.zeros(d ** m, dtype=bool)
    frontier = np.array([g.labels], dtype=np.int64)
    seen[frontier @ powers] = True
    while frontier.size:
        nxt = []
        for perm, add, mul in gens:
            lab = (frontier[:, perm] * mul[perm] + add[perm]) % d
            codes = lab @ powers
            codes, first = np.unique(codes, return_index=True)
            new = ~seen[codes]
            seen[codes[new]] = True
            nxt.append(lab[first[new]])
        frontier = np.concatenate(nxt) if nxt else np.zeros((0, m), dtype=np.int64)
    return np.flatnonzero(seen)


def enum_labelings(n: int, pairs, d: int, mode: str = ALL_LD, color: int = 1,
                   bipartition=None, class_sizes: bool = False,
                   budget: int = 200_000) -> list[LabelingClass]:
    """One labeled game per equivalence class over the given graph."""
    pairs = [tuple(p) for p in pairs]
    if mode not in MODES:
        raise InvalidArgument(f"unknown labeling mode {mode!r}")
    if mode == SINGLE_COLOR:
        g = LabeledGameGraph.single_color(n, pairs, d, color, bipartition)
        return [LabelingClass(g, canonical_form(g), 1 if class_sizes else None)]
    if mode == ALL_LD:
        tree = _forest_edges(n, pairs)
        count = d ** (len(pairs) - len(tree))
        if count > budget:
            raise ResourceLimit(f"{count} reduced labelings exceed the budget {budget}")
        base = LabeledGameGraph.single_color(n, pairs, d, 0, bipartition)
        found: dict[bytes, LabeledGameGraph] = {}
        for lab in switching_reduced_labelings(n, pairs, d):
            g = base.with_labels(lab)
            key = canonical_form(g)
            found.setdefault(key, g)
        out = []
        for key in sorted(found):
            g = found[key]
            out.append(LabelingClass(g, key, int(fixed_graph_orbit(g).size) if class_sizes else None))
        if class_sizes:
            assert sum(c.size for c in out) == d ** len(pairs)
        return out
    # with gray: every nonempty colored subset, colorings modulo switching
    found = {}
    total = 0
    for mask in range(1, 1 << len(pairs)):
        colored = [k for k in range(len(pairs)) if mask >> k & 1]
        cpairs = [pairs[k] for k in colored]
        tree = _forest_edges(n, cpairs)
        total += d ** (len(cpairs) - len(tree))
        if total > budget:
            raise ResourceLimit(f"more than {budget} reduced partial labelings")
        for lab in switching_reduced_labelings(n, cpairs, d):
            labels = [GRAY] * len(pairs)
            for k, c in zip(colored, lab):
                labels[k] = c
            g = LabeledGameGraph(n, d, tuple((u, v, c) for (u, v), c in zip(pairs, labels)), bipartition)
            found.setdefault(canonical_form(g), g)
    return [LabelingClass(found[k], k) for k in sorted(found)]


def decode_canonical(code: bytes | str) -> LabeledGameGraph:
    """Rebuild a representative game from a canonical encoding."""
    if isinstance(code, str):
        code = bytes.fromhex(code)
    n, d = code[0], code[1]
    edges = []
    body = code[2:]
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            t = body[k]
            k += 1
            if t == 1:
                edges.append((i, j, GRAY))
            elif t >= 2:
                edges.append((i, j, t - 2))
    return LabeledGameGraph(n, d, tuple(edges))


# ---------------------------------------------------------------- survey

VALUES = ("classical", "aq", "theta")
TSV_COLUMNS = ["canonical_id", "n", "edges", "bipartite", "beta_c", "gamma_c", "gamma_aq", "theta", "flags"]


@dataclass(frozen=True)
class SurveySpec:
    n_values: tuple[int, ...]
    d: int = 2
    graph_filter: GraphFilter = field(default_factory=GraphFilter)
    mode: str = SINGLE_COLOR
    color: int = 1
    values: tuple[str, ...] = ("classical", "aq")
    bell: bool = False           # declare the bipartition (two-party games)
    flag_tol: float = 1e-4
    max_sdps: int = 20_000

    def __post_init__(self):
        bad = set(self.values) - set(VALUES)
        if bad:
            raise InvalidArgument(f"unknown value kinds {sorted(bad)}")
        if self.mode not in MODES:
            raise InvalidArgument(f"unknown labeling mode {self.mode!r}")
        if self.bell and self.graph_filter.bipartite is False:
            raise InvalidArgument("Bell surveys need bipartite graphs")


@dataclass
class SurveyRow:
    canonical_id: str
    n: int
    edges: int
    bipartite: bool
    beta_c: int | None = None
    gamma_c: int | None = None
    gamma_aq: float | None = None
    theta: float | None = None
    flags: tuple[str, ...] = ()

    @property
    def colored(self) -> int | None:
        return None if self.gamma_c is None else self.beta_c + self.gamma_c

    @property
    def gap(self) -> float | None:
        if self.gamma_aq is None or self.gamma_c is None:
            return None
        return self.gamma_aq - self.gamma_c

    def to_tsv(self) -> list[str]:
        f = lambda x: "" if x is None else repr(float(x)) if isinstance(x, float) else str(x)
        return [self.canonical_id, str(self.n), str(self.edges), str(int(self.bipartite)),
                f(self.beta_c), f(self.gamma_c), f(self.gamma_aq), f(self.theta), ",".join(self.flags)]

    @classmethod
    def from_tsv(cls, rec: dict) -> "SurveyRow":
        opt = lambda s, t: None if s == "" else t(s)
        return cls(rec["canonical_id"], int(rec["n"]), int(rec["edges"]), rec["bipartite"] == "1",
                   opt(rec["beta_c"], int), opt(rec["gamma_c"], int), opt(rec["gamma_aq"], float),
                   opt(rec["theta"], float), tuple(x for x in rec["flags"].split(",") if x))


def survey_instances(spec: SurveySpec) -> list[LabeledGameGraph]:
    """Every class representative the survey will evaluate, deduplicated."""
    out: dict[bytes, LabeledGameGraph] = {}
    for n in spec.n_values:
        flt = spec.graph_filter
        if spec.bell and flt.bipartite is None:
            flt = replace(flt, bipartite=True)
        for edges in enum_graphs(n, flt):
            bip = bipartition_of(n, edges) if spec.bell else None
            for cls in enum_labelings(n, edges, spec.d, spec.mode, spec.color, bip):
                out.setdefault(cls.canonical, cls.game)
    return [out[k] for k in sorted(out)]


@dataclass(frozen=True)
class SurveyEstimate:
    instances: int
    sdps: int
    max_dim: int

    def __str__(self):
        return f"{self.instances} instances, {self.sdps} SDP solves, largest moment matrix {self.max_dim}"


def estimate(spec: SurveySpec, instances=None) -> SurveyEstimate:
    inst = survey_instances(spec) if instances is None else instances
    per = sum(1 for v in spec.values if v in ("aq", "theta"))
    dims = [1 + g.n * (g.d - 1) + len(g.commutation_pairs()) * (g.d - 1) ** 2 for g in inst]
    return SurveyEstimate(len(inst), per * len(inst), max(dims, default=0))


def _complete_commutation(g: LabeledGameGraph) -> bool:
    return len(g.commutation_pairs()) == g.n * (g.n - 1) // 2


def evaluate_instance(g: LabeledGameGraph, values=("classical", "aq"), flag_tol: float = 1e-4,
                      opts: SdpOptions | None = None) -> SurveyRow:
    """One survey row; failures are recorded as flags rather than raised."""
    cid = canonical_form(g).hex()
    row = SurveyRow(cid, g.n, len(g.commutation_pairs()), g.bipartition is not None)
    flags = []
    try:
        cr = classical_value(g)
        row.beta_c, row.gamma_c = cr.beta_c, cr.gamma_c
        if "aq" in values:
            aq = almost_quantum_value(g, opts)
            row.gamma_aq = aq.value
            if aq.status is not Status.OPTIMAL:
                flags.append("aq_" + aq.status.value.lower())
            if aq.value > cr.gamma_c + flag_tol:
                flags.append("nonclassical")
            if cr.beta_c > 0 and aq.value >= cr.edges - 1e-6:
                flags.append("pseudo_telepathy_candidate")
        if "theta" in values:
            th = theta_upper_bound(g, opts)
            row.theta = th.value
            if abs(th.value - cr.gamma_c) <= 1e-5:
                flags.append("theta_certifies_classical")
        if _complete_commutation(g):
            # all observables commute: quantum strategies are classical mixtures
            flags.append("commuting_certifies_classical")
    except Exception as exc:  # recorded per row, the survey continues
        flags.append(f"error:{type(exc).__name__}")
    row.flags = tuple(flags)
    return row


def _eval_job(args):
    g, values, flag_tol = args
    return evaluate_instance(g, values, flag_tol)


@dataclass
class SurveySummary:
    total: int
    flagged: int
    gap_histogram: dict
    theta_certified: int
    commuting_certified: int
    errors: int
    telepathy_candidates: int

    def lines(self) -> list[str]:
        out = [f"instances: {self.total}", f"gamma_aq > gamma_c: {self.flagged}"]
        for gap, cnt in sorted(self.gap_histogram.items()):
            out.append(f"  gap {gap:.3f}: {cnt}")
        out += [f"theta certifies classical: {self.theta_certified}",
                f"commuting certifies classical: {self.commuting_certified}",
                f"errors: {self.errors}",
                f"pseudo-telepathy candidates: {self.telepathy_candidates}"]
        return out


def summarize(rows, flag_tol: float = 1e-4) -> SurveySummary:
    hist = Counter()
    flagged = 0
    for r in rows:
        if r.gap is not None and r.gap > flag_tol:
            flagged += 1
            hist[round(r.gap, 3)] += 1
    has = lambda f: sum(1 for r in rows if f in r.flags)
    errors = sum(1 for r in rows if any(x.startswith("error:") for x in r.flags))
    return SurveySummary(len(rows), flagged, dict(hist), has("theta_certifies_classical"),
                         has("commuting_certifies_classical"), errors, has("pseudo_telepathy_candidate"))


@dataclass
class SurveyResult:
    rows: list
    summary: SurveySummary
    estimate: SurveyEstimate
    seconds: float


def read_rows(path) -> list[SurveyRow]:
    with open(path, newline="") as fh:
        return [SurveyRow.from_tsv(rec) for rec in csv.DictReader(fh, delimiter="\t")]


def write_rows(path, rows) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(TSV_COLUMNS)
        for r in sorted(rows, key=lambda r: r.canonical_id):
            w.writerow(r.to_tsv())
    os.replace(tmp, path)


def run_survey(spec: SurveySpec, out=None, resume=None, workers: int = 1, force: bool = False,
               progress=None) -> SurveyResult:
    """Evaluate every class representative; rows are keyed by canonical id.

    With ``resume`` the rows already in that TSV are kept and skipped.
    Results are appended to ``out`` as they complete and the file is
    rewritten in canonical-id order at the end.
    """
    t0 = time.time()
    inst = survey_instances(spec)
    est = estimate(spec, inst)
    if progress:
        progress(f"estimate: {est}")
    if est.sdps > spec.max_sdps and not force:
        raise ResourceLimit(f"survey needs {est.sdps} SDP solves, above the budget {spec.max_sdps}")
    done: dict[str, SurveyRow] = {}
    if resume is not None and os.path.exists(resume):
        done = {r.canonical_id: r for r in read_rows(resume)}
    todo = [g for g in inst if canonical_form(g).hex() not in done]
    fh = None
    if out is not None:
        fresh = not os.path.exists(out) or os.path.getsize(out) == 0
        fh = open(out, "a", newline="")
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        if fresh:
            w.writerow(TSV_COLUMNS)
            for r in done.values():
                w.writerow(r.to_tsv())

    def emit(row):
        done[row.canonical_id] = row
        if fh is not None:
            w.writerow(row.to_tsv())
            fh.flush()
        if progress:
            progress(f"{len(done)}/{len(inst)} {row.canonical_id}")

    try:
        if workers > 1 and len(todo) > 1:
            jobs = [(g, spec.values, spec.flag_tol) for g in todo]
            with ProcessPoolExecutor(workers) as pool:
                for row in pool.map(_eval_job, jobs, chunksize=4):
                    emit(row)
        else:
            for g in todo:
                emit(evaluate_instance(g, spec.values, spec.flag_tol))
    finally:
        if fh is not None:
            fh.close()
    keep = {canonical_form(g).hex() for g in inst}
    rows = sorted((r for k, r in done.items() if k in keep), key=lambda r: r.canonical_id)
    if out is not None:
        write_rows(out, rows)
    return SurveyResult(rows, summarize(rows, spec.flag_tol), est, time.time() - t0)


def census(n: int, pairs, d: int) -> Counter:
    """``beta_C`` histogram over every coloring of a fixed graph."""
    from .classical import beta_c_batch
    base = LabeledGameGraph.single_color(n, pairs, d, 0)
    if d ** len(pairs) > 5_000_000:
        raise ResourceLimit("too many labelings for an exhaustive census")
    labels = np.array(list(itertools.product(range(d), repeat=len(pairs))), dtype=np.int64)
    return Counter(int(b) for b in beta_c_batch(base, labels))
