"""Small dense semidefinite programs.

Standard form::

    primal:  max <C, X>   s.t.  <A_k, X> = b_k,  X psd
    dual:    min b.y      s.t.  Z = sum_k y_k A_k - C  psd

Solved by an infeasible-start primal-dual path-following method with the
HKM search direction and Mehrotra's predictor-corrector.  The Schur
complement ``M_kl = tr(A_k X A_l Z^-1)`` is assembled from the sparse
constraint matrices, so problems with many sparse constraints stay cheap.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import InvalidArgument, ResourceLimit


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    MAX_ITERATIONS = "MaxIterations"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class SdpOptions:
    gap_tol: float = 1e-7
    feas_tol: float = 1e-8
    max_iter: int = 200
    max_dim: int = 200


@dataclass
class SdpProblem:
    """``C`` and the constraints ``(A_k, b_k)``; matrices may be dense or scipy sparse."""

    dim: int
    objective: object
    constraints: list = field(default_factory=list)

    def __post_init__(self):
        self.objective = _as_sym(self.objective, self.dim)
        self.constraints = [(_as_sym(a, self.dim), float(b)) for a, b in self.constraints]

    def add(self, a, b: float) -> None:
        self.constraints.append((_as_sym(a, self.dim), float(b)))

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    def stacked(self) -> sp.csr_matrix:
        """Constraints as rows of vec(A_k) (row-major ``i*m + j``)."""
        m = self.dim
        rows, cols, vals = [], [], []
        for k, (a, _) in enumerate(self.constraints):
            coo = a.tocoo()
            rows.append(np.full(coo.nnz, k))
            cols.append(coo.row * m + coo.col)
            vals.append(coo.data)
        if not rows:
            return sp.csr_matrix((0, m * m))
        return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                             shape=(len(self.constraints), m * m))

    def rhs(self) -> np.ndarray:
        return np.array([b for _, b in self.constraints], dtype=float)


def _as_sym(a, m) -> sp.csr_matrix:
    a = sp.csr_matrix(a, dtype=float)
    if a.shape != (m, m):
        raise InvalidArgument(f"matrix of shape {a.shape}, expected {(m, m)}")
    if abs(a - a.T).max() > 1e-12 if a.nnz else False:
        raise InvalidArgument("matrix is not symmetric")
    a.eliminate_zeros()
    return a


@dataclass
class SdpSolution:
    X: np.ndarray
    y: np.ndarray
    Z: np.ndarray
    primal_value: float
    dual_value: float
    gap: float
    status: Status
    iterations: int
    primal_infeasibility: float
    dual_infeasibility: float
    removed: list = field(default_factory=list)

    @property
    def value(self) -> float:
        """Dual objective: an upper bound on the primal maximum."""
        return self.dual_value

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def _remove_redundant(a: sp.csr_matrix, b: np.ndarray, tol=1e-10):
    """Drop linearly dependent constraint rows; report inconsistency."""
    k = a.shape[0]
    if k == 0:
        return np.arange(0), False
    dense = a.toarray()
    _, r, piv = sla.qr(dense.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int((diag > tol * max(1.0, diag[0])).sum()) if diag.size else 0
    keep = np.sort(piv[:rank])
    if rank == k:
        return keep, False
    sol, *_ = np.linalg.lstsq(dense[keep].T, dense.T, rcond=None)
    # every dropped row is a combination of kept rows; b must agree
    resid = b - sol.T @ b[keep]
    return keep, bool(np.abs(resid).max() > 1e-8 * (1 + np.abs(b).max()))


def _schur(S: sp.csr_matrix, St: sp.csc_matrix, X: np.ndarray, W: np.ndarray, budget=4_000_000):
    """``M_kl = tr(A_k X A_l W)`` via ``M = S (W kron X) S^T``."""
    m = X.shape[0]
    K = S.shape[0]
    M = np.zeros((K, K))
    b = max(1, min(m, budget // max(1, m ** 3), budget // max(1, m * K)))
    Sc = S.tocsc()
    for i0 in range(0, m, b):
        i1 = min(m, i0 + b)
        # rows (i, j) of W kron X, columns (q, p): W[i, q] * X[j, p]
        blk = np.einsum("iq,jp->ijqp", W[i0:i1], X).reshape((i1 - i0) * m, m * m)
        R = blk @ St  # (rows, K)
        M += Sc[:, i0 * m:i1 * m] @ R
    return 0.5 * (M + M.T)


def _max_step(X, dX):
    """Largest ``a <= 1`` (before damping) keeping ``X + a dX`` psd."""
    try:
        L = np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        return 0.0
    Li = sla.solve_triangular(L, np.eye(X.shape[0]), lower=True)
    lam = np.linalg.eigvalsh(Li @ dX @ Li.T)[0]
    return math.inf if lam >= 0 else -1.0 / lam


def _sym(a):
    return 0.5 * (a + a.T)


def solve(p: SdpProblem, opts: SdpOptions | None = None) -> SdpSolution:
    """Primal-dual interior point; the returned dual value bounds the maximum from above."""
    opts = opts or SdpOptions()
    m = p.dim
    if m > opts.max_dim:
        raise ResourceLimit(f"SDP dimension {m} exceeds {opts.max_dim}")
    S_all = p.stacked()
    b_all = p.rhs()
    keep, inconsistent = _remove_redundant(S_all, b_all)
    removed = sorted(set(range(len(b_all))) - set(keep.tolist()))
    C = p.objective.toarray()
    if inconsistent:
        return SdpSolution(np.zeros((m, m)), np.zeros(len(b_all)), np.zeros((m, m)), -math.inf, -math.inf,
                           math.inf, Status.INFEASIBLE, 0, math.inf, math.inf, removed)
    S = S_all[keep].tocsr()
    St = S.T.tocsc()
    b = b_all[keep]
    K = S.shape[0]
    if K == 0:
        # max <C, X> over the whole cone: 0 at X = 0 when C is nsd, unbounded otherwise
        bounded = np.linalg.eigvalsh(C)[-1] <= opts.feas_tol * (1 + np.linalg.norm(C))
        return SdpSolution(np.zeros((m, m)), np.zeros(len(b_all)), -C, 0.0, 0.0 if bounded else math.inf,
                           0.0 if bounded else math.inf, Status.OPTIMAL if bounded else Status.INFEASIBLE,
                           0, 0.0, 0.0 if bounded else math.inf, removed)

    def A_op(Xm):
        return S @ Xm.reshape(-1)

    def At_op(y):
        return (St @ y).reshape(m, m)

    # deterministic scaled-identity start
    normA = np.sqrt(np.asarray(S.multiply(S).sum(axis=1)).ravel())
    normC = np.linalg.norm(C)
    xi = max(10.0, math.sqrt(m), *(m * (1 + abs(b[k])) / (1 + normA[k]) for k in range(K)))
    eta = max(10.0, math.sqrt(m), normC, *normA)
    X = xi * np.eye(m)
    Z = eta * np.eye(m)
    y = np.zeros(K)
    nb, nc = np.linalg.norm(b), normC
    status = Status.MAX_ITERATIONS
    it = 0
    pinf = dinf = gap = math.inf
    for it in range(1, opts.max_iter + 1):
        Rp = b - A_op(X)
        Rd = At_op(y) - Z - C
        pval, dval = float(np.sum(C * X)), float(b @ y)
        pinf = np.linalg.norm(Rp) / (1 + nb)
        dinf = np.linalg.norm(Rd) / (1 + nc)
        gap = abs(pval - dval) / (1 + abs(pval))
        if gap <= opts.gap_tol and pinf <= opts.feas_tol and dinf <= opts.feas_tol:
            status = Status.OPTIMAL
            break
        if np.abs(X).max() > 1e12 or np.abs(y).max() > 1e12:
            status = Status.INFEASIBLE
            break
        mu = float(np.sum(X * Z)) / m
        try:
            Lz = np.linalg.cholesky(Z)
        except np.linalg.LinAlgError:
            break
        Zi = sla.cho_solve((Lz, True), np.eye(m))
        Zi = _sym(Zi)
        M = _schur(S, St, X, Zi)
        try:
            cf = sla.cho_factor(M + 1e-14 * np.trace(M) / K * np.eye(K))
        except np.linalg.LinAlgError:
            break
        XRdZi = _sym(X @ Rd @ Zi)

        def direction(sigma_mu, corr):
            R = sigma_mu * Zi - X
            if corr is not None:
                R = R - corr
            h = A_op(R - XRdZi) - Rp
            dy = sla.cho_solve(cf, h)
            dZ = At_op(dy) + Rd
            dX = R - _sym(X @ dZ @ Zi)
            return dX, dy, dZ

        # predictor
        dXa, dya, dZa = direction(0.0, None)
        ap = min(1.0, _max_step(X, dXa))
        ad = min(1.0, _max_step(Z, dZa))
        mu_aff = float(np.sum((X + ap * dXa) * (Z + ad * dZa))) / m
        step = min(ap, ad)
        expon = 1.0 if (mu > 1e-6 and step < 1 / math.sqrt(3)) else max(1.0, 3 * step ** 2)
        sigma = min(1.0, (max(mu_aff, 0.0) / mu) ** expon) if mu > 0 else 0.0
        # corrector
        dX, dy, dZ = direction(sigma * mu, _sym(dXa @ dZa @ Zi))
        gamma = 0.9 + 0.09 * min(ap, ad)
        ap = min(1.0, gamma * _max_step(X, dX))
        ad = min(1.0, gamma * _max_step(Z, dZ))
        if ap < 1e-12 and ad < 1e-12:
            break
        X = _sym(X + ap * dX)
        y = y + ad * dy
        Z = _sym(Z + ad * dZ)
    pval, dval = float(np.sum(C * X)), float(b @ y)
    y_full = np.zeros(len(b_all))
    y_full[keep] = y
    return SdpSolution(X, y_full, Z, pval, dval, abs(pval - dval) / (1 + abs(pval)), status, it,
                       float(pinf), float(dinf), removed)


# ---------------------------------------------------------------- theta

def theta_sdp(adj, weights=None) -> SdpProblem:
    """Weighted Lovasz theta in standard form::

        max sum_uv sqrt(w_u w_v) X_uv   s.t.  tr X = 1,  X_uv = 0 on edges,  X psd

    which equals ``max_v sum w_v |<psi|u_v>|^2`` over orthonormal
    representations ``u`` of the graph and unit handles ``psi``.
    """
    adj = np.asarray(adj)
    m = adj.shape[0]
    w = np.ones(m) if weights is None else np.asarray(weights, dtype=float)
    if (w < 0).any():
        raise InvalidArgument("weights must be nonnegative")
    s = np.sqrt(w)
    p = SdpProblem(m, np.outer(s, s))
    p.add(sp.identity(m), 1.0)
    for u in range(m):
        for v in range(u + 1, m):
            if adj[u, v]:
                p.add(sp.csr_matrix(([0.5, 0.5], ([u, v], [v, u])), shape=(m, m)), 0.0)
    return p


@dataclass
class LmiProblem:
    """``max c0 + c.x  s.t.  F0 + sum_k x_k F_k  psd``; solved through the dual of
    the standard form (``A_k = F_k``, ``C = -F0``, ``b = -c``)."""

    dim: int
    F0: object
    F: list
    c: np.ndarray
    c0: float = 0.0

    def to_standard(self) -> SdpProblem:
        p = SdpProblem(self.dim, -sp.csr_matrix(self.F0))
        for fk, ck in zip(self.F, self.c):
            p.add(fk, -float(ck))
        return p


@dataclass
class LmiSolution:
    value: float          # certified: c0 - <C, X> with X primal feasible
    x: np.ndarray
    sdp: SdpSolution

    @property
    def status(self) -> Status:
        return self.sdp.status

    @property
    def gap(self) -> float:
        return self.sdp.gap


def solve_lmi(lp: LmiProblem, opts: SdpOptions | None = None) -> LmiSolution:
    sol = solve(lp.to_standard(), opts)
    # max c.x = -min(-c).x; the primal value lower-bounds min(-c).x
    return LmiSolution(lp.c0 - sol.primal_value, sol.y, sol)


def theta_lmi(adj, weights=None) -> LmiProblem:
    """Theta with the free entries of ``X`` as LMI variables.

    Variables are the diagonal entries ``X_vv`` for ``v >= 1`` (``X_00`` is
    eliminated by the trace constraint) and ``X_uv`` for non-adjacent pairs.
    Preferable to :func:`theta_sdp` for dense graphs.
    """
    adj = np.asarray(adj)
    m = adj.shape[0]
    w = np.ones(m) if weights is None else np.asarray(weights, dtype=float)
    if (w < 0).any():
        raise InvalidArgument("weights must be nonnegative")
    s = np.sqrt(w)
    F0 = sp.csr_matrix(([1.0], ([0], [0])), shape=(m, m))
    F, c = [], []
    for v in range(1, m):
        F.append(sp.csr_matrix(([1.0, -1.0], ([v, 0], [v, 0])), shape=(m, m)))
        c.append(w[v] - w[0])
    for u in range(m):
        for v in range(u + 1, m):
            if not adj[u, v]:
                F.append(sp.csr_matrix(([1.0, 1.0], ([u, v], [v, u])), shape=(m, m)))
                c.append(2 * s[u] * s[v])
    return LmiProblem(m, F0, F, np.array(c), float(w[0]))


@dataclass(frozen=True)
class ThetaResult:
    value: float
    status: Status
    gap: float
    iterations: int


def lovasz_theta(adj, weights=None, opts: SdpOptions | None = None) -> ThetaResult:
    """Weighted theta; zero-weight vertices are dropped and the cheaper of
    the two formulations is used."""
    adj = np.asarray(adj)
    m = adj.shape[0]
    w = np.ones(m) if weights is None else np.asarray(weights, dtype=float)
    if (w < 0).any():
        raise InvalidArgument("weights must be nonnegative")
    keep = np.flatnonzero(w > 0)
    if keep.size == 0:
        return ThetaResult(0.0, Status.OPTIMAL, 0.0, 0)
    adj = adj[np.ix_(keep, keep)]
    w = w[keep]
    m = keep.size
    n_edges = int(np.count_nonzero(np.triu(adj, 1)))
    if n_edges <= m * (m - 1) // 2 - n_edges + m - 1:
        sol = solve(theta_sdp(adj, w), opts)
        return ThetaResult(sol.dual_value, sol.status, sol.gap, sol.iterations)
    ls = solve_lmi(theta_lmi(adj, w), opts)
    return ThetaResult(ls.value, ls.status, ls.gap, ls.sdp.iterations)


# ---------------------------------------------------------------- text dump

def _coords(a: sp.csr_matrix):
    coo = sp.triu(a).tocoo()
    order = np.lexsort((coo.col, coo.row))
    return [(int(coo.row[k]), int(coo.col[k]), float(coo.data[k])) for k in order]


def dump_sdp(p: SdpProblem) -> str:
    """Coordinate text dump (upper triangle, 0-based)::

        sdp <dim> <constraints>
        objective <nnz>
        <i> <j> <value>
        constraint <k> <b> <nnz>
        <i> <j> <value>
    """
    lines = [f"sdp {p.dim} {p.n_constraints}"]
    ent = _coords(p.objective)
    lines.append(f"objective {len(ent)}")
    lines += [f"{i} {j} {v!r}" for i, j, v in ent]
    for k, (a, bk) in enumerate(p.constraints):
        ent = _coords(a)
        lines.append(f"constraint {k} {bk!r} {len(ent)}")
        lines += [f"{i} {j} {v!r}" for i, j, v in ent]
    return "\n".join(lines) + "\n"


def load_sdp(text: str) -> SdpProblem:
    tok = iter(text.split("\n"))

    def block(count, m):
        rows, cols, vals = [], [], []
        for _ in range(count):
            i, j, v = next(tok).split()
            i, j, v = int(i), int(j), float(v)
            rows.append(i)
            cols.append(j)
            vals.append(v)
            if i != j:
                rows.append(j)
                cols.append(i)
                vals.append(v)
        return sp.csr_matrix((vals, (rows, cols)), shape=(m, m))

    head = next(tok).split()
    if head[0] != "sdp":
        raise InvalidArgument("not an sdp dump")
    m, K = int(head[1]), int(head[2])
    obj = next(tok).split()
    p = SdpProblem(m, block(int(obj[1]), m))
    for _ in range(K):
        _, _, bk, cnt = next(tok).split()
        p.add(block(int(cnt), m), float(bk))
    return p
