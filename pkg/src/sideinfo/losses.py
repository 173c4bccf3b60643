"""Loss functions, Bayes-risk minimization, and proper scoring rules.

Three loss shapes are supported:

* ActionMatrixLoss: a finite reconstruction alphabet, given as an n x k
  matrix of (possibly +inf) per-action losses.  Bayes risk is an exact
  column minimum.
* ScoringRuleLoss: simplex-valued actions, ell(x, Q).  Rules flagged
  `proper` are minimized by reporting Q = P, so their Bayes risk is an
  exact evaluation; unflagged rules fall back to a seeded numeric search
  over the simplex (approximate, with a reported optimality gap).
* SavageRuleLoss: a proper rule built from a convex oracle G via
  supporting hyperplanes; its negative Bayes envelope is G itself.

Built-ins: log, zero_one, brier, spherical, absolute_ordered.  All symbols
are 0-based here; 1-based indexing lives only at the file/CLI boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.optimize import minimize

from .errors import NotProper, ParameterOutOfRange, UnboundedBelow, UnknownLoss
from .prob import ConvexOracle, Dist, _as_probs, point_mass

BUILTIN_LOSSES = ("log", "zero_one", "brier", "spherical", "absolute_ordered")

# Losses whose value at the honest report exceeds this are treated as infinite.
HUGE = 1e17


@dataclass(frozen=True)
class ActionMatrixLoss:
    """Loss over a finite action alphabet: matrix[x, a] = ell(x, action a)."""

    matrix: np.ndarray
    name: Optional[str] = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        m.setflags(write=False)
        if m.ndim != 2:
            raise ParameterOutOfRange("action matrix must be 2-d")
        if np.any(np.isnan(m)) or np.any(m == -np.inf):
            raise ParameterOutOfRange("action matrix entries must be > -inf and not NaN")
        if not np.all(np.isfinite(m).any(axis=0)):
            raise ParameterOutOfRange("every action needs at least one finite entry")
        if not np.all(np.isfinite(m).any(axis=1)):
            raise UnboundedBelow("some outcome has no finite action (violates finiteness)")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def k(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class ScoringRuleLoss:
    """Loss over simplex-valued actions: eval_fn(x, Q) -> extended real."""

    eval_fn: Callable[[int, np.ndarray], float]
    n: int
    proper: bool = False
    name: Optional[str] = None
    vector_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def loss_vector(self, q: np.ndarray) -> np.ndarray:
        """ell(x, q) for every outcome x."""
        if self.vector_fn is not None:
            return np.asarray(self.vector_fn(q), dtype=float)
        return np.array([float(self.eval_fn(x, q)) for x in range(len(q))], dtype=float)


@dataclass(frozen=True)
class SavageRuleLoss:
    """Proper scoring rule built from a convex oracle via savage_from_G."""

    g: ConvexOracle
    n: Optional[int] = None

    def loss_vector(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        sub = np.asarray(self.g.subgradient(q), dtype=float)
        mask = q != 0.0
        pairing = float((sub[mask] * q[mask]).sum())  # 0 * LOG_ZERO = 0
        return pairing - self.g.value(q) - sub

    def eval(self, x: int, q: np.ndarray) -> float:
        return float(self.loss_vector(q)[x])


LossSpec = Union[ActionMatrixLoss, ScoringRuleLoss, SavageRuleLoss]


@dataclass(frozen=True)
class BayesResult:
    """Outcome of Bayes-risk minimization.

    `minimizer` is an action index for matrix losses and a Dist for
    simplex-action rules.  `grid_gap` reports search-minus-grid slack for
    the numeric tier (None when the exact tiers apply).
    """

    risk: float
    minimizer: object
    method: str  # "column-min" | "proper-fixed-point" | "numeric-search"
    grid_gap: Optional[float] = None


def loss_alphabet_size(l: LossSpec) -> Optional[int]:
    if isinstance(l, ActionMatrixLoss):
        return l.n
    return l.n


def builtin_loss(name: str, n: int) -> LossSpec:
    """Instantiate a built-in loss for an n-symbol alphabet."""
    if n < 2:
        raise ParameterOutOfRange(f"alphabet size must be >= 2, got {n}")
    key = name.replace("-", "_").lower()
    if key == "log":
        def ev(x, q):
            q = _as_probs(q)
            return float(-np.log(q[x])) if q[x] > 0 else np.inf

        def vec(q):
            q = _as_probs(q)
            out = np.full(q.shape, np.inf)
            m = q > 0
            out[m] = -np.log(q[m])
            return out

        return ScoringRuleLoss(eval_fn=ev, n=n, proper=True, name="log", vector_fn=vec)
    if key == "zero_one":
        return ActionMatrixLoss(matrix=1.0 - np.eye(n), name="zero_one")
    if key == "brier":
        def ev(x, q):
            q = _as_probs(q)
            e = -q.copy()
            e[x] += 1.0
            return float((e * e).sum())

        def vec(q):
            q = _as_probs(q)
            base = float((q * q).sum())
            return base - 2.0 * q + 1.0

        return ScoringRuleLoss(eval_fn=ev, n=n, proper=True, name="brier", vector_fn=vec)
    if key == "spherical":
        def ev(x, q):
            q = _as_probs(q)
            return float(-q[x] / np.linalg.norm(q))

        def vec(q):
            q = _as_probs(q)
            return -q / np.linalg.norm(q)

        return ScoringRuleLoss(eval_fn=ev, n=n, proper=True, name="spherical", vector_fn=vec)
    if key == "absolute_ordered":
        idx = np.arange(n)
        return ActionMatrixLoss(
            matrix=np.abs(idx[:, None] - idx[None, :]).astype(float),
            name="absolute_ordered",
        )
    raise UnknownLoss(f"unknown built-in loss {name!r}")


def reinstantiate(l: LossSpec, n: int) -> Optional[LossSpec]:
    """The same named loss family at a different alphabet size, if known."""
    name = getattr(l, "name", None)
    if name in BUILTIN_LOSSES:
        return builtin_loss(name, n) if n >= 2 else None
    return None


def _expected_scoring_loss(l, p: np.ndarray, q: np.ndarray) -> float:
    """E_P[ell(X, q)] with the 0 * inf = 0 convention."""
    vec = l.loss_vector(q)
    m = p > 0
    if np.any(np.isinf(vec[m]) | (vec[m] >= HUGE)):
        return np.inf
    return float((p[m] * vec[m]).sum())


def _matrix_column_values(matrix: np.ndarray, p: np.ndarray) -> np.ndarray:
    # per-column dot products, so results match a brute-force scan bit for bit
    vals = np.empty(matrix.shape[1])
    for a in range(matrix.shape[1]):
        col = matrix[:, a]
        finite = np.isfinite(col)
        if np.all(finite):
            vals[a] = np.dot(p, col)
        elif np.any(~finite & (p > 0)):
            vals[a] = np.inf
        else:
            vals[a] = np.dot(p[finite], col[finite])  # 0 * inf = 0 convention
    return vals


def _simplex_project(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the unit simplex."""
    n = v.shape[0]
    u = np.sort(v)[::-1]
    css = (np.cumsum(u) - 1.0) / np.arange(1, n + 1)
    k = np.nonzero(u > css)[0][-1]
    return np.maximum(v - css[k], 0.0)


def simplex_grid(n: int, steps: int) -> np.ndarray:
    """All points of the simplex lattice {c/steps : c in Z^n_{>=0}, sum c = steps}."""
    if n == 1:
        return np.ones((1, 1))
    pts = []

    def rec(prefix, remaining, axes_left):
        if axes_left == 1:
            pts.append(prefix + [remaining])
            return
        for c in range(remaining + 1):
            rec(prefix + [c], remaining - c, axes_left - 1)

    rec([], steps, n)
    return np.array(pts, dtype=float) / steps


def _numeric_bayes(l: ScoringRuleLoss, p: np.ndarray, seed: int, grid_check: bool) -> BayesResult:
    n = p.shape[0]
    rng = np.random.default_rng(seed)

    def f(q):
        return _expected_scoring_loss(l, p, q)

    # multi-start projected (numeric) gradient descent
    starts = [p.copy(), np.full(n, 1.0 / n)]
    while len(starts) < 16:
        starts.append(rng.dirichlet(np.ones(n)))
    best_q, best_v = None, np.inf
    h = 1e-6
    for q0 in starts:
        q = q0.copy()
        val = f(q)
        lr = 0.25
        for it in range(120):
            grad = np.zeros(n)
            for i in range(n):
                e = np.zeros(n)
                e[i] = h
                grad[i] = (f(_simplex_project(q + e)) - f(_simplex_project(q - e))) / (2 * h)
            if not np.all(np.isfinite(grad)):
                break
            q_new = _simplex_project(q - lr * grad)
            v_new = f(q_new)
            if v_new <= val:
                q, val = q_new, v_new
            else:
                lr *= 0.5
                if lr < 1e-8:
                    break
        if val < best_v:
            best_q, best_v = q, val

    # Nelder-Mead refinement through the projection
    res = minimize(
        lambda z: f(_simplex_project(z)),
        best_q,
        method="Nelder-Mead",
        options={"maxiter": 400 * n, "xatol": 1e-10, "fatol": 1e-12},
    )
    if np.isfinite(res.fun) and res.fun < best_v:
        best_q, best_v = _simplex_project(res.x), float(res.fun)

    gap = None
    if grid_check and n <= 4:
        grid = simplex_grid(n, 200)
        gvals = np.array([f(q) for q in grid])
        gi = int(np.argmin(gvals))
        gap = best_v - float(gvals[gi])
        if gvals[gi] < best_v:
            best_q, best_v = grid[gi], float(gvals[gi])
    if not np.isfinite(best_v):
        raise UnboundedBelow("numeric search found no finite expected loss")
    return BayesResult(risk=best_v, minimizer=Dist(best_q), method="numeric-search", grid_gap=gap)


def bayes_risk(l: LossSpec, p, seed: int = 0, grid_check: bool = True) -> BayesResult:
    """Minimal expected loss against distribution p, with its minimizer.

    Exact for action matrices (column minimum, ties to the lowest index) and
    for proper rules (evaluate at Q = P); approximate multi-start search for
    arbitrary scoring rules.
    """
    pv = _as_probs(p)
    if isinstance(l, ActionMatrixLoss):
        if pv.shape[0] != l.n:
            raise ParameterOutOfRange(
                f"distribution has {pv.shape[0]} symbols but loss expects {l.n}"
            )
        vals = _matrix_column_values(l.matrix, pv)
        a = int(np.argmin(vals))  # argmin takes the lowest index on ties
        risk = float(vals[a])
        if not np.isfinite(risk):
            raise UnboundedBelow("no action has finite expected loss under p")
        return BayesResult(risk=risk, minimizer=a, method="column-min")
    if isinstance(l, SavageRuleLoss) or (isinstance(l, ScoringRuleLoss) and l.proper):
        risk = _expected_scoring_loss(l, pv, pv)
        if not np.isfinite(risk):
            raise UnboundedBelow("expected loss at the honest report is not finite")
        return BayesResult(risk=risk, minimizer=Dist(pv), method="proper-fixed-point")
    return _numeric_bayes(l, pv, seed=seed, grid_check=grid_check)


def v_envelope(l: LossSpec, p, seed: int = 0) -> float:
    """Negative Bayes envelope V(P) = -inf_a E_P[ell(X, a)]; convex and bounded."""
    return -bayes_risk(l, p, seed=seed).risk


def savage_from_G(g: ConvexOracle, n: Optional[int] = None) -> SavageRuleLoss:
    """Proper scoring rule ell(x, Q) = <G'(Q), Q> - G(Q) - G'_x(Q).

    For any P the expected loss is minimized at Q = P with value -G(P), so
    the negative Bayes envelope of the returned rule is G itself.
    """
    return SavageRuleLoss(g=g, n=n)


@dataclass(frozen=True)
class ProprietyReport:
    trials: int
    worst_margin: float
    worst_p: np.ndarray
    worst_q: np.ndarray


def audit_propriety(
    l: LossSpec,
    trials: int = 100,
    seed: int = 0,
    tol: float = 1e-9,
    n: Optional[int] = None,
) -> ProprietyReport:
    """Check E_P[ell(X,P)] <= E_P[ell(X,Q)] + tol on random P against random and grid Q.

    Returns the worst (most negative) margin seen; raises NotProper with the
    offending (P, Q) witness if any dishonest report strictly wins.
    """
    if isinstance(l, ActionMatrixLoss):
        raise ParameterOutOfRange("propriety is defined for simplex-action rules")
    size = n or l.n
    if size is None:
        raise ParameterOutOfRange("alphabet size unknown; pass n=")
    rng = np.random.default_rng(seed)
    fixed: list[np.ndarray] = [np.full(size, 1.0 / size)]
    fixed.extend(point_mass(i, size).probs for i in range(size))
    if size <= 3:
        fixed.extend(simplex_grid(size, 20))
    worst = np.inf
    worst_p = worst_q = None
    for _ in range(trials):
        p = rng.dirichlet(np.ones(size))
        honest = _expected_scoring_loss(l, p, p)
        candidates = [rng.dirichlet(np.ones(size)) for _ in range(8)] + fixed
        for q in candidates:
            other = _expected_scoring_loss(l, p, q)
            margin = other - honest
            if margin < worst:
                worst, worst_p, worst_q = margin, p, q
            if margin < -tol:
                raise NotProper(p=p, q=q, margin=margin)
    return ProprietyReport(trials=trials, worst_margin=float(worst), worst_p=worst_p, worst_q=worst_q)
