"""Dense convex quadratic programming by a primal active-set method.

Solves  minimize 1/2 x'Hx  subject to  A_eq x = b_eq,  A_ineq x >= b_ineq
for small dense problems (tens of variables).  The working set changes by
one inequality per iteration, steps are computed in the null space of the
active constraints, and a prior solution's point and active set can be
reused to warm-start a sweep of related problems.

Linear solves are SVD-based (rank revealing); a reduced system whose
condition estimate exceeds the configured limit raises a distinct error
instead of returning garbage.  Zero-curvature feasible rays -- H singular
along a direction no constraint blocks -- raise an unbounded error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

FEAS_TOL = 1e-8
STATIONARITY_TOL = 1e-9
MULTIPLIER_TOL = 1e-9
DEFAULT_COND_LIMIT = 1e12


class QpError(Exception):
    """Base class for solver failures."""


class QpInfeasibleError(QpError):
    """No point satisfies the constraint system."""


class QpUnboundedError(QpError):
    """H is singular along a feasible ray that nothing blocks."""


class QpNearSingularError(QpError):
    """Reduced system condition estimate exceeds the configured limit."""


class QpIterationLimitError(QpError):
    """Active-set iterations exceeded the cap without converging."""


def _as_2d(a: NDArray | None, p: int) -> NDArray[np.float64]:
    if a is None:
        return np.zeros((0, p))
    arr = np.atleast_2d(np.asarray(a, dtype=float))
    if arr.shape[1] != p:
        raise ValueError(f"constraint matrix has {arr.shape[1]} columns, expected {p}")
    return arr


def _as_1d(b: NDArray | None, rows: int) -> NDArray[np.float64]:
    if b is None:
        return np.zeros(rows)
    arr = np.asarray(b, dtype=float).ravel()
    if arr.size != rows:
        raise ValueError(f"constraint rhs has {arr.size} entries, expected {rows}")
    return arr


@dataclass(frozen=True)
class QuadraticProgram:
    """Problem data: symmetric PSD H plus equality/inequality systems."""

    h: NDArray[np.float64]
    a_eq: NDArray[np.float64] | None = None
    b_eq: NDArray[np.float64] | None = None
    a_ineq: NDArray[np.float64] | None = None
    b_ineq: NDArray[np.float64] | None = None

    def __post_init__(self) -> None:
        h = np.asarray(self.h, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError("H must be square")
        scale = np.abs(h).max() if h.size else 0.0
        if scale > 0 and np.abs(h - h.T).max() > 1e-8 * scale:
            raise ValueError("H must be symmetric")
        h = (h + h.T) / 2.0
        eig_min = float(np.linalg.eigvalsh(h).min()) if h.size else 0.0
        if eig_min < -1e-8 * max(scale, 1.0):
            raise ValueError(f"H must be positive semidefinite (min eigenvalue {eig_min:g})")
        p = h.shape[0]
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "a_eq", _as_2d(self.a_eq, p))
        object.__setattr__(self, "b_eq", _as_1d(self.b_eq, self.a_eq.shape[0]))
        object.__setattr__(self, "a_ineq", _as_2d(self.a_ineq, p))
        object.__setattr__(self, "b_ineq", _as_1d(self.b_ineq, self.a_ineq.shape[0]))

    @property
    def dim(self) -> int:
        return self.h.shape[0]


@dataclass(frozen=True)
class QpSolution:
    x: NDArray[np.float64]
    active_set: tuple[int, ...]
    objective: float
    iterations: int
    eq_multipliers: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    ineq_multipliers: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    objective_trace: tuple[float, ...] = ()


def _null_basis(a: NDArray[np.float64]) -> NDArray[np.float64]:
    """Orthonormal null-space basis of a stacked constraint matrix."""
    p = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(p)
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    rank = int(np.sum(s > s[0] * 1e-12)) if s.size and s[0] > 0 else 0
    return vt[rank:].T


def _lstsq(a: NDArray[np.float64], b: NDArray[np.float64]) -> NDArray[np.float64]:
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    return sol


@dataclass
class _CoreResult:
    x: NDArray[np.float64]
    working: list[int]
    iterations: int
    eq_mult: NDArray[np.float64]
    ineq_mult: NDArray[np.float64]
    trace: list[float]


def _active_set_core(
    h: NDArray[np.float64],
    c: NDArray[np.float64],
    a_eq: NDArray[np.float64],
    a_ineq: NDArray[np.float64],
    b_ineq: NDArray[np.float64],
    x: NDArray[np.float64],
    working: list[int],
    max_iter: int,
    cond_limit: float,
) -> _CoreResult:
    """Primal active-set loop from a feasible point.

    ``working`` holds indices of inequalities treated as equalities; it
    gains the blocking constraint after a partial step and loses the
    most negative multiplier's constraint at a stationary point.  Ties
    break toward the lowest constraint index so runs are reproducible.
    """
    n_eq = a_eq.shape[0]

    def objective(v: NDArray[np.float64]) -> float:
        return float(0.5 * v @ h @ v + c @ v)

    trace = [objective(x)]
    for iteration in range(1, max_iter + 1):
        g = h @ x + c
        a_act = np.vstack([a_eq, a_ineq[working]]) if (n_eq or working) else np.zeros((0, x.size))
        z = _null_basis(a_act)
        g_scale = 1.0 + float(np.abs(g).max(initial=0.0))

        stationary = z.shape[1] == 0 or np.abs(z.T @ g).max(initial=0.0) <= STATIONARITY_TOL * g_scale
        if stationary:
            if a_act.shape[0]:
                lam = _lstsq(a_act.T, g)
            else:
                lam = np.zeros(0)
            mult_scale = 1.0 + float(np.abs(lam).max(initial=0.0))
            ineq_lam = lam[n_eq:]
            worst = int(np.argmin(ineq_lam)) if ineq_lam.size else -1
            if worst < 0 or ineq_lam[worst] >= -MULTIPLIER_TOL * mult_scale:
                eq_mult = lam[:n_eq]
                full_ineq = np.zeros(a_ineq.shape[0])
                for where, j in enumerate(working):
                    full_ineq[j] = lam[n_eq + where]
                return _CoreResult(x, working, iteration, eq_mult, full_ineq, trace)
            # ties on the most negative multiplier break to the lowest index
            drop_candidates = [
                working[k]
                for k in range(len(working))
                if ineq_lam[k] <= ineq_lam[worst] + MULTIPLIER_TOL * mult_scale
            ]
            working.remove(min(drop_candidates))
            continue

        p_step, ray_kind = _eqp_step(h, g, z, cond_limit, g_scale)
        if ray_kind == "flat":
            _, fwd_block = _ratio_test(a_ineq, b_ineq, working, x, p_step)
            _, back_block = _ratio_test(a_ineq, b_ineq, working, x, -p_step)
            if fwd_block is None or back_block is None:
                raise QpUnboundedError(
                    "H is singular along a feasible ray no constraint blocks; "
                    "the minimizer set is unbounded"
                )
            raise QpNearSingularError(
                "zero-curvature directions leave the reduced system singular "
                f"(condition estimate beyond {cond_limit:g})"
            )
        alpha_cap = np.inf if ray_kind == "descent" else 1.0
        alpha, blocking = _ratio_test(a_ineq, b_ineq, working, x, p_step)
        if ray_kind == "descent" and blocking is None:
            raise QpUnboundedError("objective decreases along an unblocked feasible ray")
        step = min(alpha_cap, alpha)
        x = x + step * p_step
        trace.append(objective(x))
        if blocking is not None and alpha <= alpha_cap:
            working.append(blocking)
            working.sort()
    raise QpIterationLimitError(f"no convergence in {max_iter} active-set iterations")


def _eqp_step(
    h: NDArray[np.float64],
    g: NDArray[np.float64],
    z: NDArray[np.float64],
    cond_limit: float,
    g_scale: float,
) -> tuple[NDArray[np.float64], str | None]:
    """Newton step in the reduced space, or a certified degenerate ray.

    Eigenvalues at rounding level (relative to the largest) count as zero
    curvature: such a direction comes back as a "descent" ray when the
    gradient moves along it, or a "flat" ray (minimizer not unique) when
    the gradient is orthogonal to it.  Otherwise a condition estimate
    beyond the limit raises rather than risking an unreliable solve.
    """
    hr = z.T @ h @ z
    hr = (hr + hr.T) / 2.0
    gr = z.T @ g
    mu, v = np.linalg.eigh(hr)
    mu_max = float(mu[-1])
    # Eigenvalues at rounding level are genuine zero curvature; between
    # that and the condition limit the system is too ill-conditioned to
    # solve but not certifiably singular.
    zero_cut = mu_max * 100.0 * np.finfo(float).eps
    degenerate = mu <= zero_cut
    if degenerate.any():
        slopes = v.T @ gr
        deg_slopes = np.where(degenerate, slopes, 0.0)
        k = int(np.argmax(np.abs(deg_slopes)))
        if abs(deg_slopes[k]) > 1e-10 * g_scale:
            return -np.sign(deg_slopes[k]) * (z @ v[:, k]), "descent"
        return z @ v[:, int(np.argmax(degenerate))], "flat"
    if mu_max > 0.0 and mu_max / float(mu[0]) > cond_limit:
        raise QpNearSingularError(
            f"reduced system condition estimate {mu_max / float(mu[0]):.3g} "
            f"exceeds the limit {cond_limit:g}"
        )
    step = -z @ (v @ ((v.T @ gr) / mu))
    return step, None


def _ratio_test(
    a_ineq: NDArray[np.float64],
    b_ineq: NDArray[np.float64],
    working: list[int],
    x: NDArray[np.float64],
    p_step: NDArray[np.float64],
) -> tuple[float, int | None]:
    """Largest feasible step along p_step and the first blocking row.

    Rows are scanned in index order and only a strict improvement (beyond
    rounding) replaces the incumbent, so ties break to the lowest index.
    """
    alpha = np.inf
    blocking: int | None = None
    if a_ineq.shape[0] == 0:
        return alpha, blocking
    in_working = np.zeros(a_ineq.shape[0], dtype=bool)
    in_working[working] = True
    direction = a_ineq @ p_step
    slack = a_ineq @ x - b_ineq
    dir_scale = 1.0 + float(np.abs(direction).max(initial=0.0))
    for j in range(a_ineq.shape[0]):
        if in_working[j] or direction[j] >= -1e-13 * dir_scale:
            continue
        cand = max(slack[j], 0.0) / (-direction[j])
        if cand < alpha * (1.0 - 1e-12):
            alpha = cand
            blocking = j
    return alpha, blocking


def _phase1(
    a_eq: NDArray[np.float64],
    b_eq: NDArray[np.float64],
    a_ineq: NDArray[np.float64],
    b_ineq: NDArray[np.float64],
    p: int,
    max_iter: int,
    cond_limit: float,
) -> NDArray[np.float64]:
    """Find a feasible point: least-norm equality solution, then repair
    inequality violations with the same active-set machinery on a
    slack-relaxed problem under an escalating exact penalty."""
    if a_eq.shape[0]:
        x0 = _lstsq(a_eq, b_eq)
        if np.abs(a_eq @ x0 - b_eq).max() > FEAS_TOL * (1.0 + np.abs(b_eq).max(initial=0.0)):
            raise QpInfeasibleError("equality system is inconsistent")
    else:
        x0 = np.zeros(p)
    if a_ineq.shape[0] == 0:
        return x0
    violation = float((b_ineq - a_ineq @ x0).max())
    if violation <= FEAS_TOL:
        return x0

    # Variables (x, s); constraints a_ineq x + s >= b_ineq and s >= 0.
    h1 = np.eye(p + 1)
    a_eq1 = np.hstack([a_eq, np.zeros((a_eq.shape[0], 1))])
    a_ineq1 = np.vstack(
        [
            np.hstack([a_ineq, np.ones((a_ineq.shape[0], 1))]),
            np.concatenate([np.zeros(p), [1.0]])[None, :],
        ]
    )
    b_ineq1 = np.concatenate([b_ineq, [0.0]])
    scale = 1.0 + float(np.linalg.norm(x0))
    penalty = 10.0 * scale
    for _ in range(4):
        c1 = np.concatenate([-x0, [penalty]])
        z0 = np.concatenate([x0, [violation * 1.01 + FEAS_TOL]])
        result = _active_set_core(
            h1, c1, a_eq1, a_ineq1, b_ineq1, z0, [], max_iter, cond_limit
        )
        s_star = float(result.x[-1])
        if s_star <= FEAS_TOL:
            return result.x[:p]
        penalty *= 1e3
    raise QpInfeasibleError("inequality system is infeasible (phase 1 slack stayed positive)")


def solve_qp(
    qp: QuadraticProgram,
    *,
    x0: NDArray[np.float64] | None = None,
    active_set: tuple[int, ...] | None = None,
    max_iter: int | None = None,
    cond_limit: float = DEFAULT_COND_LIMIT,
) -> QpSolution:
    """Solve the program; optionally warm-start from a prior solution.

    A warm start is used only if the provided point is feasible for this
    problem's constraints; otherwise phase 1 runs from scratch.  The
    iteration cap defaults to 50 per variable.
    """
    p = qp.dim
    cap = max_iter if max_iter is not None else max(50 * p, 50)

    start: NDArray[np.float64] | None = None
    if x0 is not None:
        cand = np.asarray(x0, dtype=float)
        eq_ok = (
            qp.a_eq.shape[0] == 0
            or np.abs(qp.a_eq @ cand - qp.b_eq).max() <= FEAS_TOL * (1.0 + np.abs(qp.b_eq).max(initial=0.0))
        )
        ineq_ok = qp.a_ineq.shape[0] == 0 or float((qp.a_ineq @ cand - qp.b_ineq).min()) >= -FEAS_TOL
        if eq_ok and ineq_ok:
            start = cand
    if start is None:
        start = _phase1(qp.a_eq, qp.b_eq, qp.a_ineq, qp.b_ineq, p, cap, cond_limit)

    working: list[int] = []
    if qp.a_ineq.shape[0]:
        slack = qp.a_ineq @ start - qp.b_ineq
        near = np.abs(slack) <= FEAS_TOL * (1.0 + np.abs(qp.b_ineq))
        if active_set is not None:
            working = sorted(j for j in active_set if 0 <= j < qp.a_ineq.shape[0] and near[j])
        else:
            working = sorted(np.nonzero(near)[0].tolist())

    result = _active_set_core(
        qp.h, np.zeros(p), qp.a_eq, qp.a_ineq, qp.b_ineq, start, working, cap, cond_limit
    )
    return QpSolution(
        x=result.x,
        active_set=tuple(result.working),
        objective=float(0.5 * result.x @ qp.h @ result.x),
        iterations=result.iterations,
        eq_multipliers=result.eq_mult,
        ineq_multipliers=result.ineq_mult,
        objective_trace=tuple(result.trace),
    )
