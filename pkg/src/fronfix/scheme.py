"""Front-fixing Crank-Nicolson time stepper with fractional memory.

Interior scheme. With q the time-normalization weight (dtau*alpha/(e^x - 1),
x = alpha*dtau/(1-alpha), for fractional order; dtau in the classical mode)
the per-step coefficients are

    A = q*(sigma^2/(4 dy^2) + (r - sigma^2/2)/(4 dy) + dX/(4 dy dtau xf)),
    C = q*(sigma^2/(4 dy^2) - (r - sigma^2/2)/(4 dy) - dX/(4 dy dtau xf)),
    B = -(q/2)*(sigma^2/dy^2 + r),        dX = xf_next - xf_curr,

and the row for the unknown level u couples the Crank-Nicolson average of the
spatial operator at levels n and n+1 to the exponential-memory time difference.
The memory sum is attached to the new level, so its leading term rho*(u - v)
is implicit; dividing the row by rho gives a single code path whose alpha -> 1
limit is the classical Crank-Nicolson scheme:

    A' u[m+1] + (B' - 1) u[m] + C' u[m-1]
        = S[m] - v[m] - (A' v[m+1] + B' v[m] + C' v[m-1]),

where the primed coefficients use the effective weight
q_eff = dtau*alpha/(1 - rho) (classical: dtau) and S is the accumulated
weighted-increment history (zero in classical mode).

Boundary closure. The boundary system is value matching v(0) = 1 - X_f,
smooth pasting v_y(0) = -X_f eliminating the ghost node at the new level, and
the boundary relation (sigma^2/2) v_yy(0) + (sigma^2/2) X_f - r = 0, giving

    v[1] = 1 - (1 + dy) X_f + (dy^2/sigma^2) (r - (sigma^2/2) X_f).

Eliminating v[1] between this closure and the m = 1 scheme row yields the
scalar update X_f^{n+1} = Omega1/Omega2 used by the inner iteration; the
denominator is guarded because it can degenerate.

Each time step solves the nonlinear pair (interior tridiagonal solve,
free-boundary scalar root) by a safeguarded secant iteration on the pole-free
residual R(x) = Omega1(x) - x*Omega2(x), with a bisection fallback once a sign
change is bracketed. Failures surface as typed errors carrying the step index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cfkernel import (
    CFWeights,
    ClassicalStep,
    HistoryAccumulator,
    StepWeights,
    cf_weights,
    empty_history,
    history_push,
)
from .errors import (
    DenominatorNearZeroError,
    NonConvergenceError,
    ValidationError,
)
from .model import (
    GridSpec,
    ModelParams,
    SolutionSurface,
    build_grid,
    ensure_valid_params,
)
from .tridiag import TridiagonalSystem, solve_tridiagonal

__all__ = [
    "SchemeCoefficients",
    "StepState",
    "StepStats",
    "FixedPointOptions",
    "SolverRun",
    "coefficients",
    "assemble_step",
    "boundary_node_update",
    "free_boundary_update",
    "initial_state",
    "time_step",
    "run_solver",
    "price_at",
]

_DENOM_FLOOR = 1e-12
_DENOM_WARN = 1e-6


@dataclass(frozen=True)
class SchemeCoefficients:
    """Tridiagonal operator triple at one step; upper/diag/lower multiply
    v[m+1], v[m], v[m-1]."""

    upper: float
    diag: float
    lower: float


@dataclass(frozen=True)
class FixedPointOptions:
    tol_xf: float = 1e-10
    max_iter: int = 50
    damping: float = 1.0


@dataclass(frozen=True)
class StepStats:
    iterations: int
    closure_residual: float
    denominator_warning: bool
    min_abs_denominator: float


@dataclass(frozen=True)
class StepState:
    """Solver state at time level n."""

    v_curr: np.ndarray
    xf_curr: float
    acc: HistoryAccumulator
    xf_acc: HistoryAccumulator
    n: int
    stats: StepStats | None = None

    def __post_init__(self):
        v = np.asarray(self.v_curr, dtype=float)
        if v[0] != 1.0 - self.xf_curr:
            raise ValidationError(["state must satisfy v[0] = 1 - xf"])
        if v[-1] != 0.0:
            raise ValidationError(["state must satisfy v[M] = 0"])
        v.setflags(write=False)
        object.__setattr__(self, "v_curr", v)


def _time_weight(p: ModelParams, g: GridSpec) -> float:
    """Kernel time weight q for the coefficient triple (classical mode: dtau)."""
    if p.classical:
        return g.dtau
    expo = p.alpha * g.dtau / (1.0 - p.alpha)
    return g.dtau * p.alpha / math.expm1(expo)


def _effective_weight(p: ModelParams, g: GridSpec) -> float:
    """Row normalization q_eff = q/rho; equals dtau in classical mode."""
    if p.classical:
        return g.dtau
    expo = p.alpha * g.dtau / (1.0 - p.alpha)
    return g.dtau * p.alpha / (-math.expm1(-expo))


def coefficients(
    p: ModelParams, g: GridSpec, xf_next: float, xf_curr: float
) -> SchemeCoefficients:
    """Per-step operator triple (A, B, C) for the boundary pair (xf_next, xf_curr)."""
    if xf_curr == 0.0:
        raise ValidationError(["xf_curr must be nonzero"])
    q = _time_weight(p, g)
    sig2 = p.sigma * p.sigma
    theta = q * sig2 / (4.0 * g.dy * g.dy)
    beta = q * (p.r - sig2 / 2.0) / (4.0 * g.dy)
    drift = q * (xf_next - xf_curr) / (4.0 * g.dy * g.dtau * xf_curr)
    return SchemeCoefficients(
        upper=theta + beta + drift,
        diag=-(q / 2.0) * (sig2 / (g.dy * g.dy) + p.r),
        lower=theta - beta - drift,
    )


def assemble_step(
    state: StepState,
    coeffs: SchemeCoefficients,
    w: StepWeights,
    v0_next: float,
) -> TridiagonalSystem:
    """Interior rows m = 1..M-1 for the unknown level, boundary values moved
    to the right-hand side (v[0] = v0_next, v[M] = 0)."""
    v = state.v_curr
    m_count = v.size - 2
    if m_count < 1:
        raise ValidationError(["grid must have interior nodes"])
    if isinstance(w, CFWeights):
        eta = 1.0 / w.decay
        hist = state.acc.sums[1:-1]
    else:
        eta = 1.0
        hist = 0.0
    a = eta * coeffs.upper
    b = eta * coeffs.diag
    c = eta * coeffs.lower
    rhs = hist - v[1:-1] - (a * v[2:] + b * v[1:-1] + c * v[:-2])
    rhs = np.asarray(rhs, dtype=float).copy()
    rhs[0] -= c * v0_next
    return TridiagonalSystem(
        sub=np.full(m_count - 1, c),
        diag=np.full(m_count, b - 1.0),
        super=np.full(m_count - 1, a),
        rhs=rhs,
    )


def _closure_line(p: ModelParams, g: GridSpec) -> tuple[float, float]:
    """Boundary closure v[1] = g0 + g1*xf_next."""
    sig2 = p.sigma * p.sigma
    g1 = -(1.0 + g.dy) - g.dy * g.dy / 2.0
    g0 = 1.0 + (g.dy * g.dy / sig2) * p.r
    return g0, g1


def boundary_node_update(
    state: StepState,
    xf_next: float,
    p: ModelParams,
    g: GridSpec,
    w: StepWeights,
) -> float:
    """Boundary-adjacent value v[1] at the new level for a candidate boundary.

    The closure is memoryless, so state and w do not enter; the signature
    stays uniform with the other per-step operations.
    """
    g0, g1 = _closure_line(p, g)
    return g0 + g1 * xf_next


def _omega_parts(
    state: StepState,
    v_next_iterate: np.ndarray,
    p: ModelParams,
    g: GridSpec,
    w: StepWeights,
) -> tuple[float, float, float]:
    """Numerator, denominator, and denominator scale of the boundary update."""
    u = np.asarray(v_next_iterate, dtype=float)
    if u.size != state.v_curr.size:
        raise ValidationError(["iterate length must match the grid"])
    v = state.v_curr
    qe = _effective_weight(p, g)
    sig2 = p.sigma * p.sigma
    theta = qe * sig2 / (4.0 * g.dy * g.dy)
    beta = qe * (p.r - sig2 / 2.0) / (4.0 * g.dy)
    omega = qe / (4.0 * g.dy * g.dtau * state.xf_curr)
    b_diag = -(qe / 2.0) * (sig2 / (g.dy * g.dy) + p.r)
    g0, g1 = _closure_line(p, g)

    up_pair = u[2] + v[2]
    low_pair = u[0] + v[0]
    diff = up_pair - low_pair
    total = up_pair + low_pair
    hist1 = state.acc.sums[1] if isinstance(w, CFWeights) else 0.0

    omega2 = omega * diff + (b_diag - 1.0) * g1
    omega1 = (
        hist1
        - theta * total
        - beta * diff
        + omega * state.xf_curr * diff
        - (b_diag - 1.0) * g0
        - (b_diag + 1.0) * v[1]
    )
    scale = max(1.0, abs(omega * diff), abs((b_diag - 1.0) * g1))
    return omega1, omega2, scale


def free_boundary_update(
    state: StepState,
    v_next_iterate: np.ndarray,
    p: ModelParams,
    g: GridSpec,
    w: StepWeights,
) -> float:
    """Candidate boundary position from the current iterate's node values.

    v_next_iterate is the full candidate level (node 0 holding 1 - xf of the
    iterate); only nodes 0 and 2 enter the update. Raises
    DenominatorNearZeroError when the update degenerates.
    """
    omega1, omega2, scale = _omega_parts(state, v_next_iterate, p, g, w)
    if abs(omega2) < _DENOM_FLOOR * scale:
        raise DenominatorNearZeroError(state.n, omega2, scale)
    return omega1 / omega2


def initial_state(p: ModelParams, g: GridSpec, w: StepWeights) -> StepState:
    """All-zero value field with the boundary at the strike."""
    return StepState(
        v_curr=np.zeros(g.M + 1),
        xf_curr=1.0,
        acc=empty_history(g.M + 1, w),
        xf_acc=empty_history(1, w),
        n=0,
    )


def _solve_candidate(
    state: StepState,
    p: ModelParams,
    g: GridSpec,
    w: StepWeights,
    x: float,
) -> np.ndarray:
    coeffs = coefficients(p, g, x, state.xf_curr)
    sys = assemble_step(state, coeffs, w, v0_next=1.0 - x)
    interior = solve_tridiagonal(sys)
    u = np.empty(g.M + 1)
    u[0] = 1.0 - x
    u[1:-1] = interior
    u[-1] = 0.0
    return u


def time_step(
    state: StepState,
    p: ModelParams,
    g: GridSpec,
    w: StepWeights,
    opts: FixedPointOptions | None = None,
) -> StepState:
    """Advance one level: solve the coupled interior/boundary system.

    The scalar iterate starts at the current boundary, takes one plain
    fixed-point step, then secant steps on R(x) = Omega1 - x*Omega2 with a
    bisection safeguard once a sign change is bracketed.
    """
    opts = opts or FixedPointOptions()
    x = state.xf_curr
    x_prev: float | None = None
    r_prev = 0.0
    lo: float | None = None
    hi: float | None = None
    warned = False
    min_abs_den = math.inf
    xf_next: float | None = None
    iterations = 0

    for k in range(opts.max_iter):
        u = _solve_candidate(state, p, g, w, x)
        omega1, omega2, scale = _omega_parts(state, u, p, g, w)
        if abs(omega2) < _DENOM_FLOOR * scale:
            raise DenominatorNearZeroError(state.n, omega2, scale)
        if abs(omega2) < _DENOM_WARN * scale:
            warned = True
        min_abs_den = min(min_abs_den, abs(omega2))
        proposal = omega1 / omega2
        residual = omega1 - x * omega2
        iterations = k + 1
        if abs(proposal - x) <= opts.tol_xf:
            xf_next = proposal
            break
        if residual > 0.0:
            lo = x
        else:
            hi = x
        if x_prev is not None and residual != r_prev:
            x_new = x - residual * (x - x_prev) / (residual - r_prev)
        else:
            x_new = x + opts.damping * (proposal - x)
        if lo is not None and hi is not None:
            a, b = (lo, hi) if lo < hi else (hi, lo)
            if not a < x_new < b:
                x_new = 0.5 * (a + b)
        x_prev, r_prev = x, residual
        x = x_new
    if xf_next is None:
        raise NonConvergenceError(
            state.n, opts.max_iter, (x_prev if x_prev is not None else x, x)
        )

    u = _solve_candidate(state, p, g, w, xf_next)
    closure = boundary_node_update(state, xf_next, p, g, w)
    stats = StepStats(
        iterations=iterations,
        closure_residual=abs(u[1] - closure),
        denominator_warning=warned,
        min_abs_denominator=min_abs_den,
    )
    return StepState(
        v_curr=u,
        xf_curr=xf_next,
        acc=history_push(state.acc, u, state.v_curr),
        xf_acc=history_push(
            state.xf_acc, np.array([xf_next]), np.array([state.xf_curr])
        ),
        n=state.n + 1,
        stats=stats,
    )


@dataclass(frozen=True)
class SolverRun:
    """Completed time march with per-step diagnostics."""

    surface: SolutionSurface
    params: ModelParams
    grid: GridSpec
    iterations: tuple[int, ...]
    closure_residuals: tuple[float, ...]
    denominator_warnings: tuple[int, ...] = field(default=())

    @property
    def achieved_horizon(self) -> float:
        return self.grid.N * self.grid.dtau

    @property
    def max_inner_iterations(self) -> int:
        return max(self.iterations) if self.iterations else 0


def run_solver(
    p: ModelParams,
    M: int,
    mu: float,
    Y: float | None = None,
    opts: FixedPointOptions | None = None,
) -> SolverRun:
    """March the scheme over the whole horizon and collect the surface.

    Step-level failures propagate as typed errors carrying the step index.
    """
    ensure_valid_params(p)
    g = build_grid(p, M, mu, Y)
    w = cf_weights(p.alpha, g.dtau)
    state = initial_state(p, g, w)
    v_levels = [state.v_curr.copy()]
    xf_path = [state.xf_curr]
    iterations: list[int] = []
    residuals: list[float] = []
    warned_steps: list[int] = []
    for _ in range(g.N):
        state = time_step(state, p, g, w, opts)
        assert state.stats is not None
        v_levels.append(state.v_curr.copy())
        xf_path.append(state.xf_curr)
        iterations.append(state.stats.iterations)
        residuals.append(state.stats.closure_residual)
        if state.stats.denominator_warning:
            warned_steps.append(state.n - 1)
    surface = SolutionSurface(v=np.array(v_levels), xf=np.array(xf_path))
    return SolverRun(
        surface=surface,
        params=p,
        grid=g,
        iterations=tuple(iterations),
        closure_residuals=tuple(residuals),
        denominator_warnings=tuple(warned_steps),
    )


def price_at(run: SolverRun, S: float) -> float:
    """Option price at spot S from the final level.

    Linear interpolation in y within the grid; below the exercise boundary
    the price is the intrinsic value E - S; beyond the truncation bound the
    far-field value 0 is used.
    """
    if S <= 0:
        raise ValidationError(["S must be positive"])
    E = run.params.E
    xf_final = run.surface.xf[-1]
    boundary_price = E * xf_final
    if xf_final <= 0:
        raise ValidationError(["final boundary is nonpositive; price undefined"])
    if S <= boundary_price:
        return E - S
    y = math.log(S / boundary_price)
    g = run.grid
    if y >= g.Y:
        return 0.0
    idx = int(y // g.dy)
    idx = min(idx, g.M - 1)
    frac = (y - idx * g.dy) / g.dy
    v_last = run.surface.v[-1]
    return E * ((1.0 - frac) * v_last[idx] + frac * v_last[idx + 1])
