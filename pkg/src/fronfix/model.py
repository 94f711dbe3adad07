"""Market model, computational grid, and the front-fixing change of variables.

The solver works on the dimensionless system obtained from the Black-Scholes
problem for an American put by the Landau-style substitution

    y = ln(X / X*(tau)),    X_f(tau) = X*(tau) / E,    v(y, tau) = V(X, tau) / E,

which maps the moving early-exercise boundary X*(tau) onto the fixed line
y = 0. Time is measured as tau = T - t (time to maturity), marching forward
from tau = 0 where v == 0 and X_f == 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError

__all__ = [
    "ModelParams",
    "GridSpec",
    "SolutionSurface",
    "ValidationReport",
    "validate_params",
    "ensure_valid_params",
    "build_grid",
    "to_fixed_domain",
    "from_fixed_domain",
]


@dataclass(frozen=True)
class ModelParams:
    """Market and contract inputs.

    r      risk-free rate per year (>= 0)
    sigma  volatility per sqrt-year (> 0)
    E      strike price (> 0)
    T      expiry in years (> 0)
    alpha  fractional order in (0, 1]; alpha = 1 selects the classical
           time difference
    """

    r: float
    sigma: float
    E: float
    T: float
    alpha: float = 1.0

    @property
    def classical(self) -> bool:
        return self.alpha == 1.0


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations


def validate_params(p: ModelParams) -> ValidationReport:
    """Report every violated parameter invariant; empty report means valid."""
    bad: list[str] = []
    for name in ("r", "sigma", "E", "T", "alpha"):
        if not math.isfinite(getattr(p, name)):
            bad.append(f"{name} must be finite")
    if math.isfinite(p.sigma) and p.sigma <= 0:
        bad.append("sigma must be positive")
    if math.isfinite(p.E) and p.E <= 0:
        bad.append("E must be positive")
    if math.isfinite(p.T) and p.T <= 0:
        bad.append("T must be positive")
    if math.isfinite(p.r) and p.r < 0:
        bad.append("r must be nonnegative")
    if math.isfinite(p.alpha) and not 0.0 < p.alpha <= 1.0:
        bad.append("alpha must lie in (0,1]")
    return ValidationReport(tuple(bad))


def ensure_valid_params(p: ModelParams) -> None:
    report = validate_params(p)
    if not report.valid:
        raise ValidationError(list(report.violations))


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on [0, Y] x [0, N*dtau].

    The time step is slaved to the space step through the grid ratio:
    dy = Y/M, dtau = mu*dy^2, N = ceil(T/dtau). The last level may overshoot
    T by less than dtau; N*dtau is the achieved horizon.
    """

    Y: float
    M: int
    mu: float
    dy: float
    dtau: float
    N: int

    @property
    def y_nodes(self) -> np.ndarray:
        return self.dy * np.arange(self.M + 1)

    @property
    def tau_levels(self) -> np.ndarray:
        return self.dtau * np.arange(self.N + 1)


def _guarded_ceil(x: float) -> int:
    # bare ceil() bumps exact divisions by one step due to binary rounding
    n = math.ceil(x)
    if n - 1 >= x * (1.0 - 1e-9):
        n -= 1
    return max(n, 1)


def build_grid(p: ModelParams, M: int, mu: float, Y: float | None = None) -> GridSpec:
    """Construct the grid; Y defaults to the customary truncation 4*E."""
    ensure_valid_params(p)
    if Y is None:
        Y = 4.0 * p.E
    bad: list[str] = []
    if not isinstance(M, (int, np.integer)) or M < 4:
        bad.append("M must be an integer >= 4")
    if not (math.isfinite(mu) and mu > 0):
        bad.append("mu must be positive")
    if not (math.isfinite(Y) and Y > 0):
        bad.append("Y must be positive")
    if bad:
        raise ValidationError(bad)
    dy = Y / M
    dtau = mu * dy * dy
    N = _guarded_ceil(p.T / dtau)
    return GridSpec(Y=float(Y), M=int(M), mu=float(mu), dy=dy, dtau=dtau, N=N)


@dataclass(frozen=True)
class SolutionSurface:
    """Dimensionless solution values v[n, m] and the boundary path xf[n].

    Structural identities are enforced at construction: the initial level is
    zero with xf[0] = 1, the far-field column is zero, and v[n, 0] = 1 - xf[n].
    Value bounds (0 <= v <= 1, 0 < xf <= 1) are audited, not enforced, since
    fractional-order runs can legitimately violate them near tau = 0.
    """

    v: np.ndarray
    xf: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        xf = np.asarray(self.xf, dtype=float)
        if v.ndim != 2 or xf.ndim != 1 or v.shape[0] != xf.shape[0]:
            raise ValidationError(["surface shapes are inconsistent"])
        if xf[0] != 1.0 or np.any(v[0] != 0.0):
            raise ValidationError(["initial level must be v=0 with xf=1"])
        if np.any(v[:, -1] != 0.0):
            raise ValidationError(["far-field column must be zero"])
        if np.any(v[:, 0] != 1.0 - xf):
            raise ValidationError(["v[n,0] must equal 1 - xf[n]"])
        v.setflags(write=False)
        xf.setflags(write=False)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "xf", xf)

    @property
    def levels(self) -> int:
        return self.v.shape[0]

    @property
    def nodes(self) -> int:
        return self.v.shape[1]


def to_fixed_domain(X: float, Xstar: float, E: float) -> tuple[float, float]:
    """Map (asset price, boundary price) to (log-moneyness y, normalized boundary)."""
    if Xstar <= 0 or E <= 0:
        raise DomainError("Xstar and E must be positive")
    if X < Xstar:
        raise DomainError("X must not lie below the exercise boundary")
    return math.log(X / Xstar), Xstar / E


def from_fixed_domain(v: float, y: float, xf: float, E: float) -> tuple[float, float]:
    """Map a dimensionless value back to (option price V, asset price X)."""
    if not 0.0 <= v <= 1.0:
        raise DomainError("v must lie in [0,1]")
    if not 0.0 < xf <= 1.0:
        raise DomainError("xf must lie in (0,1]")
    if y < 0:
        raise DomainError("y must be nonnegative")
    if E <= 0:
        raise DomainError("E must be positive")
    return E * v, E * xf * math.exp(y)


# intrinsic value below the boundary; the grid covers only y >= 0
def intrinsic_put_value(E: float, S: float) -> float:
    return max(E - S, 0.0)
