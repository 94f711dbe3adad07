"""Thomas-algorithm solver for tridiagonal systems.

Plain LU sweep without pivoting; the assembled Crank-Nicolson rows are
diagonally dominant whenever the coefficient signs behave, and a pivot
guard converts the degenerate cases into a typed error instead of NaNs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularPivotError, ValidationError

__all__ = ["TridiagonalSystem", "solve_tridiagonal"]

_PIVOT_FLOOR = 1e-14


@dataclass(frozen=True)
class TridiagonalSystem:
    """Bands and right-hand side of T x = rhs.

    diag has length n; sub and super have length n-1 (sub[i] multiplies
    x[i] in row i+1, super[i] multiplies x[i+1] in row i).
    """

    sub: np.ndarray
    diag: np.ndarray
    super: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        sub = np.asarray(self.sub, dtype=float)
        diag = np.asarray(self.diag, dtype=float)
        sup = np.asarray(self.super, dtype=float)
        rhs = np.asarray(self.rhs, dtype=float)
        n = diag.size
        if n < 1 or rhs.size != n or sub.size != n - 1 or sup.size != n - 1:
            raise ValidationError(["band lengths are inconsistent"])
        for name, arr in (("sub", sub), ("diag", diag), ("super", sup), ("rhs", rhs)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def dense(self) -> np.ndarray:
        n = self.diag.size
        mat = np.zeros((n, n))
        idx = np.arange(n)
        mat[idx, idx] = self.diag
        mat[idx[:-1], idx[:-1] + 1] = self.super
        mat[idx[1:], idx[1:] - 1] = self.sub
        return mat

    def residual(self, x: np.ndarray) -> float:
        """Max-norm residual of a candidate solution."""
        x = np.asarray(x, dtype=float)
        r = self.diag * x - self.rhs
        r[:-1] += self.super * x[1:]
        r[1:] += self.sub * x[:-1]
        return float(np.max(np.abs(r)))


def solve_tridiagonal(sys: TridiagonalSystem) -> np.ndarray:
    """Solve the system by forward elimination and back substitution.

    Raises SingularPivotError naming the first row whose pivot falls below
    1e-14 in magnitude.
    """
    # python-float sweeps: the recurrence cannot vectorize and list access
    # is markedly faster than per-element ndarray indexing
    sub = sys.sub.tolist()
    diag = sys.diag.tolist()
    sup = sys.super.tolist()
    rhs = sys.rhs.tolist()
    n = len(diag)

    cp = [0.0] * n
    dp = [0.0] * n
    piv = diag[0]
    if abs(piv) <= _PIVOT_FLOOR:
        raise SingularPivotError(0, piv)
    if n > 1:
        cp[0] = sup[0] / piv
    dp[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - sub[i - 1] * cp[i - 1]
        if abs(piv) <= _PIVOT_FLOOR:
            raise SingularPivotError(i, piv)
        if i < n - 1:
            cp[i] = sup[i] / piv
        dp[i] = (rhs[i] - sub[i - 1] * dp[i - 1]) / piv

    x = [0.0] * n
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return np.asarray(x)
