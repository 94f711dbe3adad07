"""Typed exceptions raised by the solver and its helpers."""

from __future__ import annotations


class FronfixError(Exception):
    """Base class for all package errors."""


class ValidationError(FronfixError, ValueError):
    """Invalid model or grid inputs; message lists every violation."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(violations))


class DomainError(FronfixError, ValueError):
    """Arguments outside the mathematical domain of a transform."""


class SingularPivotError(FronfixError):
    """Tridiagonal elimination hit a near-zero pivot."""

    def __init__(self, row: int, pivot: float):
        self.row = row
        self.pivot = pivot
        super().__init__(f"singular pivot {pivot:.3e} at row {row}")


class DenominatorNearZeroError(FronfixError):
    """Free-boundary update denominator below the safety floor."""

    def __init__(self, step: int, denominator: float, scale: float):
        self.step = step
        self.denominator = denominator
        self.scale = scale
        super().__init__(
            f"free-boundary denominator {denominator:.3e} below floor "
            f"{1e-12 * scale:.3e} at step {step}"
        )


class NonConvergenceError(FronfixError):
    """Inner free-boundary iteration failed to settle."""

    def __init__(self, step: int, iterations: int, last_iterates: tuple[float, float]):
        self.step = step
        self.iterations = iterations
        self.last_iterates = last_iterates
        super().__init__(
            f"free-boundary iteration did not converge at step {step} "
            f"after {iterations} iterations (last iterates {last_iterates[0]:.12g}, "
            f"{last_iterates[1]:.12g})"
        )
