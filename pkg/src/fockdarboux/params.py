"""Shared parameter types and error classes (hbar = 1 throughout)."""

from __future__ import annotations

import math
from dataclasses import dataclass


class FockDarbouxError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(FockDarbouxError, ValueError):
    """An argument is outside the documented domain."""


class NumericError(FockDarbouxError, ArithmeticError):
    """A computation produced a non-finite or otherwise invalid number."""


class NonNormalizableError(NumericError):
    """The effective frequency is not positive, so no bound state exists."""


class WrongSystemError(ParameterError):
    """A flat-space (FD) formula was called with non-zero curvature."""


class ConvergenceError(NumericError):
    """Quadrature or acceleration did not reach the requested tolerance.

    ``estimate`` and ``abs_error`` carry the best result obtained so far.
    """

    def __init__(self, message, estimate=math.nan, abs_error=math.inf, evaluations=0):
        super().__init__(message)
        self.estimate = estimate
        self.abs_error = abs_error
        self.evaluations = evaluations


@dataclass(frozen=True)
class QuantumNumbers:
    """Radial index ``n`` and magnetic index ``m``."""

    n: int
    m: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ParameterError(f"n must be a non-negative integer, got {self.n!r}")
        if int(self.m) != self.m:
            raise ParameterError(f"m must be an integer, got {self.m!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))

    @property
    def l(self) -> int:  # noqa: E743
        return abs(self.m)

    @property
    def c(self) -> int:
        return 2 * self.n + abs(self.m) + 1


@dataclass(frozen=True)
class SystemParams:
    """Oscillator frequency, Larmor frequency and curvature parameter.

    ``omega_c`` carries the field direction through its sign.
    """

    omega: float = 1.0
    omega_c: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        for name in ("omega", "omega_c", "lam"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.omega < 0:
            raise ParameterError(f"omega must be >= 0, got {self.omega}")
        if self.lam < 0:
            raise ParameterError(f"lam must be >= 0, got {self.lam}")

    @property
    def omega_t(self) -> float:
        return math.hypot(self.omega, self.omega_c)

    def require_bound(self) -> None:
        if self.omega == 0 and self.omega_c == 0:
            raise ParameterError("omega = omega_c = 0 has no discrete spectrum")

    def require_flat(self) -> None:
        if self.lam != 0:
            raise WrongSystemError(f"flat-space formula called with lam={self.lam}")

    def replace(self, **changes) -> "SystemParams":
        d = {"omega": self.omega, "omega_c": self.omega_c, "lam": self.lam}
        d.update(changes)
        return SystemParams(**d)


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise ParameterError("tolerances must be positive")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise ParameterError("max_subdivisions must be a positive integer")


DEFAULT_TOL = Tolerance()
