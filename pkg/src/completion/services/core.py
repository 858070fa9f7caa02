"""Scalar math, value types and the shared numeric-tolerance policy.

Rates are in bits per channel use with the ``1/2 log2(1 + x)`` convention;
completion times are channel uses per source sample.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, Tuple

import numpy as np
from django.core.exceptions import ImproperlyConfigured
from scipy import optimize

logger = logging.getLogger(__name__)

try:
    from django.conf import settings as django_settings  # type: ignore
except ImportError:  # pragma: no cover - optional dependency in some contexts
    DJANGO_SETTINGS = None
else:
    DJANGO_SETTINGS = django_settings


class CompletionTimeError(ValueError):
    """Base class for every error raised by the completion services."""


class DomainError(CompletionTimeError):
    """An argument lies outside the domain of the operation."""


class UnboundedCompletionTime(DomainError):
    """A mapping was asked to divide by a zero rate coordinate."""


class PolygonValidationError(CompletionTimeError):
    """A polygonal rate region violates the ordered-face model."""

    def __init__(self, message: str, segment: int | None = None):
        self.segment = segment
        if segment is not None:
            message = f"segment {segment}: {message}"
        super().__init__(message)


class RegimeMismatchError(CompletionTimeError):
    """A regime-specific constructor received a channel of another regime."""


class ChannelFileError(CompletionTimeError):
    """A channel or polygon file could not be parsed."""


def _get_setting(name: str, default=None):
    if DJANGO_SETTINGS is not None and DJANGO_SETTINGS.configured and hasattr(
        DJANGO_SETTINGS, name
    ):
        return getattr(DJANGO_SETTINGS, name)
    return os.getenv(name, default)


@dataclass(frozen=True)
class NumericPolicy:
    """Tolerances shared by membership tests, root finders and oracles."""

    eps_member: float = 1e-9
    eps_root: float = 1e-12
    grid_n: int = 2000
    max_bisections: int = 200

    def __post_init__(self):
        if not (self.eps_member > 0 and self.eps_root > 0 and self.grid_n > 0):
            raise ImproperlyConfigured("Numeric policy values must be strictly positive.")
        if self.max_bisections <= 0:
            raise ImproperlyConfigured("CTR_MAX_BISECTIONS must be strictly positive.")
        if not self.eps_root < self.eps_member:
            raise ImproperlyConfigured(
                f"eps_root ({self.eps_root}) must be smaller than eps_member ({self.eps_member})."
            )

    @classmethod
    def from_settings(cls) -> "NumericPolicy":
        """Build the policy from Django settings, falling back to the environment."""
        try:
            return cls(
                eps_member=float(_get_setting("CTR_EPS_MEMBER", cls.eps_member)),
                eps_root=float(_get_setting("CTR_EPS_ROOT", cls.eps_root)),
                grid_n=int(_get_setting("CTR_GRID_N", cls.grid_n)),
                max_bisections=int(_get_setting("CTR_MAX_BISECTIONS", cls.max_bisections)),
            )
        except (TypeError, ValueError) as exc:
            raise ImproperlyConfigured(f"Invalid numeric policy setting: {exc}") from exc

    def as_dict(self) -> Dict[str, object]:
        """Serialize the policy for report metadata."""
        return {
            "eps_member": self.eps_member,
            "eps_root": self.eps_root,
            "grid_n": self.grid_n,
            "max_bisections": self.max_bisections,
        }


@lru_cache(maxsize=1)
def default_policy() -> NumericPolicy:
    """Return the process-wide policy (settings are read once)."""
    policy = NumericPolicy.from_settings()
    logger.debug("Numeric policy: %s", policy)
    return policy


def _resolve(policy: NumericPolicy | None) -> NumericPolicy:
    return policy if policy is not None else default_policy()


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class RatePair:
    """A point (r1, r2) in rate space, bits per channel use."""

    r1: float
    r2: float

    def __post_init__(self):
        for name in ("r1", "r2"):
            value = _check_finite(name, getattr(self, name))
            if value < 0:
                raise DomainError(f"{name} must be non-negative, got {value}")
            object.__setattr__(self, name, value)

    def as_tuple(self) -> Tuple[float, float]:
        """Return (r1, r2)."""
        return (self.r1, self.r2)


@dataclass(frozen=True)
class CompletionTimePair:
    """A point (d1, d2) in completion-time space."""

    d1: float
    d2: float

    def __post_init__(self):
        for name in ("d1", "d2"):
            value = _check_finite(name, getattr(self, name))
            if value <= 0:
                raise DomainError(f"{name} must be strictly positive, got {value}")
            object.__setattr__(self, name, value)

    def as_tuple(self) -> Tuple[float, float]:
        """Return (d1, d2)."""
        return (self.d1, self.d2)

    def weighted(self, w: float) -> float:
        """Return w*d1 + (1-w)*d2."""
        return w * self.d1 + (1.0 - w) * self.d2


@dataclass(frozen=True)
class LoadSpec:
    """Bits per source sample each user must deliver."""

    tau1: float
    tau2: float

    def __post_init__(self):
        for name in ("tau1", "tau2"):
            value = _check_finite(name, getattr(self, name))
            if value <= 0:
                raise DomainError(f"{name} must be strictly positive, got {value}")
            object.__setattr__(self, name, value)

    @property
    def ratio(self) -> float:
        """Slope tau2/tau1 of the load ray."""
        return self.tau2 / self.tau1

    def swapped(self) -> "LoadSpec":
        """Return the load with users relabeled."""
        return LoadSpec(self.tau2, self.tau1)

    def as_tuple(self) -> Tuple[float, float]:
        """Return (tau1, tau2)."""
        return (self.tau1, self.tau2)


@dataclass(frozen=True)
class SoloCaps:
    """Maximum single-user rates when the other user is silent."""

    cap1: float
    cap2: float

    def __post_init__(self):
        for name in ("cap1", "cap2"):
            value = _check_finite(name, getattr(self, name))
            if value <= 0:
                raise DomainError(f"{name} must be strictly positive, got {value}")
            object.__setattr__(self, name, value)

    def as_tuple(self) -> Tuple[float, float]:
        """Return (cap1, cap2)."""
        return (self.cap1, self.cap2)


def gamma(x: Any) -> Any:
    """Return 1/2 log2(1 + x); accepts scalars or numpy arrays."""
    values = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError("gamma requires finite arguments")
    if np.any(values < 0):
        raise DomainError(f"gamma requires non-negative arguments, got {x!r}")
    result = 0.5 * np.log2(1.0 + values)
    return float(result) if result.ndim == 0 else result


def inv_gamma(r: Any) -> Any:
    """Return 2**(2r) - 1, the power that supports rate r."""
    values = np.asarray(r, dtype=float)
    if np.any(np.isnan(values)) or np.any(values < 0):
        raise DomainError(f"inv_gamma requires non-negative rates, got {r!r}")
    result = np.expm1(2.0 * values * math.log(2.0))
    return float(result) if result.ndim == 0 else result


def bisect_increasing(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    policy: NumericPolicy | None = None,
) -> float:
    """Root of an increasing ``func`` on [lo, hi], clipped to the bracket ends.

    When the sign does not change the nearer endpoint is returned, which is
    the solution of the clipped problem for a monotone function.
    """
    policy = _resolve(policy)
    f_lo = func(lo)
    if f_lo >= 0:
        return lo
    f_hi = func(hi)
    if f_hi <= 0:
        return hi
    root = optimize.bisect(
        func, lo, hi, xtol=policy.eps_root, maxiter=policy.max_bisections
    )
    logger.debug("bisection on [%g, %g] -> %.15g", lo, hi, root)
    return float(root)
