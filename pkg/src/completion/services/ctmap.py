"""Rate-pair to completion-time mappings and achievability tests.

A completion-time pair (d1, d2) is achievable when the constrained rate pair
(tau1/d1, tau2/d2) lies in the rate region constrained to the codeword-span
ratio c = d1/d2. The user finishing first frees the channel for the other,
whose residual bits then go out at its solo cap R''.
"""

from __future__ import annotations

import logging
from typing import Any, Tuple

import numpy as np

from .channels import RegionPredicate
from .core import (
    CompletionTimePair,
    DomainError,
    LoadSpec,
    NumericPolicy,
    RatePair,
    SoloCaps,
    UnboundedCompletionTime,
    _resolve,
)

logger = logging.getLogger(__name__)


def map_side1(
    r: RatePair, load: LoadSpec, R2pp: float, *, policy: NumericPolicy | None = None
) -> CompletionTimePair:
    """Map a rate pair below the load ray (user 1 finishes first)."""
    eps = _resolve(policy).eps_member
    if r.r1 <= 0:
        raise UnboundedCompletionTime("r1 = 0 gives an unbounded completion time d1")
    if R2pp <= 0 or r.r2 > R2pp + eps:
        raise DomainError(f"r2 ({r.r2}) must lie in [0, R2''={R2pp}]")
    if r.r2 / r.r1 > load.ratio + eps:
        raise DomainError("rate pair lies above the load ray; use the side-2 mapping")
    d1 = load.tau1 / r.r1
    d2 = load.tau2 / R2pp + max(R2pp - r.r2, 0.0) * load.tau1 / (R2pp * r.r1)
    return CompletionTimePair(d1, d2)


def map_side2(
    r: RatePair, load: LoadSpec, R1pp: float, *, policy: NumericPolicy | None = None
) -> CompletionTimePair:
    """Map a rate pair above the load ray (user 2 finishes first)."""
    eps = _resolve(policy).eps_member
    if r.r2 <= 0:
        raise UnboundedCompletionTime("r2 = 0 gives an unbounded completion time d2")
    if R1pp <= 0 or r.r1 > R1pp + eps:
        raise DomainError(f"r1 ({r.r1}) must lie in [0, R1''={R1pp}]")
    if r.r2 / max(r.r1, np.finfo(float).tiny) < load.ratio - eps:
        raise DomainError("rate pair lies below the load ray; use the side-1 mapping")
    d2 = load.tau2 / r.r2
    d1 = load.tau1 / R1pp + max(R1pp - r.r1, 0.0) * load.tau2 / (R1pp * r.r2)
    return CompletionTimePair(d1, d2)


def map_side(
    side: int, r: RatePair, load: LoadSpec, caps: SoloCaps, *, policy: NumericPolicy | None = None
) -> CompletionTimePair:
    """Dispatch to the side mapping with R'' set to the relevant solo cap."""
    if side == 1:
        return map_side1(r, load, caps.cap2, policy=policy)
    if side == 2:
        return map_side2(r, load, caps.cap1, policy=policy)
    raise DomainError(f"side must be 1 or 2, got {side!r}")


def objective_D(
    side: int,
    r: RatePair,
    load: LoadSpec,
    w: float,
    caps: SoloCaps,
    *,
    policy: NumericPolicy | None = None,
) -> float:
    """Weighted completion time w*d1 + (1-w)*d2 of the mapped rate pair."""
    if not 0.0 <= w <= 1.0:
        raise DomainError(f"weight must lie in [0, 1], got {w}")
    return map_side(side, r, load, caps, policy=policy).weighted(w)


def objective_D_closed_form(
    side: int, r: RatePair, load: LoadSpec, w: float, caps: SoloCaps
) -> float:
    """The same objective written directly in the rates."""
    wbar = 1.0 - w
    if side == 1:
        cap2 = caps.cap2
        return wbar * load.tau2 / cap2 + load.tau1 * (cap2 - wbar * r.r2) / (cap2 * r.r1)
    if side == 2:
        cap1 = caps.cap1
        return w * load.tau1 / cap1 + load.tau2 * (cap1 - w * r.r1) / (cap1 * r.r2)
    raise DomainError(f"side must be 1 or 2, got {side!r}")


def map_rates_grid(
    r1: Any, r2: Any, load: LoadSpec, caps: SoloCaps
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized mapping of rate arrays; returns (d1, d2, side).

    Points that map to an unbounded time get ``inf`` and side 0.
    """
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    side = np.where(r2 * load.tau1 <= r1 * load.tau2, 1, 2)
    side = np.where((r1 <= 0) & (r2 <= 0), 0, side)
    with np.errstate(divide="ignore", invalid="ignore"):
        d1_side1 = load.tau1 / r1
        d2_side1 = load.tau2 / caps.cap2 + np.maximum(caps.cap2 - r2, 0.0) * load.tau1 / (
            caps.cap2 * r1
        )
        d2_side2 = load.tau2 / r2
        d1_side2 = load.tau1 / caps.cap1 + np.maximum(caps.cap1 - r1, 0.0) * load.tau2 / (
            caps.cap1 * r2
        )
    d1 = np.where(side == 1, d1_side1, np.where(side == 2, d1_side2, np.inf))
    d2 = np.where(side == 1, d2_side1, np.where(side == 2, d2_side2, np.inf))
    return d1, d2, side


def reduced_rates(R1: Any, R2: Any, c: Any, caps: SoloCaps) -> Tuple[Any, Any]:
    """Project a c-constrained rate pair onto the unconstrained region.

    The user whose span is shorter keeps its rate; the other gives back the
    part it sends alone at its solo cap.
    """
    R1 = np.asarray(R1, dtype=float)
    R2 = np.asarray(R2, dtype=float)
    c = np.asarray(c, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2_short = np.maximum(R2 / c - (1.0 / c - 1.0) * caps.cap2, 0.0)
    r1_long = np.maximum(c * R1 - (c - 1.0) * caps.cap1, 0.0)
    first = c <= 1.0
    return np.where(first, R1, r1_long), np.where(first, r2_short, R2)


def constrained_membership(
    region_contains: RegionPredicate,
    caps: SoloCaps,
    R: RatePair,
    c: float,
) -> bool:
    """Membership of R in the rate region constrained to span ratio c."""
    if not c > 0:
        raise DomainError(f"span ratio c must be positive, got {c}")
    r1, r2 = reduced_rates(R.r1, R.r2, c, caps)
    return bool(region_contains(float(r1), float(r2)))


def ct_achievable(
    region_contains: RegionPredicate,
    caps: SoloCaps,
    load: LoadSpec,
    d: CompletionTimePair,
) -> bool:
    """Ground-truth achievability of a completion-time pair."""
    R = RatePair(load.tau1 / d.d1, load.tau2 / d.d2)
    return constrained_membership(region_contains, caps, R, d.d1 / d.d2)


def ct_achievable_grid(
    region_contains: RegionPredicate,
    caps: SoloCaps,
    load: LoadSpec,
    d1: Any,
    d2: Any,
) -> np.ndarray:
    """Vectorized ``ct_achievable`` over arrays of strictly positive times."""
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    if np.any(d1 <= 0) or np.any(d2 <= 0):
        raise DomainError("completion times must be strictly positive")
    r1, r2 = reduced_rates(load.tau1 / d1, load.tau2 / d2, d1 / d2, caps)
    return np.asarray(region_contains(r1, r2), dtype=bool)
