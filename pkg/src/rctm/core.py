"""Robust chaotic tent map: parameter validation, branch maps, orbit generation.

The generator is a piecewise-linear interval map on [0, 1].  For a control
parameter mu <= 2 it is the classical tent map.  For non-integer mu in
(2, 100) the tent branches are wrapped with a mod-1 and, inside the central
region [n1, n2], rescaled by the fractional part of mu/2 so that every
branch maps back onto the full unit interval.  All arithmetic is IEEE-754
binary64 with "a mod 1" meaning a - floor(a); orbits are bit-for-bit
reproducible for a fixed key.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

MU_MIN = 2.0
MU_MAX = 100.0

_CHUNK = 1 << 18


class InvalidKeyError(ValueError):
    """Map parameters violate a documented bound.

    ``kind`` names the violated constraint:
    ``non_finite``, ``mu_too_small``, ``mu_too_large``, ``mu_integer``,
    ``mu_out_of_ctm_range`` or ``x0_out_of_range``.
    """

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


@dataclass(frozen=True)
class MapKey:
    """Secret parameters (mu, x0) plus the derived scaling-region bounds."""

    mu: float
    x0: float
    n1: float
    n2: float

    @property
    def scale(self) -> float:
        """Denominator of the scaled branch: (mu/2) mod 1."""
        return (0.5 * self.mu) % 1.0

    @property
    def is_ctm(self) -> bool:
        """True when the key drives the plain tent map arm (mu <= 2)."""
        return self.mu <= MU_MIN

    def fingerprint(self) -> str:
        """Opaque hex identifier derived from the exact binary64 parameters."""
        return hashlib.sha256(struct.pack("<dd", self.mu, self.x0)).hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Orbit samples in [0, 1]; ``values[0]`` is x0 when burn_in == 0."""

    values: np.ndarray
    key: MapKey
    burn_in: int

    def __post_init__(self):
        self.values.flags.writeable = False

    def __len__(self) -> int:
        return self.values.size


def region_bounds(mu: float) -> tuple[float, float]:
    """Scaling-region bounds n1 = 1/2 - ((mu/2) mod 1)/mu and n2 = 1 - n1."""
    frac = (0.5 * mu) % 1.0
    return 0.5 - frac / mu, 0.5 + frac / mu


def _check_x0(x0: float) -> None:
    if not math.isfinite(x0):
        raise InvalidKeyError("non_finite", f"x0 must be finite, got {x0!r}")
    if not 0.0 < x0 < 1.0:
        raise InvalidKeyError("x0_out_of_range", f"x0 must lie in (0, 1), got {x0!r}")


def make_key(mu: float, x0: float) -> MapKey:
    """Validate and build a generator key.

    Accepts non-integer mu in (2, 100) and x0 in (0, 1).  Integer mu is
    rejected outright: even values zero the scaled-branch denominator and
    odd values degrade the branch structure.
    """
    mu = float(mu)
    x0 = float(x0)
    if not math.isfinite(mu):
        raise InvalidKeyError("non_finite", f"mu must be finite, got {mu!r}")
    if mu <= MU_MIN:
        raise InvalidKeyError("mu_too_small", f"mu must exceed {MU_MIN}, got {mu!r}")
    if mu >= MU_MAX:
        raise InvalidKeyError("mu_too_large", f"mu must be below {MU_MAX}, got {mu!r}")
    if mu == int(mu):
        raise InvalidKeyError("mu_integer", f"mu must be non-integer in (2, 100), got {mu!r}")
    _check_x0(x0)
    n1, n2 = region_bounds(mu)
    return MapKey(mu=mu, x0=x0, n1=n1, n2=n2)


def ctm_key(mu: float, x0: float) -> MapKey:
    """Build an analysis-mode key for the classical tent map arm.

    Accepts 0 < mu <= 2 (integers allowed here: the tent arm has no
    division).  Not a cryptographic key; used by the dynamics toolkit.
    """
    mu = float(mu)
    x0 = float(x0)
    if not math.isfinite(mu):
        raise InvalidKeyError("non_finite", f"mu must be finite, got {mu!r}")
    if not 0.0 < mu <= MU_MIN:
        raise InvalidKeyError("mu_out_of_ctm_range", f"tent-map mu must lie in (0, 2], got {mu!r}")
    _check_x0(x0)
    n1, n2 = region_bounds(mu)
    return MapKey(mu=mu, x0=x0, n1=n1, n2=n2)


def _check_state(x: float) -> None:
    if not math.isfinite(x):
        raise ValueError(f"state must be finite, got {x!r}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"state must lie in [0, 1], got {x!r}")


def ctm_step(x: float, mu: float) -> float:
    """One classical tent map step: mu*x below 1/2, mu*(1-x) at or above."""
    _check_state(x)
    if not math.isfinite(mu):
        raise ValueError(f"mu must be finite, got {mu!r}")
    if not 0.0 <= mu <= 2.0:
        raise ValueError(f"tent-map mu must lie in [0, 2], got {mu!r}")
    return mu * x if x < 0.5 else mu * (1.0 - x)


def rctm_step(x: float, key: MapKey) -> float:
    """One robust tent map step for a mu > 2 key.

    Points in [n1, n2] (boundaries inclusive) take the scaled branch
    (mu*x mod 1) / ((mu/2) mod 1); outside, the plain (mu*x mod 1), with
    the mirrored mu*(1-x) numerator for x >= 1/2.

    On the scaled branch the numerator cannot exceed (mu/2) mod 1 in exact
    arithmetic; a state within an ulp of a region bound can make mu*x round
    just below floor(mu/2) so the mod wraps to nearly 1.  Such wrapped
    numerators are folded to 0, keeping every output in [0, 1].
    """
    _check_state(x)
    if key.is_ctm:
        raise ValueError("rctm_step needs mu > 2; use ctm_step for the tent arm")
    t = key.mu * x if x < 0.5 else key.mu * (1.0 - x)
    t -= math.floor(t)
    if key.n1 <= x <= key.n2:
        s = key.scale
        t = 0.0 if t > s else t / s
    return t


def log_derivative(x: float, key: MapKey) -> float:
    """ln |slope| of the branch taken at x.

    The mod and the reflection contribute unit-magnitude factors, so the
    slope magnitude is mu on plain branches and mu / ((mu/2) mod 1) on the
    scaled branch.  Branch-boundary points count as scaled, matching the
    step functions' tie rule.
    """
    _check_state(x)
    if key.is_ctm:
        return math.log(key.mu)
    if key.n1 <= x <= key.n2:
        return math.log(key.mu / key.scale)
    return math.log(key.mu)


def orbit_chunks(key: MapKey, n: int, burn_in: int = 0,
                 chunk: int = _CHUNK) -> Iterator[np.ndarray]:
    """Yield the orbit of ``key`` as float64 arrays totalling ``n`` values.

    The first emitted value is x0 when burn_in == 0; otherwise the first
    burn_in iterates are discarded.  Streaming keeps memory flat for long
    runs (bit generation, battery segmentation).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if burn_in < 0:
        raise ValueError(f"burn_in must be >= 0, got {burn_in}")
    mu = key.mu
    n1, n2 = key.n1, key.n2
    x = key.x0
    floor = math.floor
    if key.is_ctm:
        for _ in range(burn_in):
            x = mu * x if x < 0.5 else mu * (1.0 - x)
        remaining = n
        while remaining:
            m = min(chunk, remaining)
            buf = [0.0] * m
            for i in range(m):
                buf[i] = x
                x = mu * x if x < 0.5 else mu * (1.0 - x)
            yield np.asarray(buf)
            remaining -= m
        return
    s = key.scale
    for _ in range(burn_in):
        t = mu * x if x < 0.5 else mu * (1.0 - x)
        t -= floor(t)
        if n1 <= x <= n2:
            t = 0.0 if t > s else t / s
        x = t
    remaining = n
    while remaining:
        m = min(chunk, remaining)
        buf = [0.0] * m
        for i in range(m):
            buf[i] = x
            t = mu * x if x < 0.5 else mu * (1.0 - x)
            t -= floor(t)
            if n1 <= x <= n2:
                t = 0.0 if t > s else t / s
            x = t
        yield np.asarray(buf)
        remaining -= m


def iterate(key: MapKey, n: int, burn_in: int = 0) -> Trajectory:
    """Generate n orbit samples after discarding burn_in iterates.

    Pure function of (key, n, burn_in); repeated calls are bit-identical.
    """
    out = np.empty(n, dtype=np.float64)
    pos = 0
    for block in orbit_chunks(key, n, burn_in):
        out[pos:pos + block.size] = block
        pos += block.size
    return Trajectory(values=out, key=key, burn_in=burn_in)


def iterate_batch(keys: Sequence[MapKey], n: int, burn_in: int = 0) -> np.ndarray:
    """Orbits of several keys at once, one row per key.

    Vectorizes across keys (states along one orbit stay sequential) and is
    bit-identical to per-key :func:`iterate`.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if burn_in < 0:
        raise ValueError(f"burn_in must be >= 0, got {burn_in}")
    if not keys:
        raise ValueError("keys must be non-empty")
    mu = np.array([k.mu for k in keys])
    x = np.array([k.x0 for k in keys])
    n1 = np.array([k.n1 for k in keys])
    n2 = np.array([k.n2 for k in keys])
    s = (0.5 * mu) % 1.0
    ctm = mu <= MU_MIN
    safe_s = np.where(s == 0.0, 1.0, s)  # mu == 2 only; those rows stay on the tent arm
    out = np.empty((len(keys), n), dtype=np.float64)
    for i in range(burn_in + n):
        if i >= burn_in:
            out[:, i - burn_in] = x
        y = np.where(x < 0.5, mu * x, mu * (1.0 - x))
        t = y - np.floor(y)
        scaled = (x >= n1) & (x <= n2) & ~ctm
        q = np.where(t > s, 0.0, t / safe_s)  # fold boundary wrap artifacts to 0
        x = np.where(ctm, y, np.where(scaled, q, t))
    return out
