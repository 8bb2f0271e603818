"""Radial grids, quadrature and root bracketing shared by the solver and integrals.

All grids are exponential, ``r_i = r_min * exp(i * h)``, so integrals over
``r`` become integrals over the uniform variable ``t = ln r`` with
``dr = r dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate, special


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance.

    The best available estimate is kept on the exception.
    """

    def __init__(self, message: str, value: float, abs_error_estimate: float):
        super().__init__(message)
        self.value = value
        self.abs_error_estimate = abs_error_estimate


class RootBracketError(ValueError):
    """The function does not change sign over the supplied bracket."""


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float

    def __post_init__(self):
        if not self.abs_error_estimate >= 0.0:
            raise ValueError("abs_error_estimate must be non-negative")

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Exponential radial mesh.

    Attributes
    ----------
    points : np.ndarray
        Strictly increasing node positions (fm).
    h : float
        Uniform step in ``ln r``.
    """

    points: np.ndarray
    h: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def r_min(self) -> float:
        return float(self.points[0])

    @property
    def r_max(self) -> float:
        return float(self.points[-1])

    @property
    def spacing(self) -> str:
        return "exponential"

    def __len__(self) -> int:
        return len(self.points)

    def index_of(self, r: float, rtol: float = 1e-12) -> int:
        """Index of the node equal to ``r`` (relative tolerance ``rtol``)."""
        i = int(np.argmin(np.abs(self.points - r)))
        if abs(self.points[i] - r) > rtol * abs(r):
            raise ValueError(f"r = {r!r} is not a grid node")
        return i

    def same_as(self, other: "RadialGrid") -> bool:
        return (
            len(self) == len(other)
            and self.h == other.h
            and bool(np.array_equal(self.points, other.points))
        )


def make_grid(r_min: float, r_max: float, n: int) -> RadialGrid:
    """Exponential grid with ``n`` points whose ends are exactly ``r_min`` and ``r_max``."""
    if not (r_min > 0 and r_max > r_min):
        raise ValueError(f"need 0 < r_min < r_max, got r_min={r_min!r}, r_max={r_max!r}")
    if n < 16:
        raise ValueError(f"need at least 16 grid points, got {n}")
    h = math.log(r_max / r_min) / (n - 1)
    pts = r_min * np.exp(h * np.arange(n))
    pts[0] = r_min
    pts[-1] = r_max
    return RadialGrid(pts, h)


def make_anchored_grid(anchor: float, r_min: float, r_max: float, n: int) -> RadialGrid:
    """Exponential grid containing ``anchor`` exactly as a node.

    The step is fixed by ``(r_min, r_max, n)``; ``r_min`` is then lowered
    (never raised) so that ``anchor`` falls on a node, and the point count
    grows by at most one so the upper end still reaches ``r_max``. Used to
    put the nuclear surface on the mesh, where the density is discontinuous.
    """
    if not (r_min < anchor < r_max):
        raise ValueError("anchor must lie strictly inside (r_min, r_max)")
    base = make_grid(r_min, r_max, n)
    k = math.ceil(math.log(anchor / r_min) / base.h)
    start = anchor * math.exp(-k * base.h)
    m = math.ceil(math.log(r_max / start) / base.h - 1e-9) + 1
    pts = anchor * np.exp(base.h * (np.arange(m) - k))
    return RadialGrid(pts, base.h)


# ---------------------------------------------------------------------------
# Uniform-step weights
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _gregory_end_weights(m: int) -> tuple[float, ...]:
    """Corrected first ``m`` weights of the trapezoid rule (Gregory end correction).

    The corrections ``c_j`` reproduce the left-end Euler-Maclaurin terms for
    polynomials of degree < m: ``sum_j c_j j^p = B_{p+1}/(p+1)`` for odd p,
    zero for even p.
    """
    bern = special.bernoulli(m + 1)
    j = np.arange(m, dtype=float)
    A = np.vander(j, m, increasing=True).T
    b = np.array([bern[p + 1] / (p + 1) if p % 2 == 1 else 0.0 for p in range(m)])
    c = np.linalg.solve(A, b)
    w = np.ones(m)
    w[0] = 0.5
    return tuple(w + c)


def uniform_weights(n: int, order: int = 8) -> np.ndarray:
    """Quadrature weights (for unit spacing) on ``n`` equally spaced samples."""
    m = min(order, n // 2)
    if m < 1:
        raise ValueError("need at least two samples")
    w = np.ones(n)
    if n < 2 * order:
        # short ranges: plain composite Simpson when possible, else trapezoid
        if n >= 3 and n % 2 == 1:
            w = np.ones(n)
            w[1:-1:2] = 4.0
            w[2:-1:2] = 2.0
            return w / 3.0
        w[0] = w[-1] = 0.5
        return w
    end = np.array(_gregory_end_weights(m))
    w[:m] = end
    w[-m:] = end[::-1]
    return w


def integrate_on_grid(
    values: np.ndarray,
    grid: RadialGrid,
    stop: int | None = None,
    origin_tail: bool = True,
) -> QuadratureResult:
    """Integrate samples ``values(r_i)`` over ``dr`` on an exponential grid.

    Parameters
    ----------
    values : array
        Integrand sampled at the grid nodes.
    grid : RadialGrid
    stop : int, optional
        Integrate only over nodes ``0..stop`` inclusive.
    origin_tail : bool
        Add the ``[0, r_min]`` piece assuming a power law through the first two nodes.

    Returns
    -------
    QuadratureResult
        Value from an eighth-order end-corrected rule; the error estimate is
        its difference from the sixth-order rule plus the tail size.
    """
    y = np.asarray(values, dtype=float)
    r = grid.points
    if stop is not None:
        y = y[: stop + 1]
        r = r[: stop + 1]
    if y.shape != r.shape:
        raise ValueError("values must be sampled on the grid")
    F = y * r
    w8 = uniform_weights(len(F), 8)
    hi = grid.h * float(np.dot(w8, F))
    lo = grid.h * float(np.dot(uniform_weights(len(F), 6), F))
    roundoff = 10.0 * np.finfo(float).eps * grid.h * float(np.dot(np.abs(w8), np.abs(F)))
    tail = tail_err = 0.0
    if origin_tail and y[0] != 0.0 and y[1] != 0.0 and y[0] * y[1] > 0:
        p = math.log(y[1] / y[0]) / grid.h
        if p > -1.0:
            tail = y[0] * r[0] / (p + 1.0)
            # a drifting local power (e.g. log r) biases the power-law tail
            dp = 0.0
            if len(y) > 2 and y[1] * y[2] > 0:
                dp = (math.log(y[2] / y[1]) / grid.h - p) / grid.h
            tail_err = abs(tail) * (abs(dp) / (p + 1.0) ** 2 + 1e-6)
    return QuadratureResult(hi + tail, abs(hi - lo) + tail_err + roundoff)


def integrate_adaptive(
    func: Callable[[float], float],
    a: float,
    b: float,
    rtol: float = 1e-10,
    atol: float = 0.0,
    limit: int = 200,
) -> QuadratureResult:
    """Adaptive Gauss-Kronrod integration of ``func`` over ``[a, b]``.

    ``b`` may be ``inf``. Raises :class:`QuadratureError` (carrying the
    best estimate) when ``|error| <= rtol*|value| + atol`` is not met.
    """
    value, err, info, *rest = integrate.quad(
        func, a, b, epsabs=atol, epsrel=max(rtol, 50 * np.finfo(float).eps), limit=limit, full_output=True
    )
    if rest or err > rtol * abs(value) + atol + 1e-300:
        msg = rest[0] if rest else "error estimate above tolerance"
        if err > 10 * (rtol * abs(value) + atol) + 1e-300:
            raise QuadratureError(f"adaptive quadrature failed: {msg}", value, err)
    return QuadratureResult(float(value), float(err))


def find_root_bracketed(
    func: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12
) -> float:
    """Root of ``func`` in ``[lo, hi]`` (Brent), accurate to ``tol``."""
    flo, fhi = func(lo), func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise RootBracketError(f"no sign change on [{lo}, {hi}]")
    from scipy.optimize import brentq

    return float(brentq(func, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500))


@lru_cache(maxsize=None)
def adams_moulton_coefficients(k: int) -> tuple[float, ...]:
    """Coefficients ``beta_j`` of the k-step Adams-Moulton formula.

    ``y[n+1] = y[n] + h * sum_j beta_j * y'[n+1-j]`` for ``j = 0..k``.
    """
    nodes = [1.0 - j for j in range(k + 1)]
    betas = []
    for j, xj in enumerate(nodes):
        poly = np.array([1.0])
        for i, xi in enumerate(nodes):
            if i != j:
                poly = P.polymul(poly, np.array([-xi, 1.0]) / (xj - xi))
        anti = P.polyint(poly)
        betas.append(float(P.polyval(1.0, anti) - P.polyval(0.0, anti)))
    return tuple(betas)
