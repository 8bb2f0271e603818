"""Uehling vacuum-polarization potential.

Point charge ``Ze``:

    V_U(r) = -(2 alpha (Z alpha) hbar c / (3 pi r)) K(2 r / lambda_C)

    K(u) = int_1^inf exp(-u y) (1 + 1/(2 y^2)) sqrt(y^2 - 1) / y^2 dy

The sign makes the potential attractive for the electron, like the nuclear
Coulomb term. With ``y = cosh t`` the square-root endpoint disappears:

    K(u) = int_0^inf exp(-u cosh t) (1 + 1/(2 cosh^2 t)) tanh^2 t dt

For a homogeneously charged sphere of radius ``R`` the Yukawa factor
``exp(-b r)/r`` (``b = 2 y / lambda_C``) is replaced by its average over the
sphere, which is available in closed form (see :func:`_sphere_yukawa`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import ConstantsSet, default_constants
from .numerics import RadialGrid, integrate_adaptive

#: truncate the point-charge t-integral where exp(-u (cosh t - 1)) drops below this
_CUTOFF = 1e-18
#: upper t limit for the sphere kernel, whose integrand can decay only like exp(-t)
_T_MAX_SPHERE = 42.0

UEHLING_MODELS = ("point", "uniform")


def _prefactor(Z: int, consts: ConstantsSet) -> float:
    return 2.0 * consts.alpha * Z * consts.alpha * consts.hbar_c_eV_fm / (3.0 * math.pi)


def _weight(t: float) -> float:
    """(1 + 1/(2y^2)) sqrt(y^2-1)/y^2 dy/dt at y = cosh t."""
    c = math.cosh(t)
    th = math.tanh(t)
    return (1.0 + 0.5 / (c * c)) * th * th


def uehling_kernel_scaled(u: float, rtol: float = 1e-11) -> float:
    """``exp(u) * K(u)`` for ``u > 0``; scaled so large ``u`` does not underflow."""
    if not u > 0:
        raise ValueError("u must be positive")
    t_max = math.acosh(1.0 + -math.log(_CUTOFF) / u)

    def integrand(t: float) -> float:
        return math.exp(-u * (math.cosh(t) - 1.0)) * _weight(t)

    breaks = [b for b in (1.0, math.acosh(1.0 + 1.0 / u)) if 0.0 < b < t_max]
    edges = [0.0, *sorted(set(breaks)), t_max]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate_adaptive(integrand, a, b, rtol=rtol, atol=1e-300).value
    return total


def uehling_kernel(u: float, rtol: float = 1e-11) -> float:
    """K(u); returns 0 once ``exp(-u)`` underflows."""
    if u > 740.0:
        return 0.0
    return math.exp(-u) * uehling_kernel_scaled(u, rtol)


def uehling_point(Z: int, r: float, consts: ConstantsSet | None = None) -> float:
    """Point-nucleus Uehling potential energy (eV) of the electron at ``r`` (fm)."""
    consts = consts or default_constants()
    if not r > 0:
        raise ValueError("r must be positive")
    return -_prefactor(Z, consts) / r * uehling_kernel(2.0 * r / consts.compton_fm)


# ---------------------------------------------------------------------------
# homogeneous sphere
# ---------------------------------------------------------------------------

def _xcosh_minus_sinh(x: float) -> float:
    # x cosh x - sinh x = sum_k 2k x^(2k+1) / (2k+1)!
    if x < 0.1:
        x2 = x * x
        return x * x2 * (1 / 3 + x2 * (1 / 30 + x2 * (1 / 840 + x2 * (1 / 45360 + x2 / 3991680))))
    return x * math.cosh(x) - math.sinh(x)


def _sinh_minus_x(x: float) -> float:
    if x < 0.1:
        x2 = x * x
        return x * x2 * (1 / 6 + x2 * (1 / 120 + x2 * (1 / 5040 + x2 / 362880)))
    return math.sinh(x) - x


def _sphere_yukawa(r: float, R: float, b: float) -> float:
    """Average of ``exp(-b |r - r'|)/|r - r'|`` over a uniform sphere of radius R."""
    x = b * R
    x3 = x * x * x
    if r >= R:
        if x > 20.0:
            # exp(-b r)(x cosh x - sinh x) without overflow
            s = 0.5 * (math.exp(-b * (r - R)) * (x - 1.0) + math.exp(-b * (r + R)) * (x + 1.0))
            return 3.0 * s / (x3 * r)
        return 3.0 * math.exp(-b * r) * _xcosh_minus_sinh(x) / (x3 * r)
    br = b * r
    # 1 - (1 + x) exp(-x), accurate for small x
    q = -math.expm1(-x) - x * math.exp(-x)
    if br > 20.0:
        # (1 + x) e^-x sinh(br) = (1 + x)(e^(br - x) - e^(-br - x))/2
        inner = br - 0.5 * (1.0 + x) * (math.exp(br - x) - math.exp(-br - x))
    else:
        inner = q * math.sinh(br) - _sinh_minus_x(br)
    return 3.0 * inner / (x3 * r)


def uehling_uniform_sphere(
    Z: int, r: float, radius_fm: float, consts: ConstantsSet | None = None, rtol: float = 1e-11
) -> float:
    """Uehling potential energy (eV) at ``r`` for a homogeneously charged sphere."""
    consts = consts or default_constants()
    if not r > 0:
        raise ValueError("r must be positive")
    if not radius_fm > 0:
        raise ValueError("radius must be positive")
    lam = consts.compton_fm
    gap = max(r - radius_fm, 0.0)
    if 2.0 * gap / lam > 740.0:
        return 0.0

    def integrand(t: float) -> float:
        return _weight(t) * _sphere_yukawa(r, radius_fm, 2.0 * math.cosh(t) / lam)

    t_max = _T_MAX_SPHERE
    breaks = [1.0]
    if gap > 0:
        u = 2.0 * gap / lam
        t_max = min(t_max, math.acosh(1.0 + -math.log(_CUTOFF) / u) + 1.0)
        breaks.append(math.acosh(1.0 + 1.0 / u))
    breaks.append(math.acosh(max(1.0, lam / (2.0 * radius_fm))))
    edges = [0.0, *sorted(b for b in set(breaks) if 0.0 < b < t_max), t_max]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate_adaptive(integrand, a, b, rtol=rtol, atol=1e-300).value
    return -_prefactor(Z, consts) * total


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class UehlingTable:
    """Uehling potential (eV) sampled on ``grid`` for nuclear charge ``Z``."""

    grid: RadialGrid = field(repr=False)
    values: np.ndarray = field(repr=False)
    Z: int
    model: str = "point"
    radius_fm: float | None = None

    def scaled(self, lam: float) -> np.ndarray:
        """Values multiplied by a strength parameter ``lam``."""
        return lam * self.values


def uehling_on_grid(
    Z: int,
    grid: RadialGrid,
    consts: ConstantsSet | None = None,
    model: str = "point",
    radius_fm: float | None = None,
) -> UehlingTable:
    """Sample the Uehling potential at every node of ``grid``.

    ``model="point"`` uses :func:`uehling_point`; ``model="uniform"`` uses
    :func:`uehling_uniform_sphere` with ``radius_fm``.
    """
    consts = consts or default_constants()
    r = grid.points
    if model == "point":
        pref = _prefactor(Z, consts)
        lam = consts.compton_fm
        values = -pref / r * np.array([uehling_kernel(float(2.0 * ri / lam)) for ri in r])
    elif model == "uniform":
        if radius_fm is None:
            raise ValueError("uniform-sphere Uehling needs radius_fm")
        unit = [uehling_uniform_sphere(1, float(ri), radius_fm, consts) for ri in r]
        values = Z * np.array(unit)
    else:
        raise ValueError(f"unknown Uehling model {model!r}; expected one of {UEHLING_MODELS}")
    values.setflags(write=False)
    return UehlingTable(grid=grid, values=values, Z=Z, model=model, radius_fm=radius_fm)
