"""Nuclear charge distribution, Coulomb potential and weak-charge density."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import ConstantsSet, default_constants

RADIUS_COEFF_FM = 1.2

SHAPES = ("point", "uniform")


def nuclear_radius(A: float) -> float:
    """Nuclear radius 1.2 A^(1/3) fm."""
    if not A > 0:
        raise ValueError(f"atomic weight must be positive, got {A!r}")
    return RADIUS_COEFF_FM * A ** (1.0 / 3.0)


@dataclass(frozen=True)
class NuclearModel:
    """A nucleus of charge ``Z`` and atomic weight ``A``.

    ``N`` is ``round(A) - Z``; :attr:`neutron_excess_weight` keeps the
    unrounded ``A - Z``. For ``shape="uniform"`` the charge and weak
    densities are a homogeneous sphere of radius ``radius_fm`` (by default
    from :func:`nuclear_radius`). ``shape="point"`` is kept for validating
    the solver against closed-form energies.
    """

    Z: int
    A: float
    shape: str = "uniform"
    radius_fm: float | None = None
    consts: ConstantsSet = field(default_factory=default_constants, repr=False, compare=False)

    def __post_init__(self):
        if int(self.Z) != self.Z or self.Z < 1:
            raise ValueError(f"Z must be a positive integer, got {self.Z!r}")
        if not self.A > 0:
            raise ValueError(f"A must be positive, got {self.A!r}")
        if self.shape not in SHAPES:
            raise ValueError(f"shape must be one of {SHAPES}, got {self.shape!r}")
        if self.N < 0:
            raise ValueError(f"round(A) - Z is negative for Z={self.Z}, A={self.A}")
        if self.radius_fm is None:
            object.__setattr__(self, "radius_fm", nuclear_radius(self.A))
        elif not self.radius_fm > 0:
            raise ValueError("radius_fm must be positive")

    @property
    def N(self) -> int:
        return int(round(self.A)) - int(self.Z)

    @property
    def neutron_excess_weight(self) -> float:
        """``A - Z`` without rounding, the neutron count used in the tabulated weak charges."""
        return float(self.A) - int(self.Z)

    @property
    def is_point(self) -> bool:
        return self.shape == "point"

    @property
    def z_alpha(self) -> float:
        return self.Z * self.consts.alpha

    def coulomb_potential(self, r):
        """Electron potential energy (eV) at ``r`` (fm); accepts arrays."""
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise ValueError("r must be positive")
        k = self.z_alpha * self.consts.hbar_c_eV_fm
        out = -k / r
        if not self.is_point:
            R = self.radius_fm
            inside = r <= R
            out = np.where(inside, -(k / (2 * R)) * (3.0 - (r / R) ** 2), out)
        return out if out.ndim else float(out)

    def density(self, r):
        """Normalized density (fm^-3): ``integral 4 pi r^2 rho dr = 1``.

        A point nucleus has no numeric density; :attr:`is_point` tells the
        PNC integrator to evaluate at contact instead.
        """
        if self.is_point:
            raise ValueError("point nucleus has no numeric density; evaluate at contact")
        r = np.asarray(r, dtype=float)
        R = self.radius_fm
        out = np.where(r <= R, 3.0 / (4.0 * math.pi * R**3), 0.0)
        return out if out.ndim else float(out)

    def r_times_potential_series(self, length_unit_fm: float) -> dict[int, float]:
        """Coefficients ``c_j`` of ``r V(r) = sum c_j r^j`` near the origin.

        ``r`` is measured in ``length_unit_fm`` and ``V`` in electron masses.
        """
        za = self.z_alpha
        if self.is_point:
            return {0: -za}
        R = self.radius_fm / length_unit_fm
        return {1: -1.5 * za / R, 3: 0.5 * za / R**3}


def coulomb_potential(model: NuclearModel, r):
    return model.coulomb_potential(r)


def density(model: NuclearModel, r):
    return model.density(r)
