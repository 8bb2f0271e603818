"""Physical constants and energy-unit conversions.

Every other module takes its numbers from a :class:`ConstantsSet`. The
defaults are CODATA 2022 (through :mod:`scipy.constants`) for alpha, the
electron mass, hbar*c and the Fermi constant, and PDG values for the Z mass.

Electroweak inputs at zero momentum transfer:

* ``sin2_theta_w_star = 0.2394``
* ``mz_star_GeV`` is fixed so that ``(mz/mz_star)**2 - 1 = 0.0880``

The weak charge entering the tabulated PNC matrix elements uses a separate
``sin2_theta_w = 0.23``.

Overrides can be read from a plain ``key = value`` file (``#`` comments),
using the field names of :class:`ConstantsSet` as keys.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from scipy import constants as _sc

#: environment variable naming a constants override file
CONSTANTS_ENV_VAR = "HCI_PNC_CONSTANTS"

_CODATA = _sc.physical_constants

DEFAULT_SIN2_STAR = 0.2394
DEFAULT_DELTA_P_M = 0.0880
DEFAULT_MZ_GEV = 91.1876
DEFAULT_SIN2_PNC = 0.23


@dataclass(frozen=True)
class ConstantsSet:
    """Immutable bundle of constants.

    Attributes
    ----------
    alpha : float
        Fine-structure constant.
    electron_mass_eV : float
        Electron rest energy (eV).
    hbar_c_eV_fm : float
        hbar*c in eV fm.
    fermi_constant : float
        G_F in GeV^-2.
    mz_GeV : float
        Z-boson mass at the pole (GeV).
    mz_star_GeV : float
        Z-boson mass scaled to q^2 = 0 (GeV).
    sin2_theta_w_star : float
        sin^2 of the Weinberg angle at q^2 = 0.
    sin2_theta_w : float
        sin^2 used in the weak charge of the PNC matrix element.
    """

    alpha: float = _CODATA["fine-structure constant"][0]
    electron_mass_eV: float = _CODATA["electron mass energy equivalent in MeV"][0] * 1e6
    hbar_c_eV_fm: float = _CODATA["reduced Planck constant times c in MeV fm"][0] * 1e6
    fermi_constant: float = _CODATA["Fermi coupling constant"][0]
    mz_GeV: float = DEFAULT_MZ_GEV
    mz_star_GeV: float = DEFAULT_MZ_GEV / math.sqrt(1.0 + DEFAULT_DELTA_P_M)
    sin2_theta_w_star: float = DEFAULT_SIN2_STAR
    sin2_theta_w: float = DEFAULT_SIN2_PNC

    def __post_init__(self):
        if not (1 / 138 < self.alpha < 1 / 137):
            raise ValueError(f"alpha out of range: {self.alpha}")
        if not (0.0 < self.sin2_theta_w_star < 0.25):
            raise ValueError(f"sin2_theta_w_star must be in (0, 0.25): {self.sin2_theta_w_star}")
        if not (0.0 < self.sin2_theta_w <= 0.25):
            raise ValueError(f"sin2_theta_w must be in (0, 0.25]: {self.sin2_theta_w}")
        for name in ("electron_mass_eV", "hbar_c_eV_fm", "fermi_constant", "mz_GeV", "mz_star_GeV"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def eta(self) -> float:
        """Vector coupling suppression 1 - 4 s^2."""
        return 1.0 - 4.0 * self.sin2_theta_w_star

    @property
    def cos2_theta_w_star(self) -> float:
        return 1.0 - self.sin2_theta_w_star

    @property
    def compton_fm(self) -> float:
        """Reduced electron Compton wavelength hbar/(m c) in fm."""
        return self.hbar_c_eV_fm / self.electron_mass_eV

    @property
    def hartree_eV(self) -> float:
        return self.alpha**2 * self.electron_mass_eV

    def with_overrides(self, **kw) -> "ConstantsSet":
        return replace(self, **kw)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def default_constants() -> ConstantsSet:
    return ConstantsSet()


def load_constants(path: str | os.PathLike | None = None) -> ConstantsSet:
    """Defaults, overridden from ``path`` or from ``$HCI_PNC_CONSTANTS``."""
    if path is None:
        path = os.environ.get(CONSTANTS_ENV_VAR) or None
    if path is None:
        return default_constants()
    known = {f.name for f in fields(ConstantsSet)}
    overrides: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown constant {key!r}")
        overrides[key] = float(value)
    return replace(default_constants(), **overrides)


ENERGY_UNITS = ("eV", "natural", "hartree")


def _eV_per_unit(unit: str, consts: ConstantsSet) -> float:
    if unit == "eV":
        return 1.0
    if unit == "natural":
        return consts.electron_mass_eV
    if unit == "hartree":
        return consts.hartree_eV
    raise ValueError(f"unknown energy unit {unit!r}; expected one of {ENERGY_UNITS}")


def convert_energy(
    value: float, from_unit: str, to_unit: str, consts: ConstantsSet | None = None
) -> float:
    """Convert an energy between ``eV``, ``natural`` (m_e = 1) and ``hartree``."""
    consts = consts or default_constants()
    a = _eV_per_unit(from_unit, consts)
    b = _eV_per_unit(to_unit, consts)
    if from_unit == to_unit:
        return value
    return value * a / b
