"""Tree-level weak charge, Sandars parameters and radiative-correction bookkeeping.

Energies-times-volumes (the PNC coupling constants) are returned in eV fm^3,
obtained from natural-unit values in GeV^-2 with ``(hbar c)^3``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Mapping

from .constants import ConstantsSet, default_constants
from .numerics import integrate_adaptive

# GeV^-2 -> eV^-2
_PER_GEV2_TO_PER_EV2 = 1e-18


def _check_s2(s2: float) -> None:
    if not 0.0 < s2 <= 0.25:
        raise ValueError(f"sin^2(theta_W) must be in (0, 0.25], got {s2!r}")


def weak_charge(Z: int, N: float, s2: float) -> float:
    """Tree-level nuclear weak charge ``-N + Z (1 - 4 s2)``."""
    if Z < 1 or N < 0:
        raise ValueError("need Z >= 1 and N >= 0")
    _check_s2(s2)
    return -N + Z * (1.0 - 4.0 * s2)


def p_w(Z: int, N: float, s2: float) -> float:
    """Sandars parameter ``Q_W / (s2 (1 - s2))``."""
    return weak_charge(Z, N, s2) / (s2 * (1.0 - s2))


def p_w_tilde(Z: int, N: float, s2: float) -> float:
    """``-(3 / 16N) P_W``, close to one for heavy nuclei."""
    if N <= 0:
        raise ValueError("p_w_tilde is undefined for N = 0")
    return -3.0 / (16.0 * N) * p_w(Z, N, s2)


def delta_p_m(mz: float, mz_star: float) -> float:
    """Oblique correction ``(M_Z / M_Z*)^2 - 1``."""
    if not (mz > 0 and mz_star > 0):
        raise ValueError("masses must be positive")
    return (mz / mz_star) ** 2 - 1.0


def a_pnc_bouchiat(q_w: float, consts: ConstantsSet) -> float:
    """``G_F Q_W / (2 sqrt 2)`` in eV fm^3."""
    gf = consts.fermi_constant * _PER_GEV2_TO_PER_EV2 * consts.hbar_c_eV_fm**3
    return gf * q_w / (2.0 * math.sqrt(2.0))


def a_pnc_sandars(pw: float, consts: ConstantsSet) -> float:
    """``pi alpha P_W / (4 M_Z*^2)`` in eV fm^3 (Z mass at zero momentum transfer)."""
    inv_mz2 = _PER_GEV2_TO_PER_EV2 / consts.mz_star_GeV**2 * consts.hbar_c_eV_fm**3
    return math.pi * consts.alpha * pw * inv_mz2 / 4.0


@dataclass(frozen=True)
class WeakChargeReport:
    Z: int
    N: float
    s2: float
    q_w: float
    p_w: float
    p_w_tilde: float
    a_pnc_bouchiat: float
    a_pnc_sandars: float
    delta_p_m: float

    def as_dict(self) -> dict:
        return asdict(self)


def weak_charge_report(
    Z: int, N: float, consts: ConstantsSet | None = None, s2: float | None = None
) -> WeakChargeReport:
    """All tree-level quantities for one nucleus.

    ``s2`` defaults to ``consts.sin2_theta_w_star``, the set in which the
    two forms of A_PNC coincide.
    """
    consts = consts or default_constants()
    s2 = consts.sin2_theta_w_star if s2 is None else s2
    q = weak_charge(Z, N, s2)
    pw = p_w(Z, N, s2)
    return WeakChargeReport(
        Z=Z,
        N=N,
        s2=s2,
        q_w=q,
        p_w=pw,
        p_w_tilde=p_w_tilde(Z, N, s2) if N > 0 else float("nan"),
        a_pnc_bouchiat=a_pnc_bouchiat(q, consts),
        a_pnc_sandars=a_pnc_sandars(pw, consts),
        delta_p_m=delta_p_m(consts.mz_GeV, consts.mz_star_GeV),
    )


def pi_r(q2_over_me2: float, rtol: float = 1e-10) -> float:
    """Renormalized polarization integral for spacelike momentum transfer.

    Returns ``I = int_0^1 x(1-x) ln[1 + a x(1-x)] dx`` with ``a = -q^2/m^2 >= 0``.
    """
    a = float(q2_over_me2)
    if a < 0:
        raise ValueError("timelike momentum transfer (negative argument) is not supported")
    if a == 0.0:
        return 0.0

    def integrand(x: float) -> float:
        u = x * (1.0 - x)
        return u * math.log1p(a * u)

    # symmetric about x = 1/2
    return 2.0 * integrate_adaptive(integrand, 0.0, 0.5, rtol=rtol, atol=1e-300).value


def delta_loop_op_estimate(Z: int, N: float, consts: ConstantsSet | None = None) -> float:
    """Low-field size of the electron-loop correction to the PNC operator."""
    consts = consts or default_constants()
    if N < 1:
        raise ValueError("need N >= 1")
    a = consts.alpha
    return (1.0 / (15.0 * math.pi)) * (-Z / N) * consts.eta * a * (a * Z) ** 2


def delta_loop_wf_estimate(Z: int, consts: ConstantsSet | None = None) -> float:
    """Low-field size ``alpha (alpha Z)^2`` of the wave-function loop correction."""
    consts = consts or default_constants()
    if Z < 1:
        raise ValueError("need Z >= 1")
    a = consts.alpha
    return a * (a * Z) ** 2


def f_rad(F_sf: float, F_lf: float, F0: float) -> float:
    """Strong-field to low-field ratio ``(F_sf - F0) / (F_lf - F0)``."""
    if F_lf == F0:
        raise ZeroDivisionError("f_rad undefined: low-field value equals the tree-level value")
    return (F_sf - F0) / (F_lf - F0)


def assemble_delta_rad(
    delta_wf: float = 0.0,
    terms: Mapping[str, tuple[float, float]] | None = None,
) -> float:
    """Field-dependent radiative correction to the Sandars parameter.

    ``terms`` maps a label (``"loop-op"``, ``"anapole"``, ``"vertex"``) to a
    pair ``(delta_P, f_rad)``; each contributes ``delta_P (f_rad - 1)``.
    Absent terms contribute nothing. ``delta_wf`` is added as is.
    """
    total = float(delta_wf)
    for delta, f in (terms or {}).values():
        total += delta * (f - 1.0)
    return total
