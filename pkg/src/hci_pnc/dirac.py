"""Bound states of the radial Dirac equation on an exponential grid.

Convention: ``psi = (1/r) (g Omega_kappa, i f Omega_-kappa)`` with

    dg/dr = -(kappa/r) g + (E + m - V) f / (hbar c)
    df/dr = +(kappa/r) f - (E - m - V) g / (hbar c)

and ``integral (g^2 + f^2) dr = 1``; ``g > 0`` next to the origin.

Internally the solver works in electron units (lengths in hbar/mc, energies
in mc^2) and in ``t = ln r``, where the system reads ``y' = A(t) y``. It is
marched with an implicit k-step Adams-Moulton rule (exact 2x2 solve per
step): outward from a power-series start, inward from an exponential tail,
matched at the outer classical turning point. The energy is refined with the
first-order correction ``dE = g(rc) [f_out(rc) - f_in(rc)] / N`` inside a
node-count bracket.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import ConstantsSet
from .nucleus import NuclearModel
from .numerics import RadialGrid, adams_moulton_coefficients, integrate_on_grid, make_anchored_grid, make_grid

try:
    from numba import njit
except Exception:  # pragma: no cover
    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap if not (args and callable(args[0])) else args[0]

logger = logging.getLogger(__name__)

AM_STEPS = 8
SERIES_TERMS = 16
DEFAULT_POINTS = 4000
#: decay lengths (1/lambda) between the origin and r_max
DEFAULT_DECAY_SPAN = 50.0
#: r_min as a fraction of the nuclear radius
DEFAULT_RMIN_FRACTION = 1e-4
BOUNDARY_THRESHOLD = 1e-12
#: decay lengths past the turning point where the inward march starts
INWARD_DECAY = 60.0


class DiracSolverError(RuntimeError):
    """The eigenvalue search failed."""


class GridTooSmallError(DiracSolverError):
    """The solution has not decayed at the end of the grid."""


@dataclass(frozen=True, eq=False)
class DiracState:
    """A normalized bound state.

    Attributes
    ----------
    n, kappa : int
        Principal and relativistic angular quantum numbers.
    energy_eV : float
        Total energy including the rest mass.
    binding_eV : float
        ``energy_eV - m c^2`` (negative), stored separately to keep its digits.
    g, f : np.ndarray
        Large and small radial components (fm^-1/2) on ``grid``.
    """

    n: int
    kappa: int
    energy_eV: float
    binding_eV: float
    g: np.ndarray = field(repr=False)
    f: np.ndarray = field(repr=False)
    grid: RadialGrid = field(repr=False)
    match_index: int = field(default=-1, repr=False)
    iterations: int = field(default=0, repr=False)

    @property
    def ell(self) -> int:
        return orbital_l(self.kappa)

    @property
    def label(self) -> str:
        return state_label(self.n, self.kappa)

    def node_count(self) -> int:
        return _count_nodes(self.g)


def orbital_l(kappa: int) -> int:
    if kappa == 0:
        raise ValueError("kappa must be nonzero")
    return kappa if kappa > 0 else -kappa - 1


def state_label(n: int, kappa: int) -> str:
    ell = orbital_l(kappa)
    j2 = 2 * abs(kappa) - 1
    return f"{n}{'spdfgh'[ell]}{j2}/2"


def _check_quantum_numbers(n: int, kappa: int) -> None:
    if n < 1 or kappa == 0 or abs(kappa) > n or (kappa == n):
        raise ValueError(f"invalid state n={n}, kappa={kappa}")


def sommerfeld_energy(Z: int, n: int, kappa: int, consts: ConstantsSet, binding: bool = False) -> float:
    """Dirac-Coulomb (point nucleus) energy in eV.

    Returns the total energy, or ``E - m c^2`` when ``binding`` is true.
    """
    _check_quantum_numbers(n, kappa)
    za = Z * consts.alpha
    if za >= 1.0:
        raise ValueError(f"alpha*Z = {za} >= 1: no point-Coulomb solution")
    k = abs(kappa)
    gamma = math.sqrt(k * k - za * za)
    # n - |kappa| + gamma, written to avoid cancellation for small Z
    denom = (n - k) + k - za * za / (gamma + k)
    q = (za / denom) ** 2
    w = math.expm1(-0.5 * math.log1p(q))
    m = consts.electron_mass_eV
    return m * w if binding else m * (1.0 + w)


def default_grid(
    model: NuclearModel,
    n_max: int = 2,
    points: int = DEFAULT_POINTS,
    r_max_fm: float | None = None,
) -> RadialGrid:
    """Exponential grid suited to states up to ``n_max`` of ``model``.

    For an extended nucleus the surface is a node and ``r_min`` is at most
    ``1e-4 R``; ``r_max`` spans ~50 decay lengths of the ``n_max`` state.
    """
    lam_c = model.consts.compton_fm
    if r_max_fm is None:
        decay = n_max / model.z_alpha * lam_c
        r_max_fm = DEFAULT_DECAY_SPAN * decay * (1.0 + 0.05 * n_max)
    if model.is_point:
        r_min = 1e-6 * lam_c / model.Z
        return make_grid(r_min, r_max_fm, points)
    R = model.radius_fm
    return make_anchored_grid(R, DEFAULT_RMIN_FRACTION * R, r_max_fm, points)


# ---------------------------------------------------------------------------
# marching kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def _march(a12, a21, kappa, h, g, f, start, stop, betas):
    """Adams-Moulton march filling g, f from ``start`` to ``stop`` (inclusive).

    Values at ``start-k+1 .. start`` must be present. Works in either
    direction: pass reversed arrays and ``-h`` for the inward march.
    """
    k = len(betas) - 1
    n = len(g)
    Fg = np.zeros(n)
    Ff = np.zeros(n)
    for i in range(start - k + 1, start + 1):
        Fg[i] = -kappa * g[i] + a12[i] * f[i]
        Ff[i] = a21[i] * g[i] + kappa * f[i]
    hb0 = h * betas[0]
    for i in range(start, stop):
        rg = g[i]
        rf = f[i]
        for j in range(1, k + 1):
            rg += h * betas[j] * Fg[i + 1 - j]
            rf += h * betas[j] * Ff[i + 1 - j]
        m11 = 1.0 + hb0 * kappa
        m12 = -hb0 * a12[i + 1]
        m21 = -hb0 * a21[i + 1]
        m22 = 1.0 - hb0 * kappa
        det = m11 * m22 - m12 * m21
        gn = (m22 * rg - m12 * rf) / det
        fn = (m11 * rf - m21 * rg) / det
        g[i + 1] = gn
        f[i + 1] = fn
        Fg[i + 1] = -kappa * gn + a12[i + 1] * fn
        Ff[i + 1] = a21[i + 1] * gn + kappa * fn
        # keep the inward march in range; only ratios matter
        if abs(gn) > 1e200:
            for q in range(i - k + 1, i + 2):
                g[q] *= 1e-200
                f[q] *= 1e-200
                Fg[q] *= 1e-200
                Ff[q] *= 1e-200
    return g, f


def _count_nodes(g: np.ndarray) -> int:
    s = np.sign(g[g != 0.0])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _series_start(kappa: int, W: float, coeffs: dict[int, float], x: np.ndarray):
    """Regular solution near the origin for ``r V(r) = sum c_j r^j`` (electron units)."""
    c0 = coeffs.get(0, 0.0)
    s = math.sqrt(kappa * kappa - c0 * c0)
    K = SERIES_TERMS
    a = np.zeros(K)
    b = np.zeros(K)
    if c0 != 0.0:
        a[0] = 1.0
        b[0] = (s + kappa) / (-c0)
    elif kappa < 0:
        a[0] = 1.0
    else:
        b[0] = 1.0
    E1p = W + 2.0  # E + m
    E1m = W  # E - m
    for k in range(1, K):
        rhs_a = E1p * b[k - 1]
        rhs_b = -E1m * a[k - 1]
        for j, cj in coeffs.items():
            if j >= 1 and k - j >= 0:
                rhs_a -= cj * b[k - j]
                rhs_b += cj * a[k - j]
        m11, m12 = s + k + kappa, c0
        m21, m22 = -c0, s + k - kappa
        det = m11 * m22 - m12 * m21
        a[k] = (m22 * rhs_a - m12 * rhs_b) / det
        b[k] = (m11 * rhs_b - m21 * rhs_a) / det
    xs = x[:, None] ** np.arange(K)[None, :]
    pref = x**s
    return pref * (xs @ a), pref * (xs @ b)


class _Problem:
    """Fixed (grid, potential, kappa) data for repeated shooting."""

    def __init__(self, model: NuclearModel, grid: RadialGrid, extra_eV, kappa: int, steps: int):
        c = model.consts
        self.m = c.electron_mass_eV
        self.lam = c.compton_fm
        self.x = grid.points / self.lam
        V = np.asarray(model.coulomb_potential(grid.points), dtype=float)
        if extra_eV is not None:
            extra = np.asarray(extra_eV, dtype=float)
            if extra.shape != V.shape:
                raise ValueError("extra potential must be sampled on the solver grid")
            V = V + extra
        self.V = V / self.m
        self.kappa = float(kappa)
        self.h = grid.h
        self.grid = grid
        self.coeffs = model.r_times_potential_series(self.lam)
        self.betas = np.array(adams_moulton_coefficients(steps))
        self.k = steps

    def matrices(self, W: float):
        x = self.x
        return x * (W + 2.0 - self.V), -x * (W - self.V)

    def match_index(self, W: float) -> int:
        allowed = np.nonzero(W - self.V > 0.0)[0]
        n = len(self.x)
        lo, hi = 4 * self.k, n - 4 * self.k - 1
        ic = int(allowed[-1]) if len(allowed) else lo
        return min(max(ic, lo), hi)

    def outward(self, W: float, stop: int):
        a12, a21 = self.matrices(W)
        n = len(self.x)
        g = np.zeros(n)
        f = np.zeros(n)
        k = self.k
        g0, f0 = _series_start(int(self.kappa), W, self.coeffs, self.x[:k])
        g[:k], f[:k] = g0, f0
        _march(a12, a21, self.kappa, self.h, g, f, k - 1, stop, self.betas)
        return g, f

    def inward(self, W: float, stop: int):
        """Inward solution from a point ``INWARD_DECAY`` decay lengths past ``stop``.

        Beyond that point the solution is continued with its exponential tail.
        """
        a12, a21 = self.matrices(W)
        n = len(self.x)
        k = self.k
        E = 1.0 + W
        lam = math.sqrt(max(-W * (2.0 + W), 1e-300))
        far = np.nonzero(lam * (self.x - self.x[stop]) >= INWARD_DECAY)[0]
        i_inf = int(far[0]) if len(far) else n - 1
        i_inf = min(max(i_inf, stop + 2 * k), n - 1)
        tail = np.exp(-lam * (self.x - self.x[i_inf]))
        g = np.zeros(n)
        f = np.zeros(n)
        g[i_inf - k + 1 :] = tail[i_inf - k + 1 :]
        f[i_inf - k + 1 :] = -lam / (1.0 + E) * tail[i_inf - k + 1 :]
        m = i_inf + 1
        gr = g[:m][::-1].copy()
        fr = f[:m][::-1].copy()
        _march(a12[:m][::-1].copy(), a21[:m][::-1].copy(), self.kappa, -self.h, gr, fr, k - 1, m - 1 - stop, self.betas)
        g[:m] = gr[::-1]
        f[:m] = fr[::-1]
        # rescale the analytic tail to join the (possibly rescaled) march
        if i_inf < n - 1:
            ratio = g[i_inf] / tail[i_inf]
            g[i_inf + 1 :] = ratio * tail[i_inf + 1 :]
            f[i_inf + 1 :] = -lam / (1.0 + E) * ratio * tail[i_inf + 1 :]
        return g, f


def solve_bound_state(
    model: NuclearModel,
    n: int,
    kappa: int,
    grid: RadialGrid | None = None,
    extra_potential=None,
    energy_guess_eV: float | None = None,
    tol: float = 1e-12,
    max_iter: int = 200,
    steps: int = AM_STEPS,
    check_boundary: bool = True,
) -> DiracState:
    """Solve for the ``(n, kappa)`` bound state of ``model``.

    Parameters
    ----------
    model : NuclearModel
    n, kappa : int
        Quantum numbers (``kappa=-1`` for s1/2, ``+1`` for p1/2, ...).
    grid : RadialGrid, optional
        Defaults to :func:`default_grid` for ``model``.
    extra_potential : array or object with ``values``, optional
        Additional electron potential energy (eV) sampled on ``grid``,
        e.g. a :class:`~hci_pnc.uehling.UehlingTable`.
    energy_guess_eV : float, optional
        Initial total energy; the point-Coulomb value by default.
    tol : float
        Convergence on the energy correction, relative to the binding energy.

    Raises
    ------
    DiracSolverError
        No eigenvalue found with the right node count.
    GridTooSmallError
        The converged state has not decayed by ``r_max``.
    """
    _check_quantum_numbers(n, kappa)
    if grid is None:
        grid = default_grid(model, n_max=n)
    if extra_potential is not None and hasattr(extra_potential, "values"):
        if hasattr(extra_potential, "grid") and not extra_potential.grid.same_as(grid):
            raise ValueError("extra potential table lives on a different grid")
        extra_potential = extra_potential.values
    prob = _Problem(model, grid, extra_potential, kappa, steps)
    target_nodes = n - orbital_l(kappa) - 1

    m = prob.m
    if energy_guess_eV is not None:
        W = (energy_guess_eV - m) / m
    elif model.z_alpha < 1.0:
        W = sommerfeld_energy(model.Z, n, kappa, model.consts, binding=True) / m
    else:
        W = -0.5
    W_lo, W_hi = max(-1.0, float(prob.V.min())), 0.0
    if not W_lo < W < W_hi:
        W = 0.5 * (W_lo + W_hi)

    g = f = None
    ic = -1
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        ic = prob.match_index(W)
        g_out, f_out = prob.outward(W, ic)
        nodes = _count_nodes(g_out[: ic + 1])
        if nodes != target_nodes:
            if nodes > target_nodes:
                W_hi = W
            else:
                W_lo = W
            W = 0.5 * (W_lo + W_hi)
            continue
        g_in, f_in = prob.inward(W, ic)
        if g_in[ic] == 0.0 or g_out[ic] == 0.0:
            W = 0.5 * (W_lo + W_hi)
            continue
        scale = g_out[ic] / g_in[ic]
        g = np.concatenate([g_out[: ic + 1], scale * g_in[ic + 1 :]])
        f = np.concatenate([f_out[: ic + 1], scale * f_in[ic + 1 :]])
        norm = integrate_on_grid(g * g + f * f, grid).value
        # radial integrals carry dr = lambda_C dx
        norm_x = norm / prob.lam
        dW = g[ic] * (f_out[ic] - scale * f_in[ic]) / norm_x
        if dW > 0:
            W_lo = max(W_lo, W)
        else:
            W_hi = min(W_hi, W)
        if abs(dW) <= tol * abs(W):
            converged = True
            break
        # damp steps that would more than halve or double the binding
        if abs(dW) > 0.5 * abs(W):
            dW = math.copysign(0.5 * abs(W), dW)
        W_new = W + dW
        W = W_new if W_lo < W_new < W_hi else 0.5 * (W_lo + W_hi)
        if W_hi - W_lo <= 1e-15 * abs(W):
            converged = True
            break
    if not converged or g is None:
        if ic >= len(grid) - 4 * steps - 1:
            raise GridTooSmallError(
                f"{state_label(n, kappa)} for Z={model.Z}: turning point lies beyond "
                f"r_max={grid.r_max:.4g} fm; increase r_max"
            )
        raise DiracSolverError(
            f"no converged {state_label(n, kappa)} eigenvalue for Z={model.Z} after {it} iterations"
        )

    norm = integrate_on_grid(g * g + f * f, grid).value
    c = 1.0 / math.sqrt(norm)
    if g[0] < 0:
        c = -c
    g = g * c
    f = f * c
    if check_boundary:
        edge = max(abs(g[-1]) / np.abs(g).max(), abs(f[-1]) / np.abs(f).max())
        if edge > BOUNDARY_THRESHOLD:
            raise GridTooSmallError(
                f"{state_label(n, kappa)} for Z={model.Z} has relative amplitude {edge:.2e} "
                f"at r_max={grid.r_max:.4g} fm; increase r_max"
            )
    g.setflags(write=False)
    f.setflags(write=False)
    return DiracState(
        n=n,
        kappa=kappa,
        energy_eV=m * (1.0 + W),
        binding_eV=m * W,
        g=g,
        f=f,
        grid=grid,
        match_index=ic,
        iterations=it,
    )
