"""PNC matrix elements between ns1/2 and n'p1/2 states and their Uehling correction.

The radial reduction of the contact operator ``A_PNC gamma_5 rho(r)`` with
``psi = (1/r)(g Omega_kappa, i f Omega_-kappa)`` gives

    M = A_PNC * int rho(r) [g_s f_p - f_s g_p] dr

reported as a real number carrying the sign of ``A_PNC`` times the radial
integral. The Uehling correction is obtained by solving both states again
with the Uehling potential added to the nuclear one and forming
``delta = M_uehling / M_plain - 1``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .constants import ConstantsSet, default_constants
from .dirac import DEFAULT_POINTS, DiracSolverError, DiracState, default_grid, solve_bound_state
from .electroweak import WeakChargeReport, weak_charge_report
from .nucleus import NuclearModel
from .numerics import RadialGrid, integrate_on_grid
from .uehling import UEHLING_MODELS, UehlingTable, uehling_on_grid

NEUTRON_RULES = ("weight", "rounded")

#: (Z, A, R in fm) for the 21 tabulated hydrogenlike ions
DEFAULT_ISOTOPES: tuple[tuple[int, float, float], ...] = (
    (1, 1.007, 1.212),
    (2, 4.001, 1.921),
    (3, 6.939, 2.307),
    (4, 9.010, 2.517),
    (5, 10.807, 2.675),
    (6, 12.007, 2.770),
    (7, 14.002, 2.916),
    (8, 15.995, 3.048),
    (9, 18.994, 3.228),
    (10, 20.173, 3.293),
    (20, 40.069, 4.140),
    (30, 65.363, 4.874),
    (40, 91.198, 5.446),
    (50, 118.662, 5.945),
    (60, 144.207, 6.345),
    (70, 173.001, 6.742),
    (80, 200.546, 7.082),
    (82, 207.155, 7.159),
    (90, 231.989, 7.434),
    (92, 234.993, 7.466),
    (92, 238.000, 7.498),
)

TABLE1_COLUMNS = ("Z", "A", "R_fm", "PNC_eV", "PNC_Uehling_eV", "delta_loop_wf")
TABLE2_COLUMNS = ("Z", "A", "R_fm", "delta_loop_wf")


class PncError(RuntimeError):
    """A PNC computation failed; the message names the ion."""


@dataclass(frozen=True)
class PncSettings:
    """Numerical and convention choices for the PNC pipeline.

    Attributes
    ----------
    grid_points : int
        Nodes of the shared radial grid.
    r_max_fm : float, optional
        Grid cutoff; chosen from the binding of the outermost state if omitted.
    uehling_model : str
        ``"uniform"`` folds the Uehling kernel with the homogeneous nuclear
        charge, ``"point"`` uses the point-charge formula.
    neutron_rule : str
        ``"weight"`` takes ``N = A - Z`` in the weak charge, ``"rounded"``
        takes ``round(A) - Z``.
    """

    grid_points: int = DEFAULT_POINTS
    r_max_fm: float | None = None
    uehling_model: str = "uniform"
    neutron_rule: str = "weight"

    def __post_init__(self):
        if self.grid_points < 16:
            raise ValueError("grid_points must be at least 16")
        if self.r_max_fm is not None and not self.r_max_fm > 0:
            raise ValueError("r_max_fm must be positive")
        if self.uehling_model not in UEHLING_MODELS:
            raise ValueError(f"uehling_model must be one of {UEHLING_MODELS}")
        if self.neutron_rule not in NEUTRON_RULES:
            raise ValueError(f"neutron_rule must be one of {NEUTRON_RULES}")


@dataclass(frozen=True)
class PncResult:
    """Matrix elements (eV) without and with the Uehling potential."""

    Z: int
    A: float
    R_fm: float
    n: int
    n_prime: int
    m_plain_eV: float
    m_uehling_eV: float
    delta_loop_wf: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TableRow:
    """One isotope of a table sweep; ``result`` is ``None`` when it failed."""

    Z: int
    A: float
    R_fm: float
    result: PncResult | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.result is not None


@dataclass(frozen=True)
class PncTable:
    rows: tuple[TableRow, ...] = field(default_factory=tuple)
    columns: tuple[str, ...] = TABLE1_COLUMNS

    @property
    def errors(self) -> list[TableRow]:
        return [r for r in self.rows if not r.ok]

    def __len__(self) -> int:
        return len(self.rows)


# ---------------------------------------------------------------------------
# matrix element
# ---------------------------------------------------------------------------

def weak_report_for(model: NuclearModel, settings: PncSettings | None = None) -> WeakChargeReport:
    """Weak charge of ``model`` with the PNC conventions of ``settings``."""
    settings = settings or PncSettings()
    N = model.neutron_excess_weight if settings.neutron_rule == "weight" else model.N
    return weak_charge_report(model.Z, N, model.consts, s2=model.consts.sin2_theta_w)


def radial_pnc_integral(s_state: DiracState, p_state: DiracState, model: NuclearModel) -> float:
    """``int rho (g_s f_p - f_s g_p) dr`` in fm^-3 over the nuclear volume.

    Swapping the two states flips the sign.
    """
    if model.is_point:
        raise ValueError(
            "the contact integral diverges for a point nucleus; use a finite-size model"
        )
    grid = s_state.grid
    if not grid.same_as(p_state.grid):
        raise ValueError("states live on different grids")
    stop = grid.index_of(model.radius_fm, rtol=1e-10)
    r = grid.points[: stop + 1]
    # the surface node belongs to the interior branch of the density
    rho = np.full_like(r, 3.0 / (4.0 * math.pi * model.radius_fm**3))
    integrand = rho * (
        s_state.g[: stop + 1] * p_state.f[: stop + 1] - s_state.f[: stop + 1] * p_state.g[: stop + 1]
    )
    sub = RadialGrid(points=r, h=grid.h)
    return integrate_on_grid(integrand, sub).value


def pnc_matrix_element(
    s_state: DiracState,
    p_state: DiracState,
    model: NuclearModel,
    ew: WeakChargeReport | None = None,
) -> float:
    """PNC matrix element in eV.

    Parameters
    ----------
    s_state, p_state : DiracState
        ``kappa = -1`` and ``kappa = +1`` states on one grid whose nodes include
        the nuclear radius.
    model : NuclearModel
        Uniform-sphere nucleus supplying the weak density.
    ew : WeakChargeReport, optional
        Defaults to :func:`weak_report_for` ``(model)``.
    """
    if s_state.kappa != -1 or p_state.kappa != 1:
        raise ValueError("need an s1/2 (kappa=-1) and a p1/2 (kappa=+1) state")
    ew = ew or weak_report_for(model)
    return ew.a_pnc_bouchiat * radial_pnc_integral(s_state, p_state, model)


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class _Setup:
    model: NuclearModel
    grid: RadialGrid
    uehling: UehlingTable
    n: int
    n_prime: int


def _setup(
    Z: int,
    A: float,
    n: int,
    n_prime: int,
    consts: ConstantsSet | None,
    radius_fm: float | None,
    settings: PncSettings,
) -> _Setup:
    consts = consts or default_constants()
    if n < 1 or n_prime < 2:
        raise ValueError("need n >= 1 for the s state and n' >= 2 for the p state")
    model = NuclearModel(Z, A, shape="uniform", radius_fm=radius_fm, consts=consts)
    grid = default_grid(model, n_max=max(n, n_prime), points=settings.grid_points, r_max_fm=settings.r_max_fm)
    table = uehling_on_grid(Z, grid, consts, model=settings.uehling_model, radius_fm=model.radius_fm)
    return _Setup(model, grid, table, n, n_prime)


def _integral_at(setup: _Setup, lam: float, guesses=(None, None)) -> tuple[float, tuple[float, float]]:
    extra = None if lam == 0.0 else setup.uehling.scaled(lam)
    try:
        s = solve_bound_state(setup.model, setup.n, -1, setup.grid, extra, energy_guess_eV=guesses[0])
        p = solve_bound_state(setup.model, setup.n_prime, 1, setup.grid, extra, energy_guess_eV=guesses[1])
    except DiracSolverError as exc:
        raise PncError(f"Z={setup.model.Z}, A={setup.model.A}, lambda={lam}: {exc}") from exc
    return radial_pnc_integral(s, p, setup.model), (s.energy_eV, p.energy_eV)


def compute_pnc_with_corrections(
    Z: int,
    A: float,
    n: int = 2,
    n_prime: int = 2,
    consts: ConstantsSet | None = None,
    radius_fm: float | None = None,
    settings: PncSettings | None = None,
) -> PncResult:
    """Matrix elements with and without the Uehling potential for one ion.

    ``radius_fm`` defaults to ``1.2 A^(1/3)`` fm.

    Raises
    ------
    PncError
        A bound state could not be found; the message names the ion.
    """
    settings = settings or PncSettings()
    setup = _setup(Z, A, n, n_prime, consts, radius_fm, settings)
    i0, guesses = _integral_at(setup, 0.0)
    iu, _ = _integral_at(setup, 1.0, guesses)
    a_pnc = weak_report_for(setup.model, settings).a_pnc_bouchiat
    m0, mu = a_pnc * i0, a_pnc * iu
    return PncResult(
        Z=Z,
        A=A,
        R_fm=setup.model.radius_fm,
        n=n,
        n_prime=n_prime,
        m_plain_eV=m0,
        m_uehling_eV=mu,
        delta_loop_wf=mu / m0 - 1.0,
    )


def delta_at_strength(
    Z: int,
    A: float,
    lam: float,
    n: int = 2,
    n_prime: int = 2,
    consts: ConstantsSet | None = None,
    radius_fm: float | None = None,
    settings: PncSettings | None = None,
) -> float:
    """``M(lam)/M(0) - 1`` with the Uehling potential scaled by ``lam``."""
    setup = _setup(Z, A, n, n_prime, consts, radius_fm, settings or PncSettings())
    i0, guesses = _integral_at(setup, 0.0)
    il, _ = _integral_at(setup, lam, guesses)
    return il / i0 - 1.0


def perturbative_cross_check(
    Z: int,
    A: float,
    lambda_step: float = 1e-3,
    n: int = 2,
    n_prime: int = 2,
    consts: ConstantsSet | None = None,
    radius_fm: float | None = None,
    settings: PncSettings | None = None,
    rtol: float = 1e-3,
) -> float:
    """First-order Uehling correction ``(dM/d lam)/M`` at ``lam = 0``.

    Central differences at steps ``h`` and ``h/2`` are combined by Richardson
    extrapolation.

    Raises
    ------
    PncError
        The extrapolated value differs from the finer difference by more
        than ``rtol`` (relative).
    """
    if not lambda_step > 0:
        raise ValueError("lambda_step must be positive")
    setup = _setup(Z, A, n, n_prime, consts, radius_fm, settings or PncSettings())
    i0, guesses = _integral_at(setup, 0.0)

    def central(h: float) -> float:
        ip, _ = _integral_at(setup, h, guesses)
        im, _ = _integral_at(setup, -h, guesses)
        return (ip - im) / (2.0 * h * i0)

    d1 = central(lambda_step)
    d2 = central(0.5 * lambda_step)
    extrap = (4.0 * d2 - d1) / 3.0
    if not math.isfinite(extrap) or abs(extrap - d2) > rtol * abs(extrap):
        raise PncError(
            f"Richardson extrapolation did not converge for Z={Z}: "
            f"D(h)={d1:.6e}, D(h/2)={d2:.6e}"
        )
    return extrap


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

def _row_job(args) -> TableRow:
    Z, A, R, consts, settings = args
    try:
        res = compute_pnc_with_corrections(Z, A, 2, 2, consts, R, settings)
    except (PncError, ValueError, ArithmeticError) as exc:
        return TableRow(Z, A, R if R is not None else float("nan"), None, str(exc))
    return TableRow(Z, A, res.R_fm, res)


def _sweep(isotopes, consts, settings, workers, columns) -> PncTable:
    consts = consts or default_constants()
    settings = settings or PncSettings()
    jobs = []
    for iso in isotopes:
        Z, A = int(iso[0]), float(iso[1])
        R = float(iso[2]) if len(iso) > 2 and iso[2] is not None else None
        jobs.append((Z, A, R, consts, settings))
    if workers and workers > 1 and len(jobs) > 1:
        # map keeps input order
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row_job, jobs))
    else:
        rows = [_row_job(j) for j in jobs]
    return PncTable(rows=tuple(rows), columns=columns)


def generate_table1(
    isotopes: Iterable[Sequence] = DEFAULT_ISOTOPES,
    consts: ConstantsSet | None = None,
    settings: PncSettings | None = None,
    workers: int = 1,
) -> PncTable:
    """Matrix elements for ``(Z, A[, R_fm])`` entries at ``n = n' = 2``.

    Failed rows are kept with their error message.
    """
    return _sweep(isotopes, consts, settings, workers, TABLE1_COLUMNS)


def generate_table2(
    isotopes: Iterable[Sequence] = DEFAULT_ISOTOPES,
    consts: ConstantsSet | None = None,
    settings: PncSettings | None = None,
    workers: int = 1,
) -> PncTable:
    """Same sweep as :func:`generate_table1`, reporting only the Uehling correction."""
    return _sweep(isotopes, consts, settings, workers, TABLE2_COLUMNS)


def _fmt(x: float) -> str:
    return "nan" if not math.isfinite(x) else f"{x:.10e}"


def _row_values(row: TableRow) -> dict:
    res = row.result
    nan = float("nan")
    return {
        "Z": row.Z,
        "A": row.A,
        "R_fm": row.R_fm,
        "PNC_eV": res.m_plain_eV if res else nan,
        "PNC_Uehling_eV": res.m_uehling_eV if res else nan,
        "delta_loop_wf": res.delta_loop_wf if res else nan,
    }


def table_to_csv(table: PncTable) -> str:
    """CSV text with the columns of ``table``; failed rows print ``nan``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        vals = _row_values(row)
        out = []
        for c in table.columns:
            v = vals[c]
            out.append(str(v) if c == "Z" else (f"{v:.3f}" if c in ("A", "R_fm") else _fmt(v)))
        w.writerow(out)
    return buf.getvalue()


def _clean(x):
    return None if isinstance(x, float) and not math.isfinite(x) else x


def table_to_json(table: PncTable) -> str:
    """JSON list; successful rows carry the :class:`PncResult` fields."""
    out = []
    for row in table.rows:
        if row.ok:
            d = row.result.as_dict()
            if table.columns == TABLE2_COLUMNS:
                d = {k: d[k] for k in ("Z", "A", "R_fm", "n", "n_prime", "delta_loop_wf")}
        else:
            d = {"Z": row.Z, "A": row.A, "R_fm": _clean(row.R_fm), "error": row.error}
        out.append(d)
    return json.dumps(out, indent=2, sort_keys=False)


def result_table(result: PncResult) -> PncTable:
    """Wrap a single result for the table writers."""
    return PncTable(rows=(TableRow(result.Z, result.A, result.R_fm, result),), columns=TABLE1_COLUMNS)

