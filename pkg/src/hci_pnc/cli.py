"""Command-line driver.

Exit status: 0 success, 1 usage error, 2 invalid input, 3 numerical failure.
Errors are printed to stderr as a JSON object ``{"error": ..., "kind": ...}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__
from .constants import CONSTANTS_ENV_VAR, ConstantsSet, load_constants
from .dirac import DEFAULT_POINTS, DiracSolverError, default_grid, solve_bound_state
from .electroweak import weak_charge_report
from .nucleus import NuclearModel
from .numerics import QuadratureError
from .pnc import (
    DEFAULT_ISOTOPES,
    PncError,
    PncSettings,
    compute_pnc_with_corrections,
    generate_table1,
    generate_table2,
    result_table,
    table_to_csv,
    table_to_json,
    weak_report_for,
)
from .uehling import UEHLING_MODELS, uehling_on_grid

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser, ion: bool = True) -> None:
    if ion:
        p.add_argument("--Z", type=int, help="nuclear charge (proton number)")
        p.add_argument("--A", type=float, help="atomic weight in u; sets R = 1.2 A^(1/3) fm")
        p.add_argument("--radius", type=float, metavar="FM", help="nuclear radius in fm (overrides the A rule)")
    p.add_argument("--grid-points", type=int, default=DEFAULT_POINTS, help=f"radial grid nodes (default {DEFAULT_POINTS})")
    p.add_argument("--rmax", type=float, metavar="FM", help="outer grid radius in fm (default: 50 decay lengths)")
    p.add_argument(
        "--constants-file",
        metavar="PATH",
        help=f"key = value constants overrides (default: ${CONSTANTS_ENV_VAR} if set)",
    )
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default csv)")
    p.add_argument("--out", metavar="PATH", help="output file (default stdout)")


def _pnc_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--uehling-model",
        choices=UEHLING_MODELS,
        default="uniform",
        help="Uehling source: uniform-sphere nuclear charge or point charge (default uniform)",
    )
    p.add_argument(
        "--neutron-rule",
        choices=("weight", "rounded"),
        default="weight",
        help="neutron number in Q_W: A - Z (weight) or round(A) - Z (default weight)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hci-pnc",
        description=(
            "PNC matrix elements <ns1/2|H_PNC|n'p1/2> for hydrogenlike ions, with and without "
            "the Uehling potential. Energies in eV, lengths in fm."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="bound state (r [fm], g, f [fm^-1/2]) on the radial grid")
    _common(p)
    p.add_argument("--n", type=int, default=1, help="principal quantum number (default 1)")
    p.add_argument("--kappa", type=int, default=-1, choices=(-1, 1), help="-1 for s1/2, +1 for p1/2")
    p.add_argument("--shape", choices=("uniform", "point"), default="uniform", help="nuclear charge shape")
    p.add_argument("--with-uehling", action="store_true", help="add the Uehling potential")
    p.add_argument("--uehling-model", choices=UEHLING_MODELS, default="uniform", help="see pnc")

    p = sub.add_parser("uehling", help="Uehling potential (r [fm], V_U [eV]) on the radial grid")
    _common(p)
    p.add_argument(
        "--uehling-model",
        choices=UEHLING_MODELS,
        default="point",
        help="point-charge formula or uniform-sphere folding (default point)",
    )

    p = sub.add_parser("pnc", help="matrix elements [eV] and delta for one ion")
    _common(p)
    p.add_argument("--n", type=int, default=2, help="principal quantum number of the s1/2 state (default 2)")
    p.add_argument("--nprime", type=int, default=2, help="principal quantum number of the p1/2 state (default 2)")
    _pnc_opts(p)

    for name, text in (
        ("table1", "matrix elements [eV] for the built-in 21-ion list"),
        ("table2", "Uehling correction delta for the built-in 21-ion list"),
    ):
        p = sub.add_parser(name, help=text)
        _common(p, ion=False)
        _pnc_opts(p)
        p.add_argument("--workers", type=int, default=1, help="parallel worker processes (default 1)")

    p = sub.add_parser("constants", help="constants set and weak-charge report (JSON)")
    p.add_argument("--Z", type=int, help="nuclear charge")
    p.add_argument("--A", type=float, help="atomic weight in u")
    p.add_argument("--constants-file", metavar="PATH", help="key = value constants overrides")
    p.add_argument("--format", choices=("json",), default="json", help="output format (json only)")
    p.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    return parser


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _need_ion(args) -> None:
    if args.Z is None:
        raise ValueError("--Z is required")
    if args.A is None:
        raise ValueError("--A is required")


def _settings(args) -> PncSettings:
    return PncSettings(
        grid_points=args.grid_points,
        r_max_fm=args.rmax,
        uehling_model=getattr(args, "uehling_model", "uniform"),
        neutron_rule=getattr(args, "neutron_rule", "weight"),
    )


def _columns_csv(header, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow([f"{v:.10e}" for v in row])
    return buf.getvalue()


def _cmd_solve(args, consts: ConstantsSet) -> tuple[str, int]:
    _need_ion(args)
    model = NuclearModel(args.Z, args.A, shape=args.shape, radius_fm=args.radius, consts=consts)
    grid = default_grid(model, n_max=args.n, points=args.grid_points, r_max_fm=args.rmax)
    extra = None
    if args.with_uehling:
        extra = uehling_on_grid(args.Z, grid, consts, args.uehling_model, model.radius_fm)
    st = solve_bound_state(model, args.n, args.kappa, grid, extra)
    r = grid.points
    if args.format == "csv":
        return _columns_csv(("r_fm", "g", "f"), (r, st.g, st.f)), EXIT_OK
    doc = {
        "Z": args.Z,
        "A": args.A,
        "n": st.n,
        "kappa": st.kappa,
        "energy_eV": st.energy_eV,
        "binding_eV": st.binding_eV,
        "r_fm": r.tolist(),
        "g": st.g.tolist(),
        "f": st.f.tolist(),
    }
    return json.dumps(doc), EXIT_OK


def _cmd_uehling(args, consts: ConstantsSet) -> tuple[str, int]:
    _need_ion(args)
    model = NuclearModel(args.Z, args.A, radius_fm=args.radius, consts=consts)
    grid = default_grid(model, n_max=2, points=args.grid_points, r_max_fm=args.rmax)
    table = uehling_on_grid(args.Z, grid, consts, args.uehling_model, model.radius_fm)
    if args.format == "csv":
        return _columns_csv(("r_fm", "V_U_eV"), (grid.points, table.values)), EXIT_OK
    doc = {"Z": args.Z, "model": args.uehling_model, "r_fm": grid.points.tolist(), "V_U_eV": table.values.tolist()}
    return json.dumps(doc), EXIT_OK


def _cmd_pnc(args, consts: ConstantsSet) -> tuple[str, int]:
    _need_ion(args)
    res = compute_pnc_with_corrections(
        args.Z, args.A, args.n, args.nprime, consts, args.radius, _settings(args)
    )
    table = result_table(res)
    if args.format == "csv":
        return table_to_csv(table), EXIT_OK
    return json.dumps(res.as_dict(), indent=2), EXIT_OK


def _cmd_table(args, consts: ConstantsSet) -> tuple[str, int]:
    gen = generate_table1 if args.command == "table1" else generate_table2
    table = gen(DEFAULT_ISOTOPES, consts, _settings(args), workers=args.workers)
    text = table_to_csv(table) if args.format == "csv" else table_to_json(table)
    if table.errors:
        for row in table.errors:
            _emit_error(f"Z={row.Z}, A={row.A}: {row.error}", "numeric")
        return text, EXIT_NUMERIC
    return text, EXIT_OK


def _cmd_constants(args, consts: ConstantsSet) -> tuple[str, int]:
    doc = {
        "constants": consts.as_dict(),
        "derived": {
            "eta": consts.eta,
            "compton_fm": consts.compton_fm,
            "hartree_eV": consts.hartree_eV,
            "delta_p_m": (consts.mz_GeV / consts.mz_star_GeV) ** 2 - 1.0,
        },
    }
    if args.Z is not None or args.A is not None:
        _need_ion(args)
        model = NuclearModel(args.Z, args.A, consts=consts)
        doc["weak_charge_report"] = weak_charge_report(model.Z, model.N, consts).as_dict()
        doc["pnc_weak_charge_report"] = weak_report_for(model).as_dict()
    return json.dumps(doc, indent=2), EXIT_OK


_COMMANDS = {
    "solve": _cmd_solve,
    "uehling": _cmd_uehling,
    "pnc": _cmd_pnc,
    "table1": _cmd_table,
    "table2": _cmd_table,
    "constants": _cmd_constants,
}


def _emit_error(message: str, kind: str) -> None:
    print(json.dumps({"error": message, "kind": kind}), file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        _emit_error(str(exc), "usage")
        return EXIT_USAGE
    try:
        consts = load_constants(getattr(args, "constants_file", None))
        text, code = _COMMANDS[args.command](args, consts)
    except (DiracSolverError, PncError, QuadratureError, ArithmeticError) as exc:
        _emit_error(str(exc), "numeric")
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        _emit_error(str(exc), "input")
        return EXIT_INPUT
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
