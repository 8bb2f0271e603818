import csv
import io
import json
import math

import pytest

from hci_pnc.constants import default_constants
from hci_pnc.dirac import default_grid, solve_bound_state
from hci_pnc.nucleus import NuclearModel
from hci_pnc.pnc import (
    TABLE1_COLUMNS,
    TABLE2_COLUMNS,
    PncSettings,
    compute_pnc_with_corrections,
    delta_at_strength,
    generate_table1,
    generate_table2,
    perturbative_cross_check,
    pnc_matrix_element,
    radial_pnc_integral,
    result_table,
    table_to_csv,
    table_to_json,
    weak_report_for,
)


@pytest.fixture(scope="module")
def u92_states():
    m = NuclearModel(92, 238.0, radius_fm=7.498)
    grid = default_grid(m)
    s = solve_bound_state(m, 2, -1, grid)
    p = solve_bound_state(m, 2, 1, grid)
    return m, grid, s, p


def test_matrix_element_uranium(u92_states):
    m, _, s, p = u92_states
    assert abs(pnc_matrix_element(s, p, m)) == pytest.approx(4.2496e-6, rel=0.02)


def test_matrix_element_neon():
    res = compute_pnc_with_corrections(10, 20.173, radius_fm=3.293)
    assert abs(res.m_plain_eV) == pytest.approx(2.638e-12, rel=0.02)


def test_antisymmetry(u92_states):
    m, _, s, p = u92_states
    assert radial_pnc_integral(p, s, m) == -radial_pnc_integral(s, p, m)


def test_matrix_element_input_checks(u92_states):
    m, grid, s, p = u92_states
    with pytest.raises(ValueError):
        pnc_matrix_element(p, s, m)
    other = solve_bound_state(m, 2, 1, default_grid(m, points=3000))
    with pytest.raises(ValueError):
        pnc_matrix_element(s, other, m)
    point = NuclearModel(92, 238.0, shape="point")
    with pytest.raises(ValueError):
        radial_pnc_integral(s, p, point)


def test_hydrogen_sign_follows_weak_charge():
    res = compute_pnc_with_corrections(1, 1.007, radius_fm=1.212)
    m = NuclearModel(1, 1.007, radius_fm=1.212)
    assert weak_report_for(m).q_w > 0
    assert res.m_plain_eV > 0


def test_larger_sphere_dilutes_contact_density(u92_states):
    m, _, s, p = u92_states
    big = NuclearModel(92, 238.0, radius_fm=2 * 7.498)
    grid = default_grid(big)
    s2 = solve_bound_state(big, 2, -1, grid)
    p2 = solve_bound_state(big, 2, 1, grid)
    assert abs(pnc_matrix_element(s2, p2, big)) < abs(pnc_matrix_element(s, p, m))


def test_delta_examples():
    r1 = compute_pnc_with_corrections(1, 1.007, radius_fm=1.212)
    assert r1.delta_loop_wf == pytest.approx(1.528e-5, rel=0.03)
    assert abs(r1.m_uehling_eV) > abs(r1.m_plain_eV)
    r92 = compute_pnc_with_corrections(92, 238.0, radius_fm=7.498)
    assert r92.delta_loop_wf == pytest.approx(1.225e-2, rel=0.02)


def test_delta_independent_of_weak_coupling():
    c = default_constants()
    a = compute_pnc_with_corrections(20, 40.069, consts=c, radius_fm=4.140)
    b = compute_pnc_with_corrections(20, 40.069, consts=c.with_overrides(fermi_constant=3e-5), radius_fm=4.140)
    assert b.m_plain_eV / a.m_plain_eV == pytest.approx(3e-5 / c.fermi_constant, rel=1e-14)
    assert b.delta_loop_wf == pytest.approx(a.delta_loop_wf, rel=1e-12)


def test_rmax_doubling_stable():
    base = compute_pnc_with_corrections(50, 118.662, radius_fm=5.945)
    rmax = default_grid(NuclearModel(50, 118.662, radius_fm=5.945)).r_max
    wide = compute_pnc_with_corrections(
        50, 118.662, radius_fm=5.945, settings=PncSettings(grid_points=8000, r_max_fm=2 * rmax)
    )
    assert wide.delta_loop_wf == pytest.approx(base.delta_loop_wf, rel=1e-3)


def test_point_uehling_option_overestimates():
    uni = compute_pnc_with_corrections(92, 238.0, radius_fm=7.498)
    pt = compute_pnc_with_corrections(92, 238.0, radius_fm=7.498, settings=PncSettings(uehling_model="point"))
    assert pt.delta_loop_wf > uni.delta_loop_wf


def test_perturbative_first_order():
    d1 = perturbative_cross_check(1, 1.007, radius_fm=1.212)
    assert d1 == pytest.approx(1.53e-5, rel=0.05)
    assert abs(delta_at_strength(1, 1.007, 0.0, radius_fm=1.212)) < 1e-12


def test_settings_validation():
    for kw in ({"grid_points": 8}, {"r_max_fm": -1.0}, {"uehling_model": "x"}, {"neutron_rule": "x"}):
        with pytest.raises(ValueError):
            PncSettings(**kw)
    with pytest.raises(ValueError):
        compute_pnc_with_corrections(10, 20.0, n=2, n_prime=1)


def test_empty_and_failing_rows():
    assert len(generate_table1([])) == 0
    assert table_to_csv(generate_table2([])) == ",".join(TABLE2_COLUMNS) + "\n"
    tab = generate_table1([(10, 3.0), (2, 4.001, 1.921)])
    assert not tab.rows[0].ok and "negative" in tab.rows[0].error
    assert tab.rows[1].ok
    assert len(tab.errors) == 1
    rows = list(csv.reader(io.StringIO(table_to_csv(tab))))
    assert rows[1][3] == "nan"
    doc = json.loads(table_to_json(tab))
    assert "error" in doc[0] and doc[1]["delta_loop_wf"] > 0


def test_output_formats_and_determinism():
    res = compute_pnc_with_corrections(6, 12.007, radius_fm=2.770)
    again = compute_pnc_with_corrections(6, 12.007, radius_fm=2.770)
    t1, t2 = result_table(res), result_table(again)
    assert table_to_csv(t1) == table_to_csv(t2)
    lines = table_to_csv(t1).splitlines()
    assert lines[0] == ",".join(TABLE1_COLUMNS)
    assert lines[1].startswith("6,12.007,2.770,")
    doc = json.loads(table_to_json(t1))[0]
    assert set(doc) == set(res.as_dict())
    assert doc["R_fm"] == 2.770


def test_table_rows_in_input_order():
    isos = [(3, 6.939, 2.307), (2, 4.001, 1.921)]
    tab = generate_table2(isos, workers=2)
    assert [r.Z for r in tab.rows] == [3, 2]
    assert tab.columns == TABLE2_COLUMNS
    assert math.isfinite(tab.rows[0].result.delta_loop_wf)
