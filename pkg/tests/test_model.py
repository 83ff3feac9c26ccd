import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import buildopt as bo
from conftest import make_assignment


def test_param_defaults_and_derived(params):
    assert params.c_d == pytest.approx(0.352)
    assert params.m_wa == pytest.approx(2.5)
    # the seismic coefficient is always recomputed from its factors
    bumped = dataclasses.replace(params, seismic_k=8.0)
    assert bumped.c_d == pytest.approx(0.704)


def test_param_validation():
    with pytest.raises(ValueError):
        bo.BuildingParams(l_fl_min=5.0, l_fl_max=4.5)
    with pytest.raises(ValueError):
        bo.BuildingParams(b_fo=-1.0)


def test_apply_overrides(params):
    p2 = bo.apply_overrides(params, {"B_fo": 0.81, "n_rm": 4})
    assert p2.b_fo == 0.81
    assert p2.n_rm == 4
    with pytest.raises(KeyError, match="unknown parameter key"):
        bo.apply_overrides(params, {"B_FO": 1.0})


def test_parse_param_overrides():
    text = "# comment\nB_fo=0.81\n  P_L = 2500  # trailing\n\n"
    assert bo.parse_param_overrides(text) == {"B_fo": 0.81, "P_L": 2500.0}
    with pytest.raises(KeyError):
        bo.parse_param_overrides("nope=1")
    with pytest.raises(ValueError):
        bo.parse_param_overrides("B_fo")


def test_derived_state_reference_values(catalog, params):
    # hand-checked values for a square brick room
    a = make_assignment(catalog, "Br2", "Br2", "Wo", "Pl", n_slc=7)
    pt = bo.ContinuousPoint(t_wa=0.23, h_wa=2.7, l_x_fl=3.2, l_y_fl=3.2,
                            t_fo=0.23, w_do=1.1, l_wi=0.7)
    st_ = bo.derive_state(params, a, pt)
    assert st_.l_x_wa == pytest.approx(3.66)
    assert st_.a_wa_x == pytest.approx(0.8418, abs=1e-4)
    assert st_.s_x == pytest.approx(0.5135, abs=1e-4)
    # 0.23 * (2*2.7*(3.2+3.66) - (1.1*2 + 0.49))
    assert st_.v_wa == pytest.approx(7.901, abs=1e-3)
    # 0.0253*3.66 + 2*0.0065*hypot(0.4027*1.83, 1.83)
    assert st_.v_slc == pytest.approx(0.1182, abs=1e-4)
    assert st_.geometry_ok


def test_zero_thickness_annihilates_wall_terms(catalog, params):
    a = make_assignment(catalog)
    pt = bo.ContinuousPoint(t_wa=0.0, h_wa=2.7, l_x_fl=3.2, l_y_fl=3.2,
                            t_fo=0.23, w_do=1.1, l_wi=0.7)
    st_ = bo.derive_state(params, a, pt)
    assert st_.v_wa == 0.0
    assert st_.a_wa_x == 0.0
    assert st_.s_x == 0.0


def test_oversized_openings_flagged_not_raised(catalog, params):
    a = make_assignment(catalog)
    pt = bo.ContinuousPoint(t_wa=0.23, h_wa=2.7, l_x_fl=2.0, l_y_fl=2.0,
                            t_fo=0.23, w_do=12.0, l_wi=2.0)
    st_ = bo.derive_state(params, a, pt)
    assert st_.v_wa < 0
    assert not st_.geometry_ok


def test_derive_state_deterministic(catalog, params, feasible_case):
    a, pt = feasible_case
    assert bo.derive_state(params, a, pt) == bo.derive_state(params, a, pt)


_points = st.builds(
    bo.ContinuousPoint,
    t_wa=st.floats(0.23, 1.1),
    h_wa=st.floats(2.7, 3.8),
    l_x_fl=st.floats(2.0, 4.5),
    l_y_fl=st.floats(2.0, 4.5),
    t_fo=st.floats(0.23, 0.4),
    w_do=st.floats(1.1, 3.0),
    l_wi=st.floats(0.7, 1.9),
)


@settings(max_examples=200, deadline=None)
@given(pt=_points, n_slc=st.integers(2, 20))
def test_algebraic_identities(pt, n_slc):
    params = bo.BuildingParams()
    catalog = bo.default_catalog()
    a = make_assignment(catalog, "So2", "Br2", "Wo", "Pl", n_slc=n_slc)
    st_ = bo.derive_state(params, a, pt)
    n = params.n_rm
    assert st_.l_x_wa == pytest.approx(pt.l_x_fl + 2 * pt.t_wa, rel=1e-14)
    assert st_.f_e == pytest.approx(0.5 * st_.f_1, rel=1e-14)
    assert st_.v_co_tot == pytest.approx(params.r_co * st_.v_slc_tot, rel=1e-14)
    assert st_.e == pytest.approx(
        0.5 * (params.b_fo - 2 * pt.t_fo - pt.t_wa), abs=1e-14)
    assert st_.v_wa_tot == pytest.approx(
        n * st_.v_wa - (n - 1) * pt.t_wa * pt.h_wa * st_.l_x_wa, rel=1e-12)
    assert st_.a_fo == pytest.approx(
        params.b_fo * params.h_fo - 2 * pt.t_fo * (params.h_fo - pt.t_fo),
        rel=1e-14)


def _zero_state(pt):
    fields = {f.name: 0.0 for f in dataclasses.fields(bo.DerivedState)
              if f.name not in ("point", "geometry_ok")}
    return bo.DerivedState(point=pt, geometry_ok=True, **fields)


def test_cost_and_ee_zero_building(catalog, params):
    a = make_assignment(catalog, "So2")
    pt = bo.ContinuousPoint(0.3, 2.7, 3.2, 3.2, 0.23, 1.1, 0.7)
    zero = _zero_state(pt)
    assert bo.cost(params, a, zero) == 0.0
    assert bo.embodied_energy(params, a, zero) == 0.0


def test_cost_single_terms(catalog, params):
    a = make_assignment(catalog, wall="So2")
    pt = bo.ContinuousPoint(0.3, 2.7, 3.2, 3.2, 0.23, 1.1, 0.7)
    walls_only = dataclasses.replace(_zero_state(pt), v_wa_tot=10.0)
    assert bo.cost(params, a, walls_only) == pytest.approx(1450.0)   # 10 * 145
    assert bo.embodied_energy(params, a, walls_only) == pytest.approx(
        10 * 1330 * 0.67)  # 8,911 MJ
    rebar_only = dataclasses.replace(_zero_state(pt), l_re_tot=10.0)
    assert bo.cost(params, a, rebar_only) == pytest.approx(173.0)    # 10 * 17.3
    assert bo.embodied_energy(params, a, rebar_only) == pytest.approx(
        10 * 0.89 * 37.95)  # 337.8 MJ


def test_unused_material_price_independence(catalog, params, feasible_case):
    a, pt = feasible_case
    st_ = bo.derive_state(params, a, pt)
    base_cost = bo.cost(params, a, st_)
    base_ee = bo.embodied_energy(params, a, st_)
    # repricing a material the design does not use changes nothing
    entries = []
    for m in catalog.entries:
        if m.name == "Co1":
            m = dataclasses.replace(m, unit_cost=9999.0, embodied_energy=99.0)
        entries.append(m)
    repriced = bo.MaterialCatalog(entries=tuple(entries))
    a2 = make_assignment(repriced, "So2", "Br2", "Wo", "Pl", n_slc=8, x_wa=1)
    st2 = bo.derive_state(params, a2, pt)
    assert bo.cost(params, a2, st2) == base_cost
    assert bo.embodied_energy(params, a2, st2) == base_ee


def test_residuals_fixture_feasible(params, feasible_case):
    a, pt = feasible_case
    st_ = bo.derive_state(params, a, pt)
    rv = bo.constraint_residuals(params, a, st_)
    assert rv.max_relative <= 1e-6
    assert bo.is_feasible(rv)
    # every group is represented
    assert {"bounds", "roof", "floor_area", "wall_stress_x", "wall_stress_y",
            "foundation", "openings"} == set(rv.groups)
    assert len([g for g in rv.groups if g == "wall_stress_x"]) == 6
    assert len([g for g in rv.groups if g == "wall_stress_y"]) == 6


def test_relaxed_shear_limit_gives_negative_shear_residuals(catalog,
                                                            feasible_case):
    a, pt = feasible_case
    relaxed = bo.BuildingParams(tau_allw=1e6)
    st_ = bo.derive_state(relaxed, a, pt)
    rv = bo.constraint_residuals(relaxed, a, st_)
    shear = [v for i, v in rv.as_dict().items() if "shear" in i]
    assert all(v < 0 for v in shear)


def test_square_brick_point_violates_y_tension(catalog, params):
    # a thin-walled square plan fails bending tension on the y wall
    a = make_assignment(catalog, "Br2", "Br2", "Wo", "Pl", n_slc=7)
    pt = bo.ContinuousPoint(0.23, 2.7, 3.2, 3.2, 0.23, 1.1, 0.7)
    rv = bo.constraint_residuals(params, a, bo.derive_state(params, a, pt))
    assert rv.max_relative > 0
    assert rv.worst_group() == "wall_stress_y"


def test_branch_consistency_residuals(catalog, params, feasible_case):
    a, pt = feasible_case
    st_ = bo.derive_state(params, a, pt)
    # the fixture rides e = 0 on the low-eccentricity branch
    assert st_.e == pytest.approx(0.0, abs=1e-12)
    high = dataclasses.replace(a, x_e=1)
    rv = bo.constraint_residuals(params, high, st_)
    assert rv.as_dict()["fo_ecc_lo"] > 0  # e >= b/6 fails on this point
    flipped = dataclasses.replace(a, x_wa=0)  # claims l_y <= l_x, but y is longer
    rv2 = bo.constraint_residuals(params, flipped, st_)
    assert rv2.as_dict()["aspect_branch"] > 0


def test_is_feasible_boundary_convention():
    rv = bo.ResidualVector(
        ids=("a", "b"), groups=("bounds", "bounds"),
        values=np.array([-1.0, 0.0]), scales=np.array([1.0, 1.0]))
    assert bo.is_feasible(rv)
    exactly_tol = bo.ResidualVector(
        ids=("a",), groups=("bounds",),
        values=np.array([1e-6]), scales=np.array([1.0]))
    assert bo.is_feasible(exactly_tol, tol=1e-6)      # closed tolerance
    over = bo.ResidualVector(
        ids=("a",), groups=("bounds",),
        values=np.array([1e-5]), scales=np.array([1.0]))
    assert not bo.is_feasible(over, tol=1e-6)
    with pytest.raises(ValueError):
        bo.is_feasible(rv, tol=0.0)


def test_stress_scales_are_limits_in_pascal(catalog, params, feasible_case):
    a, pt = feasible_case
    rv = bo.constraint_residuals(params, a, bo.derive_state(params, a, pt))
    scale = dict(zip(rv.ids, rv.scales))
    assert scale["wall_x_shear_wind"] == pytest.approx(0.5e6)
    assert scale["wall_x_ten_wind"] == pytest.approx(0.12e6)
    assert scale["wall_x_comp_wind"] == pytest.approx(
        a.wall.compressive_strength * 1e6)
    assert scale["floor_area"] == pytest.approx(params.a_fl_min)
