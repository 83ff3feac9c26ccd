import dataclasses
import io
import json
import math

import pytest

import buildopt as bo
from buildopt.materials import CATALOG_HEADER
from conftest import make_assignment


@pytest.fixture(scope="module")
def scenario():
    return bo.load_scenario({})


def test_enumeration_count_full(scenario):
    # 8 walls x 8 foundations x 2 roofs x 2 covers x 19 slice counts
    # x 2 eccentricity branches x 2 aspect branches
    assert len(bo.enumerate_discrete(scenario)) == 8 * 8 * 2 * 2 * 19 * 4


def test_enumeration_count_singleton():
    doc = CATALOG_HEADER + (
        "\nW,G1,wall,1000,10,1.0,2.0,0.3"
        "\nR,n/a,roof,1000,10,1.0,,"
        "\nC,n/a,roof_cover,1000,10,1.0,,\n"
    )
    cat = bo.load_catalog(io.StringIO(doc))
    sc = bo.ScenarioConfig(catalog=cat)
    assert len(bo.enumerate_discrete(sc)) == 1 * 19 * 4  # 76


def test_enumeration_rules():
    sc = bo.load_scenario({
        "rules": {"fix_wall_material": "Br2", "link_brick_grades": True},
    })
    out = bo.enumerate_discrete(sc)
    # the Br1 foundation is excluded by grade linking; 7 remain
    assert len(out) == 1 * 7 * 2 * 2 * 19 * 4
    assert all(a.wall.name == "Br2" for a in out)
    assert all(a.foundation.name != "Br1" for a in out)


def test_scenario_loader_validation(tmp_path):
    with pytest.raises(ValueError, match="unknown scenario sections"):
        bo.load_scenario({"budget": 1})
    with pytest.raises(ValueError, match="unknown rules"):
        bo.load_scenario({"rules": {"paint_it_green": True}})
    with pytest.raises(bo.CatalogError):
        bo.load_scenario({"exclude_materials": ["NotAMaterial"]})
    doc = {"exclude_materials": ["So1"], "param_overrides": {"B_fo": 0.81},
           "solver": {"starts": 8}}
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc))
    sc = bo.load_scenario(path)
    assert sc.params.b_fo == 0.81
    assert sc.solver.starts == 8
    assert "So1" not in sc.catalog.names


def test_fingerprint_sensitivity(scenario):
    base = scenario.fingerprint()
    assert base == bo.load_scenario({}).fingerprint()
    assert bo.load_scenario(
        {"param_overrides": {"B_fo": 0.81}}).fingerprint() != base
    assert bo.load_scenario(
        {"exclude_materials": ["So2"]}).fingerprint() != base


def test_lower_bounds_are_safe(scenario):
    # wherever a bound exists, a solved cheapest point must respect it
    eng = bo.Enumerator(scenario, workers=1, executor="serial")
    checked = 0
    for a in eng.assignments():
        if a.key[:4] != ("Br2", "Br2", "Wo", "Pl") or a.n_slc not in (7, 8):
            continue
        lb = eng.bounds(a)
        if lb is None:
            continue
        sol = eng.min_cost_anchor(a)
        if sol.feasible:
            assert sol.cost >= lb[0] - 1e-6
            assert sol.ee >= lb[1] - 1e-6
            checked += 1
    assert checked >= 2


def test_box_pruning_matches_probe(scenario):
    # candidates rejected by the closed-form screens really are infeasible
    p = scenario.params
    cat = scenario.catalog
    stone = make_assignment(cat, "St2", "Br2", "Wo", "Pl", n_slc=7)
    assert bo.objective_lower_bounds(p, stone) is None
    assert not bo.feasibility_probe(p, stone)
    soil_fo = make_assignment(cat, "So2", "So2", "Wo", "Pl", n_slc=7)
    assert bo.objective_lower_bounds(p, soil_fo) is None
    assert not bo.feasibility_probe(p, soil_fo)


def test_budget_pruning_bound(scenario):
    # at an absurd budget everything is pruned by the cost bound alone
    eng = bo.Enumerator(scenario, workers=1, executor="serial")
    assert eng.solve_minlp(budget=100.0) is None
    assert len(eng._cache) == 0  # nothing was dispatched
    for a in eng.assignments()[:50]:
        lb = eng.bounds(a)
        if lb is not None:
            assert lb[0] > 100.0


def test_design_closure_and_verify(scenario):
    eng = bo.Enumerator(scenario, workers=1, executor="serial")
    d = eng.solve_minlp(budget=5000.0)
    assert d is not None
    # stored cost and EE equal re-evaluation from the stored state exactly
    assert bo.cost(scenario.params, d.assign, d.state) == d.cost
    assert bo.embodied_energy(scenario.params, d.assign, d.state) / 1000 == d.ee
    assert eng.verify(d)
    assert d.provenance.starts == scenario.solver.starts
    eng.close()


def test_parallel_serial_equivalence(scenario):
    serial = bo.Enumerator(scenario, workers=1, executor="serial")
    threaded = bo.Enumerator(scenario, workers=4, executor="thread")
    d1 = serial.solve_minlp(budget=5200.0)
    d2 = threaded.solve_minlp(budget=5200.0)
    threaded.close()
    assert d1 is not None and d2 is not None
    assert d1.assign.key == d2.assign.key
    assert d1.point == d2.point
    assert d1.cost == d2.cost and d1.ee == d2.ee


def test_budget_monotonicity(scenario):
    eng = bo.Enumerator(scenario)
    values = [eng.solve_minlp(budget=b).ee for b in (5000.0, 6500.0, 8300.0)]
    eng.close()
    assert values[0] >= values[1] * (1 - 1e-6)
    assert values[1] >= values[2] * (1 - 1e-6)


def test_available_budget_parameter_caps_unbounded_solves():
    doc = {"exclude_materials": ["St1", "St2", "Br1", "Co1", "Co2", "So1",
                                 "So2"],
           "solver": {"starts": 8, "iters_per_stage": 40}}
    open_ended = bo.Enumerator(bo.load_scenario(doc), workers=1,
                               executor="serial")
    capped_doc = dict(doc, param_overrides={"B_avail": 5200.0})
    capped = bo.Enumerator(bo.load_scenario(capped_doc), workers=1,
                           executor="serial")
    d_open = open_ended.solve_minlp(budget=None)
    d_capped = capped.solve_minlp(budget=None)
    assert d_capped.cost <= 5200.0
    # the uncapped optimum costs more than the configured budget allows
    assert d_open.cost > 5200.0
    assert d_capped.ee >= d_open.ee


def test_exhaustive_rebar_mode():
    sc = bo.load_scenario({"rules": {"exhaustive_n_re": True,
                                     "fix_wall_material": "Br2"}})
    counts = {a.n_re for a in bo.enumerate_discrete(sc)}
    assert min(counts) == 2
    assert max(counts) > 2
    # the spacing rule caps the rebar count that can fit the thickest wall
    p = sc.params
    n_max = max(counts)
    assert n_max * p.d_re + (n_max - 1) * p.s_re_min <= p.t_wa_max
