"""Global search over the discrete design space.

The mixed-integer problem is solved by exhausting the discrete choices
(material tuple, roof slice count, the two branch bits) and dispatching a
continuous subproblem for each survivor.  Three safe screens keep the
dispatch count small:

* box/slab consistency: a candidate whose variable box cannot intersect the
  roof-span slab or the eccentricity branch interval is infeasible outright;
* a budget screen from closed-form volume lower bounds (conservative by
  construction, so a pruned candidate is provably over budget);
* an incumbent screen from the same bounds on embodied energy.

Candidates are processed in deterministic key order and in fixed-size
batches, so results are identical whether solves run serially or on a
worker pool.  Solutions are cached per assignment (and per budget for
budget-bound solves) to make repeated sweeps cheap.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from .materials import (
    ComponentClass,
    MaterialCatalog,
    default_catalog,
    filter_available,
    load_catalog,
    serialize_catalog,
)
from .model import (
    BuildingParams,
    ContinuousPoint,
    DerivedState,
    DiscreteAssignment,
    apply_overrides,
    constraint_residuals,
    cost as eval_cost,
    derive_state,
    embodied_energy as eval_ee,
    is_feasible,
)
from .nlp import (
    ContinuousProblem,
    Objective,
    SideConstraint,
    SolverConfig,
    problem_box,
    solve_continuous,
)
from .serialize import canonical_json, sha_fingerprint

ENGINE_VERSION = "compass-penalty/0.1"

_BATCH = 64  # incumbent updates happen on batch boundaries only


@dataclass(frozen=True)
class ScenarioRules:
    """Optional restrictions on the discrete space."""

    link_brick_grades: bool = False   # same-family wall+foundation share a grade
    fix_wall_material: str | None = None
    exhaustive_n_re: bool = False     # search rebar count instead of fixing it

    def as_dict(self) -> dict:
        return {
            "link_brick_grades": self.link_brick_grades,
            "fix_wall_material": self.fix_wall_material,
            "exhaustive_n_re": self.exhaustive_n_re,
        }


@dataclass(frozen=True)
class ScenarioConfig:
    catalog: MaterialCatalog
    params: BuildingParams = BuildingParams()
    rules: ScenarioRules = ScenarioRules()
    solver: SolverConfig = SolverConfig()

    def __post_init__(self) -> None:
        if self.rules.fix_wall_material is not None:
            self.catalog.get(ComponentClass.WALL, self.rules.fix_wall_material)

    def fingerprint(self) -> str:
        payload = {
            "catalog": serialize_catalog(self.catalog),
            "params": {k: getattr(self.params, k)
                       for k in self.params.__dataclass_fields__},
            "rules": self.rules.as_dict(),
            "solver": {
                "starts": self.solver.starts,
                "tol": self.solver.tol,
                "seed": self.solver.seed,
                "iters_per_stage": self.solver.iters_per_stage,
                "penalty_stages": self.solver.penalty_stages,
            },
        }
        return sha_fingerprint(canonical_json(payload))


def load_scenario(source: str | Path | dict) -> ScenarioConfig:
    """Build a scenario from its JSON document (path or already-parsed dict).

    Sections: ``catalog_path`` (default: bundled catalog),
    ``exclude_materials``, ``param_overrides``, ``rules``, ``solver``.
    """
    if isinstance(source, dict):
        doc = source
        base = Path(".")
    else:
        path = Path(source)
        doc = json.loads(path.read_text(encoding="utf-8"))
        base = path.parent
    known = {"catalog_path", "exclude_materials", "param_overrides", "rules",
             "solver"}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown scenario sections: {sorted(unknown)}")

    if doc.get("catalog_path"):
        cat_path = Path(doc["catalog_path"])
        if not cat_path.is_absolute():
            cat_path = base / cat_path
        catalog = load_catalog(cat_path)
    else:
        catalog = default_catalog()
    excludes = doc.get("exclude_materials", [])
    if excludes:
        catalog = filter_available(catalog, excludes)

    params = apply_overrides(BuildingParams(), doc.get("param_overrides", {}))

    rules_doc = dict(doc.get("rules", {}))
    rules = ScenarioRules(
        link_brick_grades=bool(rules_doc.pop("link_brick_grades", False)),
        fix_wall_material=rules_doc.pop("fix_wall_material", None),
        exhaustive_n_re=bool(rules_doc.pop("exhaustive_n_re", False)),
    )
    if rules_doc:
        raise ValueError(f"unknown rules: {sorted(rules_doc)}")

    solver_doc = dict(doc.get("solver", {}))
    solver = SolverConfig(**solver_doc)
    return ScenarioConfig(catalog=catalog, params=params, rules=rules,
                          solver=solver)


@dataclass(frozen=True)
class Provenance:
    seed: int
    starts: int
    engine: str = ENGINE_VERSION


@dataclass(frozen=True)
class Design:
    """A fully evaluated feasible design."""

    assign: DiscreteAssignment
    point: ContinuousPoint
    state: DerivedState
    cost: float  # USD
    ee: float    # GJ
    provenance: Provenance

    @property
    def material_tuple(self) -> tuple[str, str, str, str]:
        return self.assign.material_tuple

    @property
    def floor_area(self) -> float:
        return self.point.l_x_fl * self.point.l_y_fl


def enumerate_discrete(scenario: ScenarioConfig) -> list[DiscreteAssignment]:
    """Every discrete combination permitted by the catalog and rules."""
    cat, p, rules = scenario.catalog, scenario.params, scenario.rules
    walls = cat.walls
    if rules.fix_wall_material is not None:
        walls = (cat.get(ComponentClass.WALL, rules.fix_wall_material),)
    if rules.exhaustive_n_re:
        n_re_cap = int((p.t_wa_max + p.s_re_min) // (p.d_re + p.s_re_min))
        n_re_values = range(p.n_re_min, max(p.n_re_min, n_re_cap) + 1)
    else:
        n_re_values = (p.n_re_min,)

    out: list[DiscreteAssignment] = []
    for w in walls:
        for f in cat.foundations:
            if (rules.link_brick_grades and w.family == f.family
                    and w.grade != f.grade):
                continue
            for r in cat.roofs:
                for c in cat.covers:
                    for n_slc in range(p.n_slc_min, p.n_slc_max + 1):
                        for n_re in n_re_values:
                            for x_e in (0, 1):
                                for x_wa in (0, 1):
                                    out.append(DiscreteAssignment(
                                        wall=w, foundation=f, roof=r, cover=c,
                                        n_slc=n_slc, n_re=n_re,
                                        x_e=x_e, x_wa=x_wa,
                                    ))
    if not out:
        raise ValueError("scenario rules leave no discrete candidates")
    out.sort(key=lambda a: a.key)
    return out


# ---------------------------------------------------------------------------
# closed-form screens


def _candidate_box(p: BuildingParams, a: DiscreteAssignment):
    """Search box for a candidate, or None when it is provably empty."""
    lo, hi = problem_box(ContinuousProblem(p, a, Objective.MIN_EE))
    if bool((lo > hi + 1e-12).any()):
        return None
    # couplings the guarded box cannot express
    if a.n_re * p.d_re + (a.n_re - 1) * p.s_re_min > hi[0] + 1e-12:
        return None
    if p.a_fl_min > hi[2] * hi[3] + 1e-12:
        return None
    wall_len_hi = max(hi[2], hi[3]) + 2.0 * hi[0]
    if p.w_do_min > 0.5 * wall_len_hi + 1e-12:
        return None
    if p.l_wi_min > min(0.5 * p.h_wa_max, 0.5 * wall_len_hi) + 1e-12:
        return None
    return lo, hi


def objective_lower_bounds(
    p: BuildingParams, a: DiscreteAssignment
) -> tuple[float, float] | None:
    """(cost, embodied energy MJ) lower bounds, or None when box-infeasible.

    Volumes are bounded below with minimum geometry and maximum openings, so
    the bounds are safe for pruning against budgets and incumbents.
    """
    box = _candidate_box(p, a)
    if box is None:
        return None
    lo, hi = box
    t_lo = lo[0]
    h_lo = lo[1]
    lx_lo, ly_lo = lo[2], lo[3]
    t_fo_hi = hi[4]
    lx_wa_lo = lx_lo + 2.0 * t_lo
    ly_wa_lo = ly_lo + 2.0 * t_lo

    open_max = hi[5] * p.h_do + hi[6] ** 2
    v_wa_tot = t_lo * max(
        0.0,
        2.0 * p.n_rm * h_lo * ly_lo + (p.n_rm + 1) * h_lo * lx_wa_lo
        - p.n_rm * open_max,
    )

    half = lx_wa_lo / 2.0
    v_slc = p.a_be * lx_wa_lo + 2.0 * p.a_ra * math.hypot(p.r_be * half, half)
    v_slc_tot = p.n_rm * a.n_slc * v_slc
    v_co_tot = p.r_co * v_slc_tot

    t_star = min(t_fo_hi, 0.5 * p.h_fo)  # cross-section shrinks until h/2
    a_fo_lo = p.b_fo * p.h_fo - 2.0 * t_star * (p.h_fo - t_star)
    v_fo_tot = max(
        0.0, 2.0 * p.n_rm * (ly_wa_lo - 2.0 * t_fo_hi) + (p.n_rm + 1) * lx_wa_lo
    ) * a_fo_lo

    l_re_tot = p.n_rm * (a.n_re * 2.0 * (p.w_do_min + p.h_do)
                         + 4.0 * p.l_wi_min)

    cost_lb = (
        v_slc_tot * a.roof.unit_cost
        + v_co_tot * a.cover.unit_cost
        + v_wa_tot * a.wall.unit_cost
        + v_fo_tot * a.foundation.unit_cost
        + l_re_tot * p.c_re
    )
    ee_lb = (
        v_slc_tot * a.roof.ee_per_m3
        + v_co_tot * a.cover.ee_per_m3
        + v_wa_tot * a.wall.ee_per_m3
        + v_fo_tot * a.foundation.ee_per_m3
        + l_re_tot * p.e_re * p.rho_re
    )
    return cost_lb, ee_lb


# ---------------------------------------------------------------------------
# the enumerator engine


@dataclass(frozen=True)
class _Sol:
    """Cached outcome of one continuous solve."""

    feasible: bool
    point: ContinuousPoint | None
    cost: float
    ee: float  # MJ
    seed: int
    starts: int


def _workers_default() -> int:
    env = os.environ.get("BUILDOPT_WORKERS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _solve_task(args) -> _Sol:
    """Worker-side solve (module level so process pools can import it)."""
    params, assign, objective, side, config = args
    problem = ContinuousProblem(params, assign, objective, side)
    report = solve_continuous(problem, config)
    if not report.feasible:
        return _Sol(False, None, math.inf, math.inf, report.seed,
                    report.starts_used)
    state = derive_state(params, assign, report.point)
    return _Sol(True, report.point,
                eval_cost(params, assign, state),
                eval_ee(params, assign, state),
                report.seed, report.starts_used)


class Enumerator:
    """Scenario-bound search engine with per-assignment result caching."""

    def __init__(self, scenario: ScenarioConfig, workers: int | None = None,
                 executor: str = "process"):
        self.scenario = scenario
        self.params = scenario.params
        self.config = scenario.solver
        self.workers = workers if workers is not None else _workers_default()
        if executor not in ("process", "thread", "serial"):
            raise ValueError(f"unknown executor kind: {executor}")
        self.executor = executor
        self._assignments: list[DiscreteAssignment] | None = None
        self._bounds: dict[tuple, tuple[float, float] | None] = {}
        self._cache: dict[tuple, _Sol] = {}
        self._pool = None

    # -- candidate generation ----------------------------------------------

    def assignments(self) -> list[DiscreteAssignment]:
        if self._assignments is None:
            self._assignments = enumerate_discrete(self.scenario)
        return self._assignments

    def bounds(self, a: DiscreteAssignment,
               extras: tuple[SideConstraint, ...] = (),
               ) -> tuple[float, float] | None:
        # a floor-area side constraint tightens the closed-form bounds, so
        # fold it into the parameter set the screens see
        area_req = max([self.params.a_fl_min]
                       + [s.bound for s in extras if s.kind == "area_min"])
        k = (a.key, area_req)
        if k not in self._bounds:
            params = self.params if area_req == self.params.a_fl_min \
                else replace(self.params, a_fl_min=area_req)
            self._bounds[k] = objective_lower_bounds(params, a)
        return self._bounds[k]

    # -- continuous dispatch -------------------------------------------------

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self) -> "Enumerator":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _map_tasks(self, tasks: list[tuple]) -> list[_Sol]:
        if self.workers <= 1 or len(tasks) <= 1 or self.executor == "serial":
            return [_solve_task(t) for t in tasks]
        if self._pool is None:
            kind = ProcessPoolExecutor if self.executor == "process" \
                else ThreadPoolExecutor
            self._pool = kind(max_workers=self.workers)
        return list(self._pool.map(_solve_task, tasks, chunksize=1))

    def _solve_many(
        self,
        requests: list[tuple[DiscreteAssignment, Objective,
                             tuple[SideConstraint, ...]]],
    ) -> list[_Sol]:
        """Cached batch solve; results keyed by (assignment, mode, side)."""
        keys = [(a.key, obj.value, side) for a, obj, side in requests]
        todo, task_args = [], []
        for key, (a, obj, side) in zip(keys, requests):
            if key not in self._cache and key not in todo:
                todo.append(key)
                task_args.append((self.params, a, obj, side, self.config))
        if task_args:
            for key, sol in zip(todo, self._map_tasks(task_args)):
                self._cache[key] = sol
        return [self._cache[k] for k in keys]

    def _solve_one(self, a: DiscreteAssignment, obj: Objective,
                   side: tuple[SideConstraint, ...]) -> _Sol:
        return self._solve_many([(a, obj, side)])[0]

    def min_ee_anchor(self, a: DiscreteAssignment,
                      extras: tuple[SideConstraint, ...] = ()) -> _Sol:
        return self._solve_one(a, Objective.MIN_EE, extras)

    def min_cost_anchor(self, a: DiscreteAssignment,
                        extras: tuple[SideConstraint, ...] = ()) -> _Sol:
        return self._solve_one(a, Objective.MIN_COST, extras)

    def min_ee_at_budget(
        self, a: DiscreteAssignment, budget: float | None,
        extras: tuple[SideConstraint, ...] = (),
    ) -> _Sol:
        """Minimum-EE solution under an optional budget cap."""
        return self._batch_min_ee_at_budget([a], budget, extras)[0]

    #: candidates whose estimated cheapest cost lands this close above the
    #: budget still get a capped solve; local-search noise must not veto a
    #: family whose true minimum sits within a hair of the cap
    BUDGET_MARGIN = 0.02

    def _batch_min_ee_at_budget(
        self, assigns: Sequence[DiscreteAssignment], budget: float | None,
        extras: tuple[SideConstraint, ...] = (),
    ) -> list[_Sol]:
        """Staged batch form of min-EE-under-budget.

        Budget-bound candidates are screened with a cheapest-point solve
        first, so hopeless ones cost a single dispatch; survivors get the
        unconstrained anchor and, when the anchor overspends, a solve with
        the budget cap attached.
        """
        n = len(assigns)
        out: list[_Sol | None] = [None] * n
        infeasible = _Sol(False, None, math.inf, math.inf, 0, 0)

        if budget is None:
            anchors = self._solve_many(
                [(a, Objective.MIN_EE, extras) for a in assigns])
            return list(anchors)

        cheapest = self._solve_many(
            [(a, Objective.MIN_COST, extras) for a in assigns])
        cap = budget * (1.0 + self.BUDGET_MARGIN)
        alive = []
        for i in range(n):
            if cheapest[i].feasible and cheapest[i].cost <= cap:
                alive.append(i)
            else:
                out[i] = infeasible

        anchors = self._solve_many(
            [(assigns[i], Objective.MIN_EE, extras) for i in alive])
        capped = []
        for i, anchor in zip(alive, anchors):
            if anchor.feasible and anchor.cost <= budget:
                out[i] = anchor
            else:
                capped.append(i)
        side = extras + (SideConstraint("cost_max", float(budget)),)
        solved = self._solve_many(
            [(assigns[i], Objective.MIN_EE, side) for i in capped])
        for i, sol in zip(capped, solved):
            if sol.feasible:
                out[i] = sol
            elif cheapest[i].cost <= budget:
                # the cap is attainable via the cheapest point even though
                # the capped solve missed; keep that point
                out[i] = cheapest[i]
            else:
                out[i] = infeasible
        return out  # type: ignore[return-value]

    # -- reductions ----------------------------------------------------------

    def solve_minlp(
        self, budget: float | None = None,
        extras: tuple[SideConstraint, ...] = (),
    ) -> Design | None:
        """Minimum embodied-energy design across the whole discrete space.

        ``budget`` of None means unbounded.  Returns None when no candidate
        admits a feasible point.
        """
        if budget is not None and budget <= 0:
            return None
        budget_eff = budget
        if budget is None and math.isfinite(self.params.b_avail):
            budget_eff = self.params.b_avail

        ranked: list[tuple[float, float, DiscreteAssignment]] = []
        for a in self.assignments():
            lb = self.bounds(a, extras)
            if lb is None:
                continue
            cost_lb, ee_lb = lb
            if budget_eff is not None and cost_lb > budget_eff:
                continue
            ranked.append((ee_lb, cost_lb, a))
        ranked.sort(key=lambda t: (t[0], t[2].key))

        best: tuple[float, float, tuple, _Sol, DiscreteAssignment] | None = None
        i = 0
        while i < len(ranked):
            batch = [a for ee_lb, _, a in ranked[i:i + _BATCH]
                     if best is None or ee_lb <= best[0]]
            i += _BATCH
            if not batch:
                if best is not None:
                    break  # EE-lb sorted: nothing later can win either
                continue
            sols = self._batch_min_ee_at_budget(batch, budget_eff, extras)
            for a, sol in zip(batch, sols):
                if not sol.feasible:
                    continue
                cand = (sol.ee, sol.cost, a.key, sol, a)
                if best is None or cand[:3] < best[:3]:
                    best = cand
        if best is None:
            return None
        return self._design(best[4], best[3])

    def _design(self, a: DiscreteAssignment, sol: _Sol) -> Design:
        state = derive_state(self.params, a, sol.point)
        return Design(
            assign=a, point=sol.point, state=state,
            cost=eval_cost(self.params, a, state),
            ee=eval_ee(self.params, a, state) / 1000.0,
            provenance=Provenance(seed=sol.seed, starts=sol.starts),
        )

    def verify(self, design: Design, tol: float = 1e-6) -> bool:
        """Re-check a design against the full constraint system."""
        rv = constraint_residuals(self.params, design.assign, design.state)
        return is_feasible(rv, tol)


def solve_minlp(
    scenario: ScenarioConfig, budget: float | None = None,
    workers: int | None = None,
) -> Design | None:
    """One-shot global solve (see :meth:`Enumerator.solve_minlp`)."""
    return Enumerator(scenario, workers=workers).solve_minlp(budget)


def min_feasible_foundation_width(
    scenario: ScenarioConfig, wall_material: str,
    resolution: float = 0.005, upper: float = 2.0,
) -> float | None:
    """Smallest foundation width at which the wall material can be built.

    Bisection over the width against a pure feasibility probe (engineering
    constraints only, no budget).  Returns None when even ``upper`` fails.
    """
    cat = scenario.catalog
    cat.get(ComponentClass.WALL, wall_material)  # validate the name
    lower = 2.0 * min(m.min_thickness for m in cat.foundations)

    base_rules = replace(scenario.rules, fix_wall_material=wall_material)

    def feasible_at(b: float) -> bool:
        params = replace(scenario.params, b_fo=b)
        sub = ScenarioConfig(catalog=cat, params=params, rules=base_rules,
                             solver=scenario.solver)
        eng = Enumerator(sub, workers=1)
        # cheap screens first; order foundations by slack on the
        # eccentricity bound so likely-feasible candidates probe first
        cands = [a for a in eng.assignments()
                 if objective_lower_bounds(params, a) is not None]
        cands.sort(key=lambda a: (a.foundation.min_thickness, a.key))
        for a in cands:
            problem = ContinuousProblem(params, a, Objective.FEASIBILITY)
            rep = solve_continuous(problem, scenario.solver)
            if rep.max_residual <= scenario.solver.tol:
                return True
        return False

    if not feasible_at(upper):
        return None
    if feasible_at(lower):
        return lower
    lo, hi = lower, upper
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if feasible_at(mid):
            hi = mid
        else:
            lo = mid
    return hi
