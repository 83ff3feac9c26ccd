"""Pareto-front generation and post-processing.

Fronts are produced with the epsilon-constraint method: the budget (or the
floor area) is swept over a grid, the other objective is minimized at each
step, and the collected solutions are filtered to the nondominated subset.
Neighboring sweep steps whose winning design family differs are refined by
bisection so that narrow families are not stepped over.

Post-processing never re-solves: price what-ifs shift the cost coordinate
with the exact volume-times-price-delta formula and re-filter dominance.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .materials import CatalogError, ComponentClass, MaterialCatalog
from .nlp import SideConstraint
from .search import Design, Enumerator, ScenarioConfig
from .serialize import canonical_float, canonical_json


@dataclass(frozen=True)
class FrontPoint:
    x: float                       # cost (USD) or floor area (m2)
    ee: float                      # GJ
    design: Design
    alternates: tuple[Design, ...] = ()  # coordinate ties, if any


@dataclass(frozen=True)
class ParetoFront:
    points: tuple[FrontPoint, ...]
    axis_mode: str  # "cost_vs_ee" | "area_vs_ee"
    scenario_fingerprint: str
    #: (class value, material name, unit price) already applied by what-if
    #: shifts; lets repeated shifts be measured from the right baseline
    price_overrides: tuple[tuple[str, str, float], ...] = ()

    def __post_init__(self) -> None:
        if self.axis_mode not in ("cost_vs_ee", "area_vs_ee"):
            raise ValueError(f"unknown axis mode: {self.axis_mode}")
        xs = [p.x for p in self.points]
        if xs != sorted(xs):
            raise ValueError("front points must be sorted by first coordinate")

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class DesignCluster:
    """A run of front points sharing a material tuple and slice count."""

    label: str
    materials: tuple[str, str, str, str]
    n_slc: int
    cost_range: tuple[float, float]
    ee_range: tuple[float, float]
    w_do_range: tuple[float, float]
    l_wi_range: tuple[float, float]
    v_wa_tot_range: tuple[float, float]


def nondominated_filter(points: Sequence[tuple]) -> list:
    """Keep the subset not dominated under (min, min) on the first two fields.

    A point dominates another when it is at least as good in both
    coordinates and strictly better in one.  Among exact coordinate
    duplicates the earliest input survives; input order is otherwise
    preserved.
    """
    pts = list(points)
    for p in pts:
        if not (math.isfinite(p[0]) and math.isfinite(p[1])):
            raise ValueError("nondominated_filter needs finite coordinates")
    keep: list = []
    seen: set[tuple[float, float]] = set()
    for i, p in enumerate(pts):
        if (p[0], p[1]) in seen:
            continue
        dominated = False
        for j, q in enumerate(pts):
            if i == j:
                continue
            if q[0] <= p[0] and q[1] <= p[1] and (q[0] < p[0] or q[1] < p[1]):
                dominated = True
                break
            # exact duplicate: the earlier one wins
            if q[0] == p[0] and q[1] == p[1] and j < i:
                dominated = True
                break
        if not dominated:
            keep.append(p)
            seen.add((p[0], p[1]))
    return keep


def _family(design: Design) -> tuple:
    return design.material_tuple + (design.assign.n_slc,)


def _assemble_front(
    solutions: Iterable[tuple[float, float, Design]],
    axis_mode: str,
    fingerprint: str,
    flip_x: bool = False,
    price_overrides: tuple[tuple[str, str, float], ...] = (),
) -> ParetoFront:
    """Filter to nondominance and fold coordinate ties into alternates.

    ``flip_x`` handles axes where larger is better (floor area): dominance
    is evaluated on the negated coordinate.
    """
    raw = [(-x, ee, d) if flip_x else (x, ee, d) for x, ee, d in solutions]
    kept = nondominated_filter(raw)
    merged: dict[tuple[float, float], list[Design]] = {}
    for x, ee, d in kept:
        merged.setdefault((x, ee), []).append(d)
    pts = []
    for (x, ee), designs in merged.items():
        x_out = -x if flip_x else x
        pts.append(FrontPoint(x=x_out, ee=ee, design=designs[0],
                              alternates=tuple(designs[1:])))
    pts.sort(key=lambda p: (p.x, p.ee))
    return ParetoFront(points=tuple(pts), axis_mode=axis_mode,
                       scenario_fingerprint=fingerprint,
                       price_overrides=price_overrides)


def _sweep(
    engine: Enumerator,
    grid: list[float],
    solve_at: Callable[[float], Design | None],
    refine_gap: float,
    progress: Callable[[int, int], None] | None = None,
) -> list[tuple[float, Design]]:
    """Solve over a grid, bisecting wherever the design family changes."""
    results: dict[float, Design | None] = {}
    total = [len(grid)]

    def run(eps: float) -> Design | None:
        if eps not in results:
            results[eps] = solve_at(eps)
            if progress is not None:
                progress(len(results), max(total[0], len(results)))
        return results[eps]

    for eps in grid:
        run(eps)

    changed = True
    while changed:
        changed = False
        frontier = sorted(results)
        for a, b in zip(frontier, frontier[1:]):
            if b - a <= refine_gap:
                continue
            da, db = results[a], results[b]
            fam_a = None if da is None else _family(da)
            fam_b = None if db is None else _family(db)
            if fam_a != fam_b:
                total[0] += 1
                run(0.5 * (a + b))
                changed = True
    if progress is not None:
        progress(len(results), len(results))
    return [(eps, d) for eps, d in sorted(results.items()) if d is not None]


def epsilon_constraint_front(
    scenario: ScenarioConfig | Enumerator,
    budget_lo: float,
    budget_hi: float,
    steps: int = 150,
    adaptive: bool = True,
    progress: Callable[[int, int], None] | None = None,
) -> ParetoFront:
    """Cost-vs-EE front from minimum-EE solves over a budget grid."""
    if budget_lo > budget_hi:
        raise ValueError("budget_lo must not exceed budget_hi")
    if steps < 2:
        raise ValueError("steps must be at least 2")
    engine = scenario if isinstance(scenario, Enumerator) else Enumerator(scenario)
    grid = list(np.linspace(budget_lo, budget_hi, steps))
    gap = max((budget_hi - budget_lo) / steps / 8.0, 1e-6) if adaptive \
        else float("inf")
    solved = _sweep(engine, grid, lambda b: engine.solve_minlp(budget=b), gap,
                    progress)
    return _assemble_front(
        ((d.cost, d.ee, d) for _, d in solved),
        axis_mode="cost_vs_ee",
        fingerprint=engine.scenario.fingerprint(),
    )


def floor_area_front(
    scenario: ScenarioConfig | Enumerator,
    fixed_budget: float,
    area_lo: float,
    area_hi: float,
    steps: int = 60,
    adaptive: bool = True,
    progress: Callable[[int, int], None] | None = None,
) -> ParetoFront:
    """Area-vs-EE front at a fixed budget (larger area is better)."""
    if area_lo > area_hi:
        raise ValueError("area_lo must not exceed area_hi")
    if steps < 2:
        raise ValueError("steps must be at least 2")
    engine = scenario if isinstance(scenario, Enumerator) else Enumerator(scenario)

    def solve_at(area: float) -> Design | None:
        extras = (SideConstraint("area_min", float(area)),)
        return engine.solve_minlp(budget=fixed_budget, extras=extras)

    grid = list(np.linspace(area_lo, area_hi, steps))
    gap = max((area_hi - area_lo) / steps / 8.0, 1e-9) if adaptive \
        else float("inf")
    solved = _sweep(engine, grid, solve_at, gap, progress)
    return _assemble_front(
        ((d.floor_area, d.ee, d) for _, d in solved),
        axis_mode="area_vs_ee",
        fingerprint=engine.scenario.fingerprint(),
        flip_x=True,
    )


def cluster_designs(front: ParetoFront) -> list[DesignCluster]:
    """Group front points by (material tuple, slice count), labeled by cost."""
    if not front.points:
        raise ValueError("cannot cluster an empty front")
    groups: dict[tuple, list[FrontPoint]] = {}
    for pt in front.points:
        groups.setdefault(_family(pt.design), []).append(pt)

    def span(values: Iterable[float]) -> tuple[float, float]:
        vals = list(values)
        return (min(vals), max(vals))

    ordered = sorted(groups.items(),
                     key=lambda kv: min(p.design.cost for p in kv[1]))
    clusters = []
    for idx, (fam, pts) in enumerate(ordered):
        label = _letter_label(idx)
        clusters.append(DesignCluster(
            label=label,
            materials=fam[:4],
            n_slc=fam[4],
            cost_range=span(p.design.cost for p in pts),
            ee_range=span(p.design.ee for p in pts),
            w_do_range=span(p.design.point.w_do for p in pts),
            l_wi_range=span(p.design.point.l_wi for p in pts),
            v_wa_tot_range=span(p.design.state.v_wa_tot for p in pts),
        ))
    return clusters


def _letter_label(i: int) -> str:
    label = ""
    i += 1
    while i > 0:
        i, rem = divmod(i - 1, 26)
        label = chr(ord("A") + rem) + label
    return label


# ---------------------------------------------------------------------------
# price what-ifs (closed form; no re-solving)


def _resolve_material(
    catalog: MaterialCatalog, material: str,
    component_class: ComponentClass | str | None,
) -> tuple[ComponentClass, float]:
    """Find the (class, current price) for a material name.

    Names can repeat across classes with different records, in which case
    the class must be given explicitly.
    """
    if component_class is not None:
        cls = ComponentClass(component_class)
        return cls, catalog.get(cls, material).unit_cost
    hits = [m for m in catalog.entries if m.name == material]
    if not hits:
        raise CatalogError(f"unknown material: {material}")
    if len(hits) > 1:
        raise CatalogError(
            f"material {material} appears in several classes; "
            "pass component_class"
        )
    m = hits[0]
    return m.component_class, m.unit_cost


def _design_uses(design: Design, cls: ComponentClass, material: str) -> bool:
    slot = {
        ComponentClass.WALL: design.assign.wall,
        ComponentClass.FOUNDATION: design.assign.foundation,
        ComponentClass.ROOF: design.assign.roof,
        ComponentClass.ROOF_COVER: design.assign.cover,
    }[cls]
    return slot.name == material


def _volume_for(design: Design, cls: ComponentClass) -> float:
    if cls is ComponentClass.FOUNDATION:
        return design.state.v_fo_tot
    if cls is ComponentClass.WALL:
        return design.state.v_wa_tot
    if cls is ComponentClass.ROOF:
        return design.state.v_slc_tot
    return design.state.v_co_tot


def price_shift(
    front: ParetoFront,
    catalog: MaterialCatalog,
    material: str,
    new_price: float,
    component_class: ComponentClass | str | None = None,
) -> ParetoFront:
    """Move affected points horizontally for a price change; EE is untouched.

    A design's stored volume of the re-priced class gives the exact cost
    delta, so no re-solve is needed; nondominance is re-evaluated after the
    shift.  Fronts remember already-applied overrides, so shifting to the
    same price twice equals shifting once.
    """
    if front.axis_mode != "cost_vs_ee":
        raise ValueError("price_shift applies to cost-vs-EE fronts")
    cls, old_price = _resolve_material(catalog, material, component_class)
    for ocls, oname, oprice in front.price_overrides:
        if (ocls, oname) == (cls.value, material):
            old_price = oprice
    delta_rate = new_price - old_price
    overrides = tuple(
        o for o in front.price_overrides if o[:2] != (cls.value, material)
    ) + ((cls.value, material, float(new_price)),)

    shifted: list[tuple[float, float, Design]] = []
    for pt in front.points:
        for d in (pt.design, *pt.alternates):
            if _design_uses(d, cls, material):
                volume = _volume_for(d, cls)
                new_cost = d.cost + volume * delta_rate
                d2 = replace(d, cost=new_cost)
                shifted.append((new_cost, d2.ee, d2))
            else:
                shifted.append((d.cost, d.ee, d))
    return _assemble_front(shifted, front.axis_mode,
                           front.scenario_fingerprint,
                           price_overrides=overrides)


def price_threshold(
    design: Design,
    budget: float,
    catalog: MaterialCatalog,
    material: str,
    component_class: ComponentClass | str | None = None,
) -> float:
    """Highest unit price at which the design still fits the budget."""
    cls, old_price = _resolve_material(catalog, material, component_class)
    if not _design_uses(design, cls, material):
        raise ValueError(f"design does not use {material} for {cls.value}")
    if budget < design.cost:
        raise ValueError("budget is below the design's current cost")
    volume = _volume_for(design, cls)
    return old_price + (budget - design.cost) / volume


_CLS_SLOT = {
    ComponentClass.WALL: ("wall", "v_wa_tot_m3"),
    ComponentClass.FOUNDATION: ("foundation", "v_fo_tot_m3"),
    ComponentClass.ROOF: ("roof", "v_slc_tot_m3"),
    ComponentClass.ROOF_COVER: ("cover", "v_co_tot_m3"),
}


def price_shift_payload(
    payload: dict,
    catalog: MaterialCatalog,
    material: str,
    new_price: float,
    component_class: ComponentClass | str | None = None,
) -> dict:
    """price_shift on an exported front payload (dict in, dict out).

    Lets file- and service-level what-ifs run without reconstructing rich
    design objects; the arithmetic is identical.
    """
    if payload.get("axis_mode") != "cost_vs_ee":
        raise ValueError("price what-ifs apply to cost-vs-EE fronts")
    cls, old_price = _resolve_material(catalog, material, component_class)
    slot, vol_key = _CLS_SLOT[cls]
    overrides = [list(o) for o in payload.get("price_overrides", [])]
    for ocls, oname, oprice in overrides:
        if (ocls, oname) == (cls.value, material):
            old_price = oprice
    overrides = [o for o in overrides if o[:2] != [cls.value, material]]
    overrides.append([cls.value, material, float(new_price)])
    rate = new_price - old_price

    def shift_design(doc: dict) -> dict:
        doc = json.loads(json.dumps(doc))
        if doc["materials"][slot] == material:
            doc["cost_usd"] = doc["cost_usd"] + doc["derived"][vol_key] * rate
        return doc

    entries: list[tuple[float, float, dict]] = []
    for pt in payload["points"]:
        for doc in [pt["design"], *pt.get("alternates", [])]:
            doc = shift_design(doc)
            entries.append((doc["cost_usd"], doc["ee_GJ"], doc))
    kept = nondominated_filter(entries)
    merged: dict[tuple[float, float], list[dict]] = {}
    for x, ee, doc in kept:
        merged.setdefault((x, ee), []).append(doc)
    points = [
        {"x": x, "ee_GJ": ee, "design": docs[0], "alternates": docs[1:]}
        for (x, ee), docs in sorted(merged.items())
    ]
    return {
        "axis_mode": "cost_vs_ee",
        "scenario_fingerprint": payload.get("scenario_fingerprint", ""),
        "price_overrides": overrides,
        "points": points,
        "clusters": _payload_clusters(points),
    }


def _payload_clusters(points: list[dict]) -> list[dict]:
    groups: dict[tuple, list[dict]] = {}
    for pt in points:
        d = pt["design"]
        key = (d["materials"]["wall"], d["materials"]["foundation"],
               d["materials"]["roof"], d["materials"]["cover"], d["n_slc"])
        groups.setdefault(key, []).append(d)

    def span(vals):
        return [min(vals), max(vals)]

    ordered = sorted(groups.items(),
                     key=lambda kv: min(d["cost_usd"] for d in kv[1]))
    out = []
    for idx, (key, docs) in enumerate(ordered):
        out.append({
            "label": _letter_label(idx),
            "materials": list(key[:4]),
            "n_slc": key[4],
            "cost_range": span([d["cost_usd"] for d in docs]),
            "ee_range": span([d["ee_GJ"] for d in docs]),
            "w_do_range": span([d["point"]["w_do"] for d in docs]),
            "l_wi_range": span([d["point"]["l_wi"] for d in docs]),
            "v_wa_tot_range": span([d["derived"]["v_wa_tot_m3"] for d in docs]),
        })
    return out


# ---------------------------------------------------------------------------
# exports


FRONT_CSV_COLUMNS = (
    "cost_usd", "ee_GJ", "wall", "foundation", "roof", "cover", "n_slc",
    "w_do_m", "l_wi_m", "v_wa_tot_m3", "t_wa_m", "h_wa_m", "l_x_fl_m",
    "l_y_fl_m", "t_fo_m",
)


def front_to_csv(front: ParetoFront) -> str:
    """CSV export; area fronts gain a leading ``area_m2`` column."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    cols = FRONT_CSV_COLUMNS
    if front.axis_mode == "area_vs_ee":
        cols = ("area_m2",) + cols
    writer.writerow(cols)
    for pt in front.points:
        d = pt.design
        row = [
            canonical_float(d.cost), canonical_float(d.ee),
            *d.material_tuple, d.assign.n_slc,
            canonical_float(d.point.w_do), canonical_float(d.point.l_wi),
            canonical_float(d.state.v_wa_tot), canonical_float(d.point.t_wa),
            canonical_float(d.point.h_wa), canonical_float(d.point.l_x_fl),
            canonical_float(d.point.l_y_fl), canonical_float(d.point.t_fo),
        ]
        if front.axis_mode == "area_vs_ee":
            row = [canonical_float(pt.x)] + row
        writer.writerow(row)
    return out.getvalue()


def design_to_dict(design: Design) -> dict:
    d = design
    return {
        "materials": {
            "wall": d.assign.wall.name,
            "foundation": d.assign.foundation.name,
            "roof": d.assign.roof.name,
            "cover": d.assign.cover.name,
        },
        "n_slc": d.assign.n_slc,
        "n_re": d.assign.n_re,
        "x_e": d.assign.x_e,
        "x_wa": d.assign.x_wa,
        "cost_usd": d.cost,
        "ee_GJ": d.ee,
        "point": {k: getattr(d.point, k) for k in d.point.DIMS},
        "derived": {
            "v_wa_tot_m3": d.state.v_wa_tot,
            "v_fo_tot_m3": d.state.v_fo_tot,
            "v_slc_tot_m3": d.state.v_slc_tot,
            "v_co_tot_m3": d.state.v_co_tot,
            "l_re_tot_m": d.state.l_re_tot,
            "floor_area_m2": d.floor_area,
            "eccentricity_m": d.state.e,
        },
        "provenance": {
            "seed": d.provenance.seed,
            "starts": d.provenance.starts,
            "engine": d.provenance.engine,
        },
    }


def front_to_dict(front: ParetoFront) -> dict:
    return {
        "axis_mode": front.axis_mode,
        "scenario_fingerprint": front.scenario_fingerprint,
        "price_overrides": [list(o) for o in front.price_overrides],
        "points": [
            {
                "x": pt.x,
                "ee_GJ": pt.ee,
                "design": design_to_dict(pt.design),
                "alternates": [design_to_dict(a) for a in pt.alternates],
            }
            for pt in front.points
        ],
        "clusters": [
            {
                "label": c.label,
                "materials": list(c.materials),
                "n_slc": c.n_slc,
                "cost_range": list(c.cost_range),
                "ee_range": list(c.ee_range),
                "w_do_range": list(c.w_do_range),
                "l_wi_range": list(c.l_wi_range),
                "v_wa_tot_range": list(c.v_wa_tot_range),
            }
            for c in (cluster_designs(front) if front.points else [])
        ],
    }


def front_to_json(front: ParetoFront) -> str:
    return canonical_json(front_to_dict(front))
