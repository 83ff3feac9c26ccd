"""Command-line interface.

Artifacts land under ``<out>/results/<scenario-fingerprint>/`` in the same
layout the HTTP service uses (front.csv, front.json, meta.json), so scripts
and the service can share caches.  Exit codes: 0 success, 2 error (with a
JSON error object on stderr), 3 infeasible.
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import click

from .pareto import (
    cluster_designs,
    design_to_dict,
    epsilon_constraint_front,
    floor_area_front,
    front_to_csv,
    front_to_dict,
    price_shift_payload,
)
from .materials import default_catalog
from .search import Enumerator, ScenarioConfig, load_scenario, \
    min_feasible_foundation_width
from .serialize import canonical_json

EXIT_ERROR = 2
EXIT_INFEASIBLE = 3


def _fail(exc: BaseException) -> None:
    sys.stderr.write(canonical_json(
        {"error": type(exc).__name__, "message": str(exc)}
    ) + "\n")
    sys.exit(EXIT_ERROR)


def _scenario(path: str | None, seed: int | None) -> ScenarioConfig:
    sc = load_scenario(path) if path else load_scenario({})
    if seed is not None:
        sc = replace(sc, solver=replace(sc.solver, seed=seed))
    return sc


def _result_dir(out: str, sc: ScenarioConfig) -> Path:
    d = Path(out) / "results" / sc.fingerprint()
    d.mkdir(parents=True, exist_ok=True)
    return d


def _write_front(dest: Path, front, meta: dict) -> None:
    payload = front_to_dict(front)
    (dest / "front.json").write_text(canonical_json(payload))
    (dest / "front.csv").write_text(front_to_csv(front))
    (dest / "meta.json").write_text(canonical_json(meta))


def _meta(sc: ScenarioConfig, **extra) -> dict:
    return {
        "fingerprint": sc.fingerprint(),
        "solver": {
            "starts": sc.solver.starts,
            "seed": sc.solver.seed,
            "tol": sc.solver.tol,
        },
        **extra,
    }


@click.group()
def main() -> None:
    """Optimize building designs for cost and embodied energy."""


@main.command()
@click.option("--scenario", "scenario_path", type=click.Path(exists=True))
@click.option("--budget", type=float, default=None,
              help="Budget cap in USD (omit for unbounded).")
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=None)
@click.option("--out", default=".", show_default=True)
def solve(scenario_path, budget, seed, workers, out) -> None:
    """Minimize embodied energy subject to an optional budget."""
    try:
        sc = _scenario(scenario_path, seed)
        t0 = time.time()
        design = Enumerator(sc, workers=workers).solve_minlp(budget=budget)
        elapsed = time.time() - t0
        dest = _result_dir(out, sc)
        if design is None:
            (dest / "meta.json").write_text(canonical_json(
                _meta(sc, kind="solve", budget=budget, status="infeasible")))
            click.echo(canonical_json({"status": "infeasible"}))
            sys.exit(EXIT_INFEASIBLE)
        doc = design_to_dict(design)
        (dest / "design.json").write_text(canonical_json(doc))
        (dest / "meta.json").write_text(canonical_json(_meta(
            sc, kind="solve", budget=budget, status="ok",
            elapsed_s=round(elapsed, 3), seed=design.provenance.seed)))
        click.echo(canonical_json({
            "status": "ok",
            "cost_usd": design.cost,
            "ee_GJ": design.ee,
            "materials": doc["materials"],
            "n_slc": design.assign.n_slc,
            "artifact": str(dest / "design.json"),
        }))
    except SystemExit:
        raise
    except Exception as exc:
        _fail(exc)


@main.command()
@click.option("--scenario", "scenario_path", type=click.Path(exists=True))
@click.option("--budget-min", type=float, required=True)
@click.option("--budget-max", type=float, required=True)
@click.option("--steps", type=int, default=150, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=None)
@click.option("--out", default=".", show_default=True)
def pareto(scenario_path, budget_min, budget_max, steps, seed, workers, out):
    """Sweep the budget and emit the cost-vs-EE Pareto front."""
    try:
        sc = _scenario(scenario_path, seed)
        engine = Enumerator(sc, workers=workers)
        t0 = time.time()
        front = epsilon_constraint_front(engine, budget_min, budget_max, steps)
        elapsed = time.time() - t0
        dest = _result_dir(out, sc)
        _write_front(dest, front, _meta(
            sc, kind="pareto", budget_min=budget_min, budget_max=budget_max,
            steps=steps, elapsed_s=round(elapsed, 3)))
        if not front.points:
            click.echo(canonical_json({"status": "infeasible"}))
            sys.exit(EXIT_INFEASIBLE)
        clusters = cluster_designs(front)
        click.echo(canonical_json({
            "status": "ok",
            "points": len(front.points),
            "clusters": [c.label for c in clusters],
            "artifact": str(dest / "front.csv"),
        }))
    except SystemExit:
        raise
    except Exception as exc:
        _fail(exc)


@main.command(name="area-sweep")
@click.option("--scenario", "scenario_path", type=click.Path(exists=True))
@click.option("--budget", type=float, required=True)
@click.option("--area-min", type=float, required=True)
@click.option("--area-max", type=float, required=True)
@click.option("--steps", type=int, default=60, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=None)
@click.option("--out", default=".", show_default=True)
def area_sweep(scenario_path, budget, area_min, area_max, steps, seed,
               workers, out):
    """Sweep the floor area at a fixed budget (area-vs-EE front)."""
    try:
        sc = _scenario(scenario_path, seed)
        engine = Enumerator(sc, workers=workers)
        front = floor_area_front(engine, budget, area_min, area_max, steps)
        dest = _result_dir(out, sc)
        _write_front(dest, front, _meta(
            sc, kind="area_sweep", budget=budget,
            area_min=area_min, area_max=area_max, steps=steps))
        if not front.points:
            click.echo(canonical_json({"status": "infeasible"}))
            sys.exit(EXIT_INFEASIBLE)
        click.echo(canonical_json({
            "status": "ok",
            "points": len(front.points),
            "artifact": str(dest / "front.csv"),
        }))
    except SystemExit:
        raise
    except Exception as exc:
        _fail(exc)


@main.command(name="min-bfo")
@click.option("--scenario", "scenario_path", type=click.Path(exists=True))
@click.option("--wall", required=True, help="Wall material to probe.")
@click.option("--seed", type=int, default=None)
def min_bfo(scenario_path, wall, seed):
    """Smallest feasible foundation width for a wall material."""
    try:
        sc = _scenario(scenario_path, seed)
        width = min_feasible_foundation_width(sc, wall)
        if width is None:
            click.echo(canonical_json(
                {"status": "infeasible", "wall": wall,
                 "message": "never feasible in range"}))
            sys.exit(EXIT_INFEASIBLE)
        click.echo(canonical_json(
            {"status": "ok", "wall": wall, "min_b_fo_m": width}))
    except SystemExit:
        raise
    except Exception as exc:
        _fail(exc)


@main.command(name="price-what-if")
@click.option("--front", "front_path", type=click.Path(exists=True),
              required=True, help="front.json produced by pareto.")
@click.option("--material", required=True)
@click.option("--price", type=float, required=True)
@click.option("--component-class", "component_class", default=None,
              help="Needed when the name exists in several classes.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Destination (default: alongside the input).")
def price_what_if(front_path, material, price, component_class, out_path):
    """Shift a saved front for a hypothetical price; no re-solve."""
    try:
        payload = json.loads(Path(front_path).read_text())
        shifted = price_shift_payload(payload, default_catalog(), material,
                                      price, component_class)
        dest = Path(out_path) if out_path else \
            Path(front_path).with_name("front_shifted.json")
        dest.write_text(canonical_json(shifted))
        click.echo(canonical_json({
            "status": "ok",
            "points": len(shifted["points"]),
            "artifact": str(dest),
        }))
    except Exception as exc:
        _fail(exc)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--state-dir", default=None,
              help="Directory for scenarios/ and results/ persistence.")
@click.option("--workers", type=int, default=None)
def serve(host, port, state_dir, workers):
    """Run the HTTP/JSON service."""
    from .service import run

    run(host=host, port=port, state_dir=state_dir, workers=workers)


if __name__ == "__main__":
    main()
