"""Continuous subproblem solver for a fixed discrete assignment.

For one choice of materials, slice count and branch bits, the remaining
problem is a 7-dimensional nonconvex program over the geometry box (8
dimensions when the foundation width itself is being minimized).  It is
solved by multistart local search: a low-discrepancy set of start points,
each refined by compass (coordinate pattern) search on an exact L1 penalty
function whose weight grows over a fixed schedule.  Box bounds are enforced
by projection; all other constraints through the penalty.

The point returned is always re-checked against the full constraint system
at the feasibility tolerance; a start that never reaches feasibility
contributes nothing.  ``grid_oracle`` provides an independent check of the
search method: exhaustive evaluation over a uniform grid with one
refinement pass around the incumbent.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from enum import Enum
from itertools import product

import numpy as np
from scipy.stats import qmc

from .model import (
    MPA,
    AssignmentContext,
    BuildingParams,
    ContinuousPoint,
    DiscreteAssignment,
    _cost,
    _derive,
    _embodied_energy,
    _residuals,
)


class Objective(str, Enum):
    MIN_EE = "min_EE"
    MIN_COST = "min_cost"
    MAX_FLOOR_AREA = "max_floor_area"
    MIN_B_FO = "min_B_fo"
    FEASIBILITY = "feasibility"


class SolveStatus(str, Enum):
    OPTIMAL_LOCAL = "optimal_local"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    NUMERIC_FAILURE = "numeric_failure"


@dataclass(frozen=True)
class SideConstraint:
    """Extra inequality on an aggregate quantity (cost, energy, floor area)."""

    kind: str  # "cost_max" | "ee_max" | "area_min"
    bound: float

    def __post_init__(self) -> None:
        if self.kind not in ("cost_max", "ee_max", "area_min"):
            raise ValueError(f"unknown side constraint kind: {self.kind}")


@dataclass(frozen=True)
class ContinuousProblem:
    params: BuildingParams
    assign: DiscreteAssignment
    objective: Objective = Objective.MIN_EE
    side_constraints: tuple[SideConstraint, ...] = ()

    @property
    def ndim(self) -> int:
        return 8 if self.objective is Objective.MIN_B_FO else 7


@dataclass(frozen=True)
class SolverConfig:
    starts: int = 16
    iters_per_stage: int = 60
    tol: float = 1e-6
    seed: int | None = None       # mixed into the per-problem hash seed
    penalty_init: float = 1e2
    penalty_growth: float = 1e2
    penalty_stages: int = 5
    step_init: float = 0.25       # fractions of the box width
    step_min: float = 1e-6
    extra_dirs: int = 8           # random directions besides the +/- axes;
    record_trace: bool = False    # axis moves alone stall in narrow cones


@dataclass(frozen=True)
class SolveReport:
    status: SolveStatus
    point: ContinuousPoint | None
    objective_value: float
    max_residual: float           # relative to constraint scales
    starts_used: int
    seed: int
    b_fo: float | None = None     # populated by the min_B_fo objective
    trace: tuple[float, ...] = () # per-stage violation of the incumbent

    @property
    def feasible(self) -> bool:
        return self.status in (SolveStatus.OPTIMAL_LOCAL, SolveStatus.FEASIBLE)


def stable_seed(problem: ContinuousProblem, extra: int | None = None) -> int:
    """Deterministic seed from the assignment, objective and side constraints."""
    payload = repr((
        problem.assign.key,
        problem.objective.value,
        tuple((s.kind, float(s.bound)) for s in problem.side_constraints),
        extra,
    )).encode()
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big") % 2**32


def _min_y_span(p: BuildingParams, rho_w: float, t_hi: float,
                ly_lo: float, ly_hi: float) -> float:
    """Tighten the lower y-span bound with the floor/bending coupling.

    The floor area forces the x wall to at least a_fl/ly + 2t while bending
    tension on the y wall caps it at c * t * (ly + 2t)^2; both evaluated at
    the parameter choices that relax them most, so the returned bound never
    cuts a feasible point.
    """
    h = p.h_wa_min  # the tension cap is tightest-relaxed at minimum height
    factor = (p.sigma_t_allw * MPA + p.g * rho_w * h) \
        / (3.0 * p.p_design * h**2)

    def admissible(ly: float) -> bool:
        need = p.a_fl_min / ly + 2.0 * t_hi
        return need <= factor * t_hi * (ly + 2.0 * t_hi) ** 2 + 1e-12

    if admissible(ly_lo):
        return ly_lo
    if not admissible(ly_hi):
        return ly_hi  # box collapses; residuals will flag infeasibility
    lo, hi = ly_lo, ly_hi
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            hi = mid
        else:
            lo = mid
    return lo  # conservative end of the bracket


def problem_box(problem: ContinuousProblem) -> tuple[np.ndarray, np.ndarray]:
    """Search box (lower, upper) for the free dimensions.

    Beyond the plain variable ranges, bounds implied by the eccentricity
    branch are folded in: the branch pins e = (b - 2 t_fo - t_wa)/2 into a
    fixed interval, which caps the wall and foundation thicknesses given
    the other's minimum.  A tight box sharpens both the start sampling and
    the grid oracle.  Remaining couplings stay residual-enforced.
    """
    p = problem.params
    a = problem.assign
    cx = AssignmentContext.build(problem.assign)
    b = 2.0 if problem.objective is Objective.MIN_B_FO else p.b_fo

    # e >= 0 (low branch) or e >= b/6 (high branch) caps the thicknesses
    e_floor = 0.0 if a.x_e == 0 else b / 6.0
    t_wa_hi = min(p.t_wa_max, b - 2.0 * e_floor - 2.0 * cx.t_fo_min)
    t_fo_hi = min(0.5 * b, 0.5 * (b - 2.0 * e_floor - cx.t_wa_min))

    # roof slab pins the y span; the floor area pins the other span
    slab_lo = a.n_slc * p.w_be
    slab_hi = (a.n_slc - 1) * p.s_be_max + a.n_slc * p.w_be
    ly_lo = max(p.l_fl_min, p.a_fl_min / p.l_fl_max, slab_lo - 2.0 * t_wa_hi)
    ly_hi = min(p.l_fl_max, slab_hi - 2.0 * cx.t_wa_min)
    lx_lo = max(p.l_fl_min, p.a_fl_min / p.l_fl_max)
    lx_hi = p.l_fl_max
    if ly_hi >= ly_lo and t_wa_hi >= cx.t_wa_min:
        ly_lo = max(ly_lo, _min_y_span(p, cx.rho_w, t_wa_hi, ly_lo, ly_hi))
        lx_lo = max(lx_lo, p.a_fl_min / ly_hi)
    if a.x_wa == 1:  # y wall at least as long as x wall
        lx_hi = min(lx_hi, ly_hi)
        ly_lo = max(ly_lo, lx_lo)
    else:
        ly_hi = min(ly_hi, lx_hi)
        lx_lo = max(lx_lo, ly_lo)

    wall_len_hi = max(lx_hi, ly_hi) + 2.0 * t_wa_hi
    open_cap = 0.5 * wall_len_hi

    lo = [cx.t_wa_min, p.h_wa_min, lx_lo, ly_lo,
          cx.t_fo_min, p.w_do_min, p.l_wi_min]
    hi = [t_wa_hi, p.h_wa_max, lx_hi, ly_hi,
          t_fo_hi, max(open_cap, p.w_do_min),
          max(min(0.5 * p.h_wa_max, open_cap), p.l_wi_min)]
    if problem.objective is Objective.MIN_B_FO:
        lo.append(0.01)
        hi.append(2.0)
    return np.array(lo), np.array(hi)


def _batch_eval(problem: ContinuousProblem, cx: AssignmentContext, X: np.ndarray):
    """Evaluate a batch of points: objective, cost, ee, violation aggregates."""
    p = problem.params
    if problem.ndim == 8:
        d = _derive(p, cx, X[..., :7], b_fo=X[..., 7])
    else:
        d = _derive(p, cx, X)
    _, _, values, scales = _residuals(p, cx, d)
    rel = values / scales
    c = _cost(cx, p, d)
    ee = _embodied_energy(cx, p, d)
    area = d["l_x_fl"] * d["l_y_fl"]

    extras = []
    for sc in problem.side_constraints:
        s = max(1.0, abs(sc.bound))
        if sc.kind == "cost_max":
            extras.append((c - sc.bound) / s)
        elif sc.kind == "ee_max":
            extras.append((ee - sc.bound) / s)
        else:  # area_min
            extras.append((sc.bound - area) / s)
    if extras:
        rel = np.concatenate([rel, np.stack(extras, axis=-1)], axis=-1)

    pos = np.maximum(rel, 0.0)
    viol_max = pos.max(axis=-1)
    viol_sum = pos.sum(axis=-1)

    if problem.objective is Objective.MIN_EE:
        obj = ee
    elif problem.objective is Objective.MIN_COST:
        obj = c
    elif problem.objective is Objective.MAX_FLOOR_AREA:
        obj = -area
    elif problem.objective is Objective.MIN_B_FO:
        obj = d["b_fo"]
    else:  # FEASIBILITY
        obj = viol_max
    return np.asarray(obj, float), np.asarray(viol_max, float), \
        np.asarray(viol_sum, float), np.asarray(c, float), np.asarray(ee, float)


def _sobol_starts(lo: np.ndarray, hi: np.ndarray, n: int, seed: int) -> np.ndarray:
    sampler = qmc.Sobol(d=lo.size, scramble=True, seed=seed)
    u = sampler.random_base2(max(1, math.ceil(math.log2(n))))[:n]
    return lo + u * (hi - lo)


def solve_continuous(
    problem: ContinuousProblem, config: SolverConfig = SolverConfig()
) -> SolveReport:
    """Best feasible point across multistart penalty descent.

    Deterministic for a fixed seed: the same problem and config always
    return the same report, regardless of how calls are scheduled.
    """
    if config.starts < 1:
        raise ValueError("config.starts must be at least 1")
    p = problem.params
    cx = AssignmentContext.build(problem.assign)
    seed = stable_seed(problem, config.seed)
    lo, hi = problem_box(problem)
    feas_mode = problem.objective is Objective.FEASIBILITY

    if np.any(lo > hi + 1e-12):
        return SolveReport(
            status=SolveStatus.INFEASIBLE, point=None,
            objective_value=math.inf, max_residual=math.inf,
            starts_used=0, seed=seed,
        )
    width = np.maximum(hi - lo, 1e-12)

    X = _sobol_starts(lo, hi, config.starts, seed)
    S, dim = X.shape

    with np.errstate(all="ignore"):
        obj0, v0, s0, _, _ = _batch_eval(problem, cx, X)
    if not np.any(np.isfinite(obj0)):
        return SolveReport(
            status=SolveStatus.NUMERIC_FAILURE, point=None,
            objective_value=math.nan, max_residual=math.nan,
            starts_used=S, seed=seed,
        )
    f_scale = max(1.0, float(np.nanmedian(np.abs(obj0))))

    # incumbent best-feasible per start, folded in from every evaluation
    best_obj = np.full(S, np.inf)
    best_X = X.copy()
    best_found = np.zeros(S, dtype=bool)

    def fold_in(cand_X, cand_obj, cand_viol):
        # accepts (S, d) vectors or (S, K, d) candidate blocks
        if cand_X.ndim == 2:
            cand_X = cand_X[:, None, :]
            cand_obj = cand_obj.reshape(S, 1)
            cand_viol = cand_viol.reshape(S, 1)
        masked = np.where(cand_viol <= config.tol, cand_obj, np.inf)
        pick = np.argmin(masked, axis=1)
        val = masked[np.arange(S), pick]
        improve = val < best_obj
        rows = np.where(improve)[0]
        best_obj[rows] = val[rows]
        best_X[rows] = cand_X[rows, pick[rows]]
        best_found[rows] = True

    def penalty(obj, viol_sum, mu):
        if feas_mode:
            return obj  # objective already is the violation
        return obj / f_scale + mu * viol_sum

    trace: list[float] = []
    mu = config.penalty_init
    fX = penalty(obj0, s0, mu)
    vX = v0
    fold_in(X, obj0, v0)
    converged = False

    eye = np.eye(dim)
    rng = np.random.default_rng(seed ^ 0x9E3779B9)
    for stage in range(config.penalty_stages):
        step = np.full(S, config.step_init)
        fX = penalty(*_stage_obj(problem, cx, X), mu) if stage else fX
        stage_start_X = X.copy()
        stage_start_v = vX.copy()
        for _ in range(config.iters_per_stage):
            # candidate moves along +/- each axis plus a few random
            # directions, scaled by the per-start step
            if config.extra_dirs > 0:
                rand = rng.standard_normal((S, config.extra_dirs, dim))
                rand /= np.linalg.norm(rand, axis=-1, keepdims=True)
                delta_r = step[:, None, None] * (width[None, None, :] * rand)
            delta = step[:, None, None] * (width[None, None, :] * eye[None, :, :])
            cand = np.concatenate(
                [X[:, None, :] + delta, X[:, None, :] - delta]
                + ([X[:, None, :] + delta_r] if config.extra_dirs > 0 else []),
                axis=1,
            )
            np.clip(cand, lo, hi, out=cand)
            flat = cand.reshape(-1, dim)
            with np.errstate(all="ignore"):
                obj_c, viol_c, sum_c, _, _ = _batch_eval(problem, cx, flat)
            obj_c = np.where(np.isfinite(obj_c), obj_c, np.inf)
            sum_c = np.where(np.isfinite(sum_c), sum_c, np.inf)
            viol_c = np.where(np.isfinite(viol_c), viol_c, np.inf)
            fold_in(cand, obj_c.reshape(S, -1), viol_c.reshape(S, -1))

            f_c = penalty(obj_c, sum_c, mu).reshape(S, -1)
            pick = np.argmin(f_c, axis=1)
            f_pick = f_c[np.arange(S), pick]
            moved = f_pick < fX - 1e-15
            rows = np.where(moved)[0]
            X[rows] = cand.reshape(S, -1, dim)[rows, pick[rows]]
            fX[rows] = f_pick[rows]
            vX[rows] = viol_c.reshape(S, -1)[rows, pick[rows]]
            step[moved] = np.minimum(step[moved] * 2.0, config.step_init)
            step[~moved] *= 0.5
            if np.all(step < config.step_min):
                converged = True
                break
            if feas_mode and np.any(vX <= 0.5 * config.tol):
                converged = True
                break
        # a heavier penalty must not leave a start more violated than the
        # stage found it; revert regressions so violations are monotone
        worse = vX > stage_start_v + 1e-15
        X[worse] = stage_start_X[worse]
        vX[worse] = stage_start_v[worse]
        trace.append(float(np.min(vX)))
        if feas_mode and np.any(vX <= config.tol):
            break
        mu *= config.penalty_growth

    starts_used = S
    if not np.any(best_found):
        # last resort: pure feasibility descent from the current iterates
        if not feas_mode:
            rescue = ContinuousProblem(p, problem.assign, Objective.FEASIBILITY,
                                       problem.side_constraints)
            for _ in range(2 * config.iters_per_stage):
                step_r = np.full(S, 0.1)
                delta = step_r[:, None, None] * (width[None, None, :] * eye[None, :, :])
                cand = np.concatenate([X[:, None, :] + delta,
                                       X[:, None, :] - delta], axis=1)
                np.clip(cand, lo, hi, out=cand)
                flat = cand.reshape(-1, dim)
                with np.errstate(all="ignore"):
                    obj_c, viol_c, _, _, _ = _batch_eval(rescue, cx, flat)
                viol_c = np.where(np.isfinite(viol_c), viol_c, np.inf)
                v_c = viol_c.reshape(S, -1)
                pick = np.argmin(v_c, axis=1)
                better = v_c[np.arange(S), pick] < vX
                rows = np.where(better)[0]
                X[rows] = cand.reshape(S, -1, dim)[rows, pick[rows]]
                vX[rows] = v_c[rows, pick[rows]]
                if not np.any(better):
                    break
            with np.errstate(all="ignore"):
                obj_f, viol_f, _, _, _ = _batch_eval(problem, cx, X)
            fold_in(X, np.where(np.isfinite(obj_f), obj_f, np.inf),
                    np.where(np.isfinite(viol_f), viol_f, np.inf))

    if not np.any(best_found):
        i = int(np.argmin(vX))
        return SolveReport(
            status=SolveStatus.INFEASIBLE,
            point=_to_point(X[i]),
            objective_value=math.inf,
            max_residual=float(vX[i]),
            starts_used=starts_used, seed=seed,
            b_fo=float(X[i, 7]) if dim == 8 else None,
            trace=tuple(trace) if config.record_trace else (),
        )

    # pick the best feasible start; break objective ties toward larger
    # openings (occupants prefer bigger doors and windows)
    cand_idx = np.where(best_found)[0]
    objs = best_obj[cand_idx]
    lead = float(np.min(objs))
    tol_tie = 1e-9 * max(1.0, abs(lead))
    tied = cand_idx[objs <= lead + tol_tie]
    order = sorted(
        tied,
        key=lambda i: (-best_X[i, 5], -best_X[i, 6], i),
    )
    winner = order[0]
    x = best_X[winner]
    with np.errstate(all="ignore"):
        objw, violw, _, _, _ = _batch_eval(problem, cx, x[None, :])
    status = SolveStatus.OPTIMAL_LOCAL if converged else SolveStatus.FEASIBLE
    return SolveReport(
        status=status,
        point=_to_point(x),
        objective_value=float(objw[0]),
        max_residual=float(violw[0]),
        starts_used=starts_used, seed=seed,
        b_fo=float(x[7]) if dim == 8 else None,
        trace=tuple(trace) if config.record_trace else (),
    )


def _stage_obj(problem, cx, X):
    with np.errstate(all="ignore"):
        obj, viol, vsum, _, _ = _batch_eval(problem, cx, X)
    obj = np.where(np.isfinite(obj), obj, np.inf)
    vsum = np.where(np.isfinite(vsum), vsum, np.inf)
    return obj, vsum


def _to_point(x: np.ndarray) -> ContinuousPoint:
    return ContinuousPoint.from_array(x[:7])


def grid_oracle(
    problem: ContinuousProblem,
    resolution: int = 15,
    tol: float = 1e-6,
    chunk: int = 600_000,
    seek_rounds: int = 12,
) -> SolveReport:
    """Exhaustive uniform-grid search over the box, for verification.

    When the coarse grid holds no feasible node (the feasible pocket can be
    thinner than a cell), the grid is re-centered on the least-violating
    node and shrunk, up to ``seek_rounds`` times; once an incumbent exists,
    one refinement pass re-grids its one-cell neighborhood.  A resolution
    of 1 collapses each axis to the box midpoint (testing aid).
    """
    if resolution < 1:
        raise ValueError("resolution must be at least 1")
    p = problem.params
    cx = AssignmentContext.build(problem.assign)
    lo, hi = problem_box(problem)
    if np.any(lo > hi + 1e-12):
        return SolveReport(
            status=SolveStatus.INFEASIBLE, point=None,
            objective_value=math.inf, max_residual=math.inf,
            starts_used=0, seed=0,
        )

    def sweep(lo_s, hi_s):
        """Best feasible (obj, viol, x) and least-violating node on a grid."""
        if resolution == 1:
            axes = [np.array([0.5 * (a + b)]) for a, b in zip(lo_s, hi_s)]
        else:
            axes = [np.linspace(a, b, resolution) for a, b in zip(lo_s, hi_s)]
        dim = len(axes)
        # split axes into outer (python loop) and inner (vectorized) blocks
        inner = dim
        size = resolution**dim if resolution > 1 else 1
        while size > chunk and inner > 1:
            inner -= 1
            size = resolution**inner
        outer_axes, inner_axes = axes[: dim - inner], axes[dim - inner:]
        inner_grid = np.stack(
            [g.ravel() for g in np.meshgrid(*inner_axes, indexing="ij")], axis=-1
        )
        best = (np.inf, np.inf, None)   # objective, violation, x
        calmest = (np.inf, None)        # violation, x
        for head in product(*outer_axes) if outer_axes else [()]:
            block = np.empty((inner_grid.shape[0], dim))
            if head:
                block[:, : len(head)] = np.asarray(head)
            block[:, dim - inner:] = inner_grid
            with np.errstate(all="ignore"):
                obj, viol, _, _, _ = _batch_eval(problem, cx, block)
            viol = np.where(np.isfinite(viol), viol, np.inf)
            k = int(np.argmin(viol))
            if viol[k] < calmest[0]:
                calmest = (float(viol[k]), block[k].copy())
            feas = (viol <= tol) & np.isfinite(obj)
            if np.any(feas):
                j = np.argmin(np.where(feas, obj, np.inf))
                if obj[j] < best[0]:
                    best = (float(obj[j]), float(viol[j]), block[j].copy())
        return best, calmest

    def shrink(center, lo_s, hi_s, cells: float):
        cell = cells * (hi_s - lo_s) / max(resolution - 1, 1)
        return np.maximum(lo, center - cell), np.minimum(hi, center + cell)

    box = (lo, hi)
    best, calmest = sweep(*box)
    rounds = 0
    # feasibility seeking: re-grid around the least-violating node (two
    # cells wide, so a pocket between nodes is not stepped past)
    while best[2] is None and calmest[1] is not None and rounds < seek_rounds \
            and resolution > 1:
        box = shrink(calmest[1], *box, cells=2.0)
        cand, calmest = sweep(*box)
        if cand[2] is not None and cand[0] < best[0]:
            best = cand
        rounds += 1

    if best[2] is not None and resolution > 1:
        # refinement passes around the incumbent, until they stop paying
        for _ in range(4):
            box = shrink(best[2], *box, cells=1.0)
            refined, _ = sweep(*box)
            if refined[2] is None or refined[0] >= best[0] * (1.0 - 1e-4):
                if refined[2] is not None and refined[0] < best[0]:
                    best = refined
                break
            best = refined

    if best[2] is None:
        return SolveReport(
            status=SolveStatus.INFEASIBLE, point=None,
            objective_value=math.inf,
            max_residual=calmest[0] if calmest[1] is not None else math.inf,
            starts_used=0, seed=0,
        )
    x = best[2]
    return SolveReport(
        status=SolveStatus.FEASIBLE,
        point=_to_point(x),
        objective_value=best[0],
        max_residual=best[1],
        starts_used=0, seed=0,
        b_fo=float(x[7]) if problem.ndim == 8 else None,
    )


def feasibility_probe(
    params: BuildingParams,
    assign: DiscreteAssignment,
    config: SolverConfig = SolverConfig(),
) -> bool:
    """True iff some point satisfies every constraint at the tolerance."""
    report = solve_continuous(
        ContinuousProblem(params, assign, Objective.FEASIBILITY), config
    )
    return report.max_residual <= config.tol
