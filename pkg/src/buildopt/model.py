"""Analytical model of a multi-room one-story masonry building.

Everything here is a pure function of three inputs: fixed parameters
(:class:`BuildingParams`), the discrete choices (:class:`DiscreteAssignment`,
i.e. materials, roof slice count, rebar count and the two logical branch
bits), and the free continuous dimensions (:class:`ContinuousPoint`).

All intermediate quantities (wall lengths, volumes, forces, moments,
section moduli, eccentricity) are eliminated by substitution into
:class:`DerivedState`, so the constraint system consists purely of
inequalities.  Internally everything is SI: meters, kilograms, newtons,
pascals, megajoules.  Catalog stress limits arrive in MPa and are converted
once, here.

The private ``_derive``/``_residuals``/``_objectives`` helpers operate on
numpy arrays so that solvers can evaluate thousands of candidate points in
one call; the public functions wrap them for scalar use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .materials import ComponentClass, MaterialSpec

MPA = 1.0e6  # MPa -> Pa


@dataclass(frozen=True)
class BuildingParams:
    """Fixed model parameters with the Nepal case-study defaults.

    Lengths m, areas m2, pressures N/m2, stresses MPa, costs USD,
    embodied energy MJ/kg.
    """

    n_rm: int = 3                 # number of rooms in a row
    a_fl_min: float = 10.0        # minimum floor area per room
    l_fl_min: float = 2.0         # floor span bounds (each direction)
    l_fl_max: float = 4.5
    h_wa_min: float = 2.7         # wall height bounds
    h_wa_max: float = 3.8
    t_wa_max: float = 1.1         # maximum wall thickness
    h_do: float = 2.0             # door height
    w_do_min: float = 1.1         # minimum door width
    l_wi_min: float = 0.7         # minimum window edge (windows are square)
    n_re_min: int = 2             # minimum rebar frame count per door
    d_re: float = 0.012           # rebar diameter
    s_re_min: float = 0.05        # minimum rebar spacing
    c_re: float = 17.3            # rebar cost, USD/m
    e_re: float = 37.95           # rebar embodied energy, MJ/kg
    rho_re: float = 0.89          # rebar linear density, kg/m
    p_live: float = 2000.0        # live load
    p_design: float = 8120.0      # design wind pressure
    c_f: float = 1.0              # wind load coefficient
    seismic_c: float = 0.08       # seismic coefficient factors; their
    seismic_z: float = 1.1        # product is the design coefficient c_d
    seismic_i: float = 1.0
    seismic_k: float = 4.0
    tau_allw: float = 0.5         # allowable shear, MPa
    sigma_t_allw: float = 0.12    # allowable tension, MPa
    g: float = 9.8                # gravity, N/kg
    a_be: float = 0.0253          # beam cross-section area
    a_ra: float = 0.0065          # rafter cross-section area
    w_be: float = 0.11            # beam width
    s_be_max: float = 0.5         # maximum beam spacing
    r_be: float = 0.4027          # rafter rise per unit beam length
    r_co: float = 0.0628          # cover volume per unit roof volume
    n_slc_min: int = 2            # roof slice count bounds
    n_slc_max: int = 20
    h_fo: float = 1.1             # foundation height
    b_fo: float = 0.8             # foundation width
    b_avail: float = math.inf     # available budget, USD

    def __post_init__(self) -> None:
        if self.n_rm < 1:
            raise ValueError("n_rm must be at least 1")
        pairs = [
            ("l_fl_min", "l_fl_max"),
            ("h_wa_min", "h_wa_max"),
            ("n_slc_min", "n_slc_max"),
        ]
        for lo, hi in pairs:
            if getattr(self, lo) > getattr(self, hi):
                raise ValueError(f"{lo} must not exceed {hi}")
        for name in (
            "a_fl_min", "l_fl_min", "h_wa_min", "t_wa_max", "h_do", "w_do_min",
            "l_wi_min", "d_re", "s_re_min", "p_live", "p_design", "tau_allw",
            "sigma_t_allw", "g", "a_be", "a_ra", "w_be", "s_be_max", "r_be",
            "r_co", "h_fo", "b_fo",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def c_d(self) -> float:
        """Seismic design coefficient, always recomputed from its factors."""
        return self.seismic_c * self.seismic_z * self.seismic_i * self.seismic_k

    @property
    def m_wa(self) -> float:
        """Indicator big-M for the wall-aspect disjunction.

        Valid because the wall lengths differ by exactly the floor-span
        difference, which is bounded by the span range.
        """
        return self.l_fl_max - self.l_fl_min


#: override-file key -> BuildingParams field
PARAM_KEYS: dict[str, str] = {
    "B_avail": "b_avail",
    "C_re": "c_re",
    "n_rm": "n_rm",
    "g": "g",
    "A_fl": "a_fl_min",
    "C_f": "c_f",
    "C": "seismic_c",
    "Z": "seismic_z",
    "I": "seismic_i",
    "K": "seismic_k",
    "d_re": "d_re",
    "E_re": "e_re",
    "h_wa_min": "h_wa_min",
    "h_wa_max": "h_wa_max",
    "h_do": "h_do",
    "l_wi_min": "l_wi_min",
    "n_re_min": "n_re_min",
    "P_L": "p_live",
    "P_design": "p_design",
    "rho_re": "rho_re",
    "tau_allw": "tau_allw",
    "s_re_min": "s_re_min",
    "t_wa_max": "t_wa_max",
    "sigma_t_allw": "sigma_t_allw",
    "w_do_min": "w_do_min",
    "A_be": "a_be",
    "A_ra": "a_ra",
    "l_fl_min": "l_fl_min",
    "l_fl_max": "l_fl_max",
    "n_slc_min": "n_slc_min",
    "n_slc_max": "n_slc_max",
    "R_be": "r_be",
    "R_co": "r_co",
    "s_be_max": "s_be_max",
    "w_be": "w_be",
    "h_fo": "h_fo",
    "B_fo": "b_fo",
}

_INT_FIELDS = {"n_rm", "n_re_min", "n_slc_min", "n_slc_max"}


def apply_overrides(
    params: BuildingParams, overrides: Mapping[str, float]
) -> BuildingParams:
    """Return params with symbol-keyed overrides applied; unknown keys are errors."""
    updates: dict[str, float | int] = {}
    for key, value in overrides.items():
        if key not in PARAM_KEYS:
            raise KeyError(f"unknown parameter key: {key}")
        attr = PARAM_KEYS[key]
        updates[attr] = int(value) if attr in _INT_FIELDS else float(value)
    return replace(params, **updates)


def parse_param_overrides(text: str) -> dict[str, float]:
    """Parse a flat ``key=value`` override document ('#' starts a comment)."""
    overrides: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in PARAM_KEYS:
            raise KeyError(f"line {lineno}: unknown parameter key: {key}")
        overrides[key] = float(value.strip())
    return overrides


@dataclass(frozen=True)
class DiscreteAssignment:
    """One point of the discrete search space."""

    wall: MaterialSpec
    foundation: MaterialSpec
    roof: MaterialSpec
    cover: MaterialSpec
    n_slc: int
    n_re: int = 2
    x_e: int = 0   # 1 iff eccentricity is in the high regime (>= b_fo/6)
    x_wa: int = 0  # 1 iff the y wall is at least as long as the x wall

    def __post_init__(self) -> None:
        if self.wall.component_class is not ComponentClass.WALL:
            raise ValueError(f"{self.wall.name} is not a wall material")
        if self.foundation.component_class not in (
            ComponentClass.WALL,
            ComponentClass.FOUNDATION,
        ):
            raise ValueError(f"{self.foundation.name} is not a foundation material")
        if self.roof.component_class is not ComponentClass.ROOF:
            raise ValueError(f"{self.roof.name} is not a roof material")
        if self.cover.component_class is not ComponentClass.ROOF_COVER:
            raise ValueError(f"{self.cover.name} is not a roof covering")
        if self.n_slc < 1 or self.n_re < 1:
            raise ValueError("n_slc and n_re must be positive")
        if self.x_e not in (0, 1) or self.x_wa not in (0, 1):
            raise ValueError("branch bits must be 0 or 1")

    @property
    def material_tuple(self) -> tuple[str, str, str, str]:
        return (self.wall.name, self.foundation.name, self.roof.name, self.cover.name)

    @property
    def key(self) -> tuple:
        """Stable ordering/caching key."""
        return self.material_tuple + (self.n_slc, self.n_re, self.x_e, self.x_wa)


@dataclass(frozen=True)
class ContinuousPoint:
    """The seven free continuous dimensions (all meters)."""

    t_wa: float    # wall thickness
    h_wa: float    # wall height
    l_x_fl: float  # floor span, x
    l_y_fl: float  # floor span, y
    t_fo: float    # foundation wall thickness
    w_do: float    # door width
    l_wi: float    # window edge length

    DIMS = ("t_wa", "h_wa", "l_x_fl", "l_y_fl", "t_fo", "w_do", "l_wi")

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, d) for d in self.DIMS], dtype=float)

    @classmethod
    def from_array(cls, x: np.ndarray) -> "ContinuousPoint":
        return cls(*(float(v) for v in np.asarray(x, dtype=float)))


@dataclass(frozen=True)
class DerivedState:
    """Every derived quantity, evaluated from (params, assignment, point)."""

    point: ContinuousPoint
    l_x_wa: float      # wall lengths (floor span plus two thicknesses)
    l_y_wa: float
    a_wa_x: float      # wall cross-section areas
    a_wa_y: float
    s_x: float         # section moduli
    s_y: float
    v_wa: float        # wall volume per room, net of openings
    v_wa_tot: float    # whole-building wall volume (shared walls once)
    l_re: float        # rebar length per room
    l_re_tot: float
    v_slc: float       # one roof slice (beam plus two rafters)
    v_slc_tot: float
    v_co_tot: float    # roof covering volume
    q_ro: float        # roof mass per room, kg
    p_d_wa: float      # wall self-weight per unit length, N/m
    f_d_x_wa: float    # dead load on the x wall, N
    f_l_x_wa: float    # live load on the x wall, N
    f_w_x: float       # wind forces, N
    f_w_y: float
    m_w_x: float       # wind moments, N m
    m_w_y: float
    f_1: float         # seismic base force, N
    f_e: float         # seismic force per wall, N
    m_e_x: float       # seismic moment, N m
    a_fo: float        # foundation cross-section area
    p_d_fo: float      # foundation self-weight per unit length, N/m
    f_d_x_fo: float    # total weight on the x foundation strip, N
    v_fo_tot: float    # whole-building foundation volume
    e: float           # load-path eccentricity
    geometry_ok: bool  # False when openings exceed the wall face


@dataclass(frozen=True)
class ResidualVector:
    """Signed constraint residuals; value <= 0 means satisfied.

    ``scales`` holds the magnitude of each constraint's right-hand side so
    that feasibility can be judged relative to it.
    """

    ids: tuple[str, ...]
    groups: tuple[str, ...]
    values: np.ndarray
    scales: np.ndarray

    def __iter__(self):
        return iter(zip(self.ids, self.values))

    def as_dict(self) -> dict[str, float]:
        return {i: float(v) for i, v in zip(self.ids, self.values)}

    @property
    def relative(self) -> np.ndarray:
        return self.values / self.scales

    @property
    def max_relative(self) -> float:
        return float(np.max(self.relative))

    def worst_group(self) -> str:
        return self.groups[int(np.argmax(self.relative))]


def is_feasible(residuals: ResidualVector, tol: float = 1e-6) -> bool:
    """True iff every residual is within tol of its constraint scale (closed)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return bool(np.all(residuals.values <= tol * residuals.scales))


# ---------------------------------------------------------------------------
# assignment context: the scalars an assignment contributes to the kernel


@dataclass(frozen=True)
class AssignmentContext:
    rho_w: float
    rho_f: float
    rho_r: float
    rho_c: float
    sigma_c_pa: float  # allowable wall compression, Pa
    cost_w: float
    cost_f: float
    cost_r: float
    cost_c: float
    eev_w: float  # embodied energy per m3
    eev_f: float
    eev_r: float
    eev_c: float
    t_wa_min: float
    t_fo_min: float
    n_slc: int
    n_re: int
    x_e: int
    x_wa: int

    @classmethod
    def build(cls, assign: DiscreteAssignment) -> "AssignmentContext":
        w, f, r, c = assign.wall, assign.foundation, assign.roof, assign.cover
        return cls(
            rho_w=w.density, rho_f=f.density, rho_r=r.density, rho_c=c.density,
            sigma_c_pa=w.compressive_strength * MPA,
            cost_w=w.unit_cost, cost_f=f.unit_cost,
            cost_r=r.unit_cost, cost_c=c.unit_cost,
            eev_w=w.ee_per_m3, eev_f=f.ee_per_m3,
            eev_r=r.ee_per_m3, eev_c=c.ee_per_m3,
            t_wa_min=w.min_thickness, t_fo_min=f.min_thickness,
            n_slc=assign.n_slc, n_re=assign.n_re,
            x_e=assign.x_e, x_wa=assign.x_wa,
        )


def _derive(p: BuildingParams, cx: AssignmentContext, x: np.ndarray,
            b_fo=None) -> dict:
    """Vectorized derived-state evaluation; x has shape (..., 7)."""
    t_wa, h_wa, l_x_fl, l_y_fl, t_fo, w_do, l_wi = np.moveaxis(x, -1, 0)
    b = p.b_fo if b_fo is None else b_fo

    l_x_wa = l_x_fl + 2.0 * t_wa
    l_y_wa = l_y_fl + 2.0 * t_wa
    a_wa_x = t_wa * l_x_wa
    a_wa_y = t_wa * l_y_wa
    s_x = t_wa * l_x_wa**2 / 6.0
    s_y = t_wa * l_y_wa**2 / 6.0

    v_wa = t_wa * (2.0 * h_wa * (l_y_fl + l_x_wa) - (w_do * p.h_do + l_wi**2))
    v_wa_tot = p.n_rm * v_wa - (p.n_rm - 1) * t_wa * h_wa * l_x_wa
    l_re = cx.n_re * 2.0 * (w_do + p.h_do) + 4.0 * l_wi
    l_re_tot = p.n_rm * l_re

    half = l_x_wa / 2.0
    v_slc = p.a_be * l_x_wa + 2.0 * p.a_ra * np.sqrt((p.r_be * half) ** 2 + half**2)
    v_slc_tot = p.n_rm * cx.n_slc * v_slc
    v_co_tot = p.r_co * v_slc_tot
    q_ro = cx.n_slc * v_slc * (cx.rho_r + p.r_co * cx.rho_c)

    p_d_wa = p.g * t_wa * h_wa * cx.rho_w
    f_d_x_wa = p_d_wa * l_x_wa + 0.5 * p.g * q_ro
    f_l_x_wa = 0.5 * p.p_live * l_x_wa * t_wa
    f_w_x = 0.5 * p.c_f * l_y_wa * h_wa * p.p_design
    f_w_y = 0.5 * p.c_f * l_x_wa * h_wa * p.p_design
    m_w_x = f_w_x * h_wa
    m_w_y = f_w_y * h_wa
    f_1 = p.g * p.c_d * v_wa * cx.rho_w
    f_e = 0.5 * f_1
    m_e_x = f_e * h_wa

    a_fo = b * p.h_fo - 2.0 * t_fo * (p.h_fo - t_fo)
    p_d_fo = p.g * a_fo * cx.rho_f
    f_d_x_fo = p_d_fo * l_x_wa + f_d_x_wa
    v_fo_tot = (2.0 * p.n_rm * (l_y_wa - 2.0 * t_fo) + (p.n_rm + 1) * l_x_wa) * a_fo
    e = 0.5 * (b - 2.0 * t_fo - t_wa)

    return {
        "t_wa": t_wa, "h_wa": h_wa, "l_x_fl": l_x_fl, "l_y_fl": l_y_fl,
        "t_fo": t_fo, "w_do": w_do, "l_wi": l_wi, "b_fo": b,
        "l_x_wa": l_x_wa, "l_y_wa": l_y_wa, "a_wa_x": a_wa_x, "a_wa_y": a_wa_y,
        "s_x": s_x, "s_y": s_y, "v_wa": v_wa, "v_wa_tot": v_wa_tot,
        "l_re": l_re, "l_re_tot": l_re_tot, "v_slc": v_slc,
        "v_slc_tot": v_slc_tot, "v_co_tot": v_co_tot, "q_ro": q_ro,
        "p_d_wa": p_d_wa, "f_d_x_wa": f_d_x_wa, "f_l_x_wa": f_l_x_wa,
        "f_w_x": f_w_x, "f_w_y": f_w_y, "m_w_x": m_w_x, "m_w_y": m_w_y,
        "f_1": f_1, "f_e": f_e, "m_e_x": m_e_x, "a_fo": a_fo,
        "p_d_fo": p_d_fo, "f_d_x_fo": f_d_x_fo, "v_fo_tot": v_fo_tot, "e": e,
    }


def _residuals(p: BuildingParams, cx: AssignmentContext, d: dict):
    """Vectorized residual evaluation on a derived dict; returns
    (ids, groups, values, scales) with values shaped (..., n_con)."""
    tau = p.tau_allw * MPA
    sig_t = p.sigma_t_allw * MPA
    sig_c = cx.sigma_c_pa
    b = d["b_fo"]

    tiny = 1e-12
    ax = np.maximum(d["a_wa_x"], tiny)
    ay = np.maximum(d["a_wa_y"], tiny)
    sx = np.maximum(d["s_x"], tiny)
    sy = np.maximum(d["s_y"], tiny)
    t_wa = np.maximum(d["t_wa"], tiny)

    axial_x = (d["f_d_x_wa"] + d["f_l_x_wa"]) / ax
    axial_y = d["p_d_wa"] / t_wa

    # foundation bearing shear; the low- and high-eccentricity regimes use
    # different stress formulas, selected by the enumerated branch bit
    if cx.x_e == 0:
        spread = 1.0 / b + 6.0 * d["t_fo"] * d["e"] / b**3
        fo_x = 1.5 / np.maximum(d["l_x_wa"], tiny) \
            * (d["f_d_x_fo"] + d["f_l_x_wa"]) * spread
        fo_y = 1.5 * (d["p_d_fo"] + d["p_d_wa"]) * spread
    else:
        contact = np.maximum(b - 2.0 * d["e"], tiny)
        lift = 1.0 + d["t_fo"] / b
        fo_x = lift * (d["f_d_x_fo"] + d["f_l_x_wa"]) \
            / (np.maximum(d["l_x_wa"], tiny) * contact)
        fo_y = lift * (d["p_d_fo"] + d["p_d_wa"]) / contact
    # eccentricity range implied by the branch bit:
    #   x_e=0 -> 0 <= e <= b/6,   x_e=1 -> b/6 <= e <= b/3
    ecc_lo = (b / 6.0) * cx.x_e - d["e"]
    ecc_hi = d["e"] - (b / 6.0) * (1.0 + cx.x_e)

    # opening limits use the longer wall, as selected by the aspect bit
    l_sel = d["l_y_wa"] if cx.x_wa == 1 else d["l_x_wa"]
    aspect = d["l_x_wa"] - d["l_y_wa"] if cx.x_wa == 1 else d["l_y_wa"] - d["l_x_wa"]

    one = np.ones_like(d["t_wa"])
    rows = [
        # --- bounds ---
        ("t_wa_lo", "bounds", cx.t_wa_min - d["t_wa"], 1.0),
        ("t_wa_hi", "bounds", d["t_wa"] - p.t_wa_max, 1.0),
        ("h_wa_lo", "bounds", p.h_wa_min - d["h_wa"], 1.0),
        ("h_wa_hi", "bounds", d["h_wa"] - p.h_wa_max, 1.0),
        ("l_x_fl_lo", "bounds", p.l_fl_min - d["l_x_fl"], 1.0),
        ("l_x_fl_hi", "bounds", d["l_x_fl"] - p.l_fl_max, 1.0),
        ("l_y_fl_lo", "bounds", p.l_fl_min - d["l_y_fl"], 1.0),
        ("l_y_fl_hi", "bounds", d["l_y_fl"] - p.l_fl_max, 1.0),
        ("t_fo_lo", "bounds", cx.t_fo_min - d["t_fo"], 1.0),
        ("t_fo_hi", "bounds", d["t_fo"] - 0.5 * b, 1.0),
        ("w_do_lo", "bounds", p.w_do_min - d["w_do"], 1.0),
        ("l_wi_lo", "bounds", p.l_wi_min - d["l_wi"], 1.0),
        ("fo_min_halfwidth", "bounds", cx.t_fo_min - 0.5 * b + 0.0 * one, 1.0),
        ("wall_volume_nonneg", "bounds", -d["v_wa"], 1.0),
        # --- roof ---
        ("roof_lo", "roof", cx.n_slc * p.w_be - d["l_y_wa"], 1.0),
        ("roof_hi", "roof",
         d["l_y_wa"] - ((cx.n_slc - 1) * p.s_be_max + cx.n_slc * p.w_be), 1.0),
        # --- floor area ---
        ("floor_area", "floor_area",
         p.a_fl_min - d["l_x_fl"] * d["l_y_fl"], p.a_fl_min),
        # --- wall stresses, x direction ---
        ("wall_x_comp_wind", "wall_stress_x", axial_x + d["m_w_x"] / sx - sig_c, sig_c),
        ("wall_x_comp_seis", "wall_stress_x", axial_x + d["m_e_x"] / sx - sig_c, sig_c),
        ("wall_x_ten_wind", "wall_stress_x", -axial_x + d["m_w_x"] / sx - sig_t, sig_t),
        ("wall_x_ten_seis", "wall_stress_x", -axial_x + d["m_e_x"] / sx - sig_t, sig_t),
        ("wall_x_shear_wind", "wall_stress_x", 1.5 * d["f_w_x"] / ax - tau, tau),
        ("wall_x_shear_seis", "wall_stress_x", 1.5 * d["f_e"] / ax - tau, tau),
        # --- wall stresses, y direction ---
        ("wall_y_comp_wind", "wall_stress_y", axial_y + d["m_w_y"] / sy - sig_c, sig_c),
        ("wall_y_comp_seis", "wall_stress_y", axial_y + d["m_e_x"] / sy - sig_c, sig_c),
        ("wall_y_ten_wind", "wall_stress_y", -axial_y + d["m_w_y"] / sy - sig_t, sig_t),
        ("wall_y_ten_seis", "wall_stress_y", -axial_y + d["m_e_x"] / sy - sig_t, sig_t),
        ("wall_y_shear_wind", "wall_stress_y", 1.5 * d["f_w_y"] / ay - tau, tau),
        ("wall_y_shear_seis", "wall_stress_y", 1.5 * d["f_e"] / ay - tau, tau),
        # --- foundation ---
        ("fo_shear_x", "foundation", fo_x - tau, tau),
        ("fo_shear_y", "foundation", fo_y - tau, tau),
        ("fo_ecc_lo", "foundation", ecc_lo, 1.0),
        ("fo_ecc_hi", "foundation", ecc_hi, 1.0),
        # --- openings ---
        ("open_door", "openings", d["w_do"] - 0.5 * l_sel, 1.0),
        ("open_window", "openings", d["l_wi"] - 0.5 * l_sel, 1.0),
        ("window_height", "openings", d["l_wi"] - 0.5 * d["h_wa"], 1.0),
        ("rebar_spacing", "openings",
         cx.n_re * p.d_re + (cx.n_re - 1) * p.s_re_min - d["t_wa"], 1.0),
        ("aspect_branch", "openings", aspect, max(1.0, p.m_wa)),
    ]
    ids = tuple(r[0] for r in rows)
    groups = tuple(r[1] for r in rows)
    values = np.stack([np.broadcast_to(r[2], one.shape) for r in rows], axis=-1)
    scales = np.array([r[3] for r in rows], dtype=float)
    return ids, groups, values, scales


def _cost(cx: AssignmentContext, p: BuildingParams, d: dict):
    return (
        d["v_slc_tot"] * cx.cost_r
        + d["v_co_tot"] * cx.cost_c
        + d["v_wa_tot"] * cx.cost_w
        + d["v_fo_tot"] * cx.cost_f
        + d["l_re_tot"] * p.c_re
    )


def _embodied_energy(cx: AssignmentContext, p: BuildingParams, d: dict):
    return (
        d["v_slc_tot"] * cx.eev_r
        + d["v_co_tot"] * cx.eev_c
        + d["v_wa_tot"] * cx.eev_w
        + d["v_fo_tot"] * cx.eev_f
        + d["l_re_tot"] * p.e_re * p.rho_re
    )


# ---------------------------------------------------------------------------
# public scalar API


def derive_state(
    params: BuildingParams, assign: DiscreteAssignment, point: ContinuousPoint
) -> DerivedState:
    """Evaluate every derived quantity at one point (pure, total).

    Inconsistent geometry (openings larger than the wall face) is flagged
    via ``geometry_ok`` rather than raised, so searches can penalize it.
    """
    cx = AssignmentContext.build(assign)
    d = _derive(params, cx, point.as_array())
    return DerivedState(
        point=point,
        l_x_wa=float(d["l_x_wa"]), l_y_wa=float(d["l_y_wa"]),
        a_wa_x=float(d["a_wa_x"]), a_wa_y=float(d["a_wa_y"]),
        s_x=float(d["s_x"]), s_y=float(d["s_y"]),
        v_wa=float(d["v_wa"]), v_wa_tot=float(d["v_wa_tot"]),
        l_re=float(d["l_re"]), l_re_tot=float(d["l_re_tot"]),
        v_slc=float(d["v_slc"]), v_slc_tot=float(d["v_slc_tot"]),
        v_co_tot=float(d["v_co_tot"]), q_ro=float(d["q_ro"]),
        p_d_wa=float(d["p_d_wa"]), f_d_x_wa=float(d["f_d_x_wa"]),
        f_l_x_wa=float(d["f_l_x_wa"]),
        f_w_x=float(d["f_w_x"]), f_w_y=float(d["f_w_y"]),
        m_w_x=float(d["m_w_x"]), m_w_y=float(d["m_w_y"]),
        f_1=float(d["f_1"]), f_e=float(d["f_e"]), m_e_x=float(d["m_e_x"]),
        a_fo=float(d["a_fo"]), p_d_fo=float(d["p_d_fo"]),
        f_d_x_fo=float(d["f_d_x_fo"]), v_fo_tot=float(d["v_fo_tot"]),
        e=float(d["e"]),
        geometry_ok=bool(d["v_wa"] >= 0.0),
    )


def _state_dict(params: BuildingParams, state: DerivedState) -> dict:
    d = {k: np.asarray(getattr(state, k)) for k in (
        "l_x_wa", "l_y_wa", "a_wa_x", "a_wa_y", "s_x", "s_y", "v_wa",
        "v_wa_tot", "l_re", "l_re_tot", "v_slc", "v_slc_tot", "v_co_tot",
        "q_ro", "p_d_wa", "f_d_x_wa", "f_l_x_wa", "f_w_x", "f_w_y", "m_w_x",
        "m_w_y", "f_1", "f_e", "m_e_x", "a_fo", "p_d_fo", "f_d_x_fo",
        "v_fo_tot", "e",
    )}
    for dim in ContinuousPoint.DIMS:
        d[dim] = np.asarray(getattr(state.point, dim))
    d["b_fo"] = params.b_fo
    return d


def constraint_residuals(
    params: BuildingParams, assign: DiscreteAssignment, state: DerivedState
) -> ResidualVector:
    """Signed residuals of every inequality at the given state."""
    cx = AssignmentContext.build(assign)
    ids, groups, values, scales = _residuals(params, cx, _state_dict(params, state))
    return ResidualVector(
        ids=ids, groups=groups,
        values=np.asarray(values, dtype=float).reshape(-1),
        scales=scales,
    )


def cost(
    params: BuildingParams, assign: DiscreteAssignment, state: DerivedState
) -> float:
    """Total material cost, USD."""
    cx = AssignmentContext.build(assign)
    return float(_cost(cx, params, _state_dict(params, state)))


def embodied_energy(
    params: BuildingParams, assign: DiscreteAssignment, state: DerivedState
) -> float:
    """Total embodied energy, MJ (divide by 1000 for the GJ usually reported)."""
    cx = AssignmentContext.build(assign)
    return float(_embodied_energy(cx, params, _state_dict(params, state)))
