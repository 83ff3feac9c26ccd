"""Evaluate one design by hand, then let the optimizer find the best one.

Shows the three layers of the model: derived state (pure algebra), the
signed constraint residuals, and the two objectives. Then runs the global
search at a fixed budget.
"""

import time

import buildopt as bo

catalog = bo.default_catalog()
params = bo.BuildingParams()

# pick a discrete configuration: soil-block walls on a brick foundation,
# eight wood-framed roof slices with plywood cover
assign = bo.DiscreteAssignment(
    wall=catalog.get(bo.ComponentClass.WALL, "So2"),
    foundation=catalog.get(bo.ComponentClass.FOUNDATION, "Br2"),
    roof=catalog.get(bo.ComponentClass.ROOF, "Wo"),
    cover=catalog.get(bo.ComponentClass.ROOF_COVER, "Pl"),
    n_slc=8, x_e=0, x_wa=1,
)

# and a geometry: 0.34 m walls, minimum height, a 3.13 x 3.20 m floor
point = bo.ContinuousPoint(t_wa=0.34, h_wa=2.7, l_x_fl=3.13, l_y_fl=3.2,
                           t_fo=0.23, w_do=1.5, l_wi=1.2)

state = bo.derive_state(params, assign, point)
print("wall volume (whole building):", round(state.v_wa_tot, 2), "m3")
print("foundation volume:           ", round(state.v_fo_tot, 2), "m3")
print("roof + cover volume:         ",
      round(state.v_slc_tot + state.v_co_tot, 2), "m3")
print("load-path eccentricity:      ", round(state.e, 4), "m")

residuals = bo.constraint_residuals(params, assign, state)
print("\nworst residual group:", residuals.worst_group(),
      f"(max relative {residuals.max_relative:.2e})")
print("feasible:", bo.is_feasible(residuals))
print("cost: ", round(bo.cost(params, assign, state)), "USD")
print("EE:   ", round(bo.embodied_energy(params, assign, state) / 1000), "GJ")

# now search everything: materials, slice count, branch bits and geometry
print("\n=== global solve at a 6,500 USD budget ===")
t0 = time.time()
engine = bo.Enumerator(bo.load_scenario({}))
design = engine.solve_minlp(budget=6500.0)
engine.close()
print(f"found in {time.time() - t0:.0f}s:")
print("  materials:", "/".join(design.material_tuple),
      "  slices:", design.assign.n_slc)
print("  cost:", round(design.cost), "USD   EE:", round(design.ee), "GJ")
print("  door width:", round(design.point.w_do, 2), "m",
      "  window:", round(design.point.l_wi, 2), "m")
