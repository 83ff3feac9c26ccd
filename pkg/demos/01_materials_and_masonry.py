"""Browse the bundled material catalog and the masonry composite helpers.

The catalog rows carry everything the optimizer needs per material: density,
unit cost, embodied energy, allowable compressive strength and the minimum
buildable thickness. Wall materials double as foundation candidates.
"""

import buildopt as bo

catalog = bo.default_catalog()

print("=== catalog ===")
print(f"{'name':5} {'grade':5} {'class':10} {'kg/m3':>6} {'$/m3':>6} "
      f"{'MJ/kg':>6} {'MPa':>6} {'t_min':>6}")
for m in catalog.entries:
    sigma = f"{m.compressive_strength:.2f}" if m.compressive_strength else "-"
    tmin = f"{m.min_thickness:.2f}" if m.min_thickness else "-"
    print(f"{m.name:5} {m.grade:5} {m.component_class.value:10} "
          f"{m.density:6.0f} {m.unit_cost:6.0f} {m.embodied_energy:6.2f} "
          f"{sigma:>6} {tmin:>6}")

print("\nwall options:      ", [m.name for m in catalog.walls])
print("foundation options:", [m.name for m in catalog.foundations])
print("roof options:      ", [m.name for m in catalog.roofs])
print("cover options:     ", [m.name for m in catalog.covers])

# embodied energy per cubic meter is what actually drives the trade-off
print("\nEE per m3 (wall candidates):")
for m in sorted(catalog.walls, key=lambda m: m.ee_per_m3):
    print(f"  {m.name}: {m.ee_per_m3:8.0f} MJ/m3 at {m.unit_cost:4.0f} $/m3")

# availability scenarios are catalog filters
no_soil = bo.filter_available(catalog, {"So1", "So2"})
print(f"\nwithout soil blocks the wall set shrinks to "
      f"{[m.name for m in no_soil.walls]}")

# composite properties from raw constituent data, for catalog building:
# a unit/mortar pair gives the assembly density and compressive strength
rho = bo.masonry_density(rho_unit=1500, rho_mortar=1800)
f_p = bo.masonry_compressive_strength(f_b=8.0, f_m=3.0)
print(f"\nmasonry from 1500/1800 kg/m3 constituents -> {rho:.0f} kg/m3")
print(f"masonry from 8.0/3.0 MPa constituents      -> {f_p:.2f} MPa")
