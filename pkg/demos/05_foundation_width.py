"""Safety-threshold analysis: when does stone become a usable wall material?

At the default 0.80 m foundation width no stone-walled design is feasible:
the eccentricity bound couples wall and foundation thickness, and stone's
0.35 m minimum wall cannot coexist with any foundation at that width. The
bisection below finds the smallest width at which the coupling opens up.
"""

import time

import buildopt as bo

scenario = bo.load_scenario({})

for wall in ("St2", "St1", "Br2"):
    t0 = time.time()
    width = bo.min_feasible_foundation_width(scenario, wall)
    took = time.time() - t0
    if width is None:
        print(f"{wall}: never feasible up to 2.0 m ({took:.0f}s)")
    else:
        print(f"{wall}: feasible from {width:.3f} m foundation width "
              f"({took:.0f}s)")

# with the width raised to 0.81, stone designs join the front at a much
# lower cost (and much higher embodied energy) than brick
wide = bo.load_scenario({"param_overrides": {"B_fo": 0.81}})
engine = bo.Enumerator(wide)
front = bo.epsilon_constraint_front(engine, 3500.0, 5000.0, steps=25)
engine.close()
print("\nfront at B_fo = 0.81 m:")
for c in bo.cluster_designs(front):
    print(f"  {c.label}: {'/'.join(c.materials)} "
          f"cost {c.cost_range[0]:,.0f}-{c.cost_range[1]:,.0f} USD, "
          f"EE {c.ee_range[0]:.0f}-{c.ee_range[1]:.0f} GJ")
