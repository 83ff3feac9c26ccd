"""What-if analyses: price changes (closed form) and floor-area trade-offs.

Price moves never re-solve: a design's stored material volumes give the
exact cost delta, and nondominance is re-filtered. The floor-area sweep
re-solves with the area as the epsilon constraint at a fixed budget.
"""

import buildopt as bo

catalog = bo.default_catalog()
engine = bo.Enumerator(bo.load_scenario({}))

# a small front around the soil-block designs
front = bo.epsilon_constraint_front(engine, 6200.0, 8200.0, steps=20)
best = front.points[0].design
print("cheapest point on this stretch:",
      "/".join(best.material_tuple), round(best.cost), "USD",
      round(best.ee), "GJ")

# how far can the soil-block price rise before the design busts an
# 8,000 USD budget?
limit = bo.price_threshold(best, 8000.0, catalog, "So2")
print(f"soil block G2 can cost up to {limit:.2f} $/m3 "
      f"(catalog price 145.00) within an 8,000 USD budget")

# shift the whole front to that price and look at the survivors
shifted = bo.price_shift(front, catalog, "So2", limit)
print(f"after the price shift the front keeps {len(shifted.points)} of "
      f"{len(front.points)} points; the soil designs now sit at "
      f"{[round(p.x) for p in shifted.points if p.design.assign.wall.name == 'So2']}")

# floor area as the third criterion: fixed budget, larger rooms vs energy
area_front = bo.floor_area_front(engine, fixed_budget=7000.0,
                                 area_lo=10.0, area_hi=13.0, steps=10)
print("\nfloor area vs. embodied energy at a 7,000 USD budget:")
for p in area_front.points:
    print(f"  {p.x:6.2f} m2 -> {p.ee:6.0f} GJ  wall={p.design.assign.wall.name}")

engine.close()
