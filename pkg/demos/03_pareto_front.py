"""Sweep the budget and draw the cost vs. embodied-energy Pareto front.

A coarse sweep keeps this demo quick; raise the step count (150 is the
production default) for the full-resolution front. With matplotlib
installed, a scatter colored by wall material lands in pareto_front.png.
"""

import time

import buildopt as bo

STEPS = 40  # coarse for demo speed

engine = bo.Enumerator(bo.load_scenario({}))
t0 = time.time()
front = bo.epsilon_constraint_front(engine, 4500.0, 9000.0, steps=STEPS)
print(f"{len(front.points)} nondominated points from a {STEPS}-step sweep "
      f"({time.time() - t0:.0f}s)")

print("\ndesign families on the front (cost-ordered):")
for c in bo.cluster_designs(front):
    print(f"  {c.label}: {'/'.join(c.materials)} slices={c.n_slc} "
          f"cost {c.cost_range[0]:,.0f}-{c.cost_range[1]:,.0f} USD, "
          f"EE {c.ee_range[0]:.0f}-{c.ee_range[1]:.0f} GJ")

csv_text = bo.front_to_csv(front)
with open("pareto_front.csv", "w") as fh:
    fh.write(csv_text)
print("\nwrote pareto_front.csv")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    walls = sorted({p.design.assign.wall.name for p in front.points})
    colors = dict(zip(walls, plt.cm.tab10.colors))
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for wall in walls:
        pts = [p for p in front.points if p.design.assign.wall.name == wall]
        ax.scatter([p.x for p in pts], [p.ee for p in pts],
                   label=f"wall: {wall}", color=colors[wall], s=24)
    ax.set_xlabel("cost (USD)")
    ax.set_ylabel("embodied energy (GJ)")
    ax.set_title("budget vs. embodied energy trade-off")
    ax.legend()
    fig.tight_layout()
    fig.savefig("pareto_front.png", dpi=130)
    print("wrote pareto_front.png")
except ImportError:
    print("matplotlib not installed; skipped the plot")

engine.close()
