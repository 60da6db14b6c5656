"""Pit the structured search against its baselines on one workload.

Everyone gets the same 2000-sample budget.  The grid baseline sweeps
array shapes with a fixed dataflow; the fixed-HW baseline evolves
mappings on a preset array; random and the flat GA are blind.
"""

from mapforge import (GaConfig, builtin_model, builtin_platform,
                      grid_search_hw, mapping_opt_fixed_hw, random_search,
                      run_search, std_ga)

model = builtin_model("convnet3")
platform = builtin_platform("edge")
BUDGET = 2000


def config(seed=0):
    return GaConfig(population_size=50, sample_budget=BUDGET, rng_seed=seed)


entries = [
    ("co-search", lambda: run_search(model, platform, config=config())),
    ("flat ga", lambda: std_ga(model, platform, config=config())),
    ("random", lambda: random_search(model, platform, sample_budget=BUDGET)),
    ("hw grid + dla", lambda: grid_search_hw(model, platform, template="dla",
                                             sample_budget=BUDGET)),
    ("fixed hw, medium", lambda: mapping_opt_fixed_hw(model, platform,
                                                      preset="medium",
                                                      config=config())),
]

print("workload %s, edge budget, %d samples each\n" % (model.name, BUDGET))
print("%-18s %12s %12s %10s" % ("scheme", "latency", "energy", "area mm2"))
rows = []
for name, fn in entries:
    r = fn().best_report
    rows.append((name, r.cycles))
    print("%-18s %12d %12.3g %10.4f" % (name, r.cycles, r.energy_pj, r.area_mm2))

best = min(rows, key=lambda t: t[1])
print("\n%s wins; ratios vs it:" % best[0])
for name, cycles in rows:
    print("  %-18s %.2fx" % (name, cycles / best[1]))
