"""Run one small co-search and watch the trace converge.

Two thousand samples on the bundled mixed conv+gemm workload under the
edge area budget, then a dump of the winning design.
"""

from mapforge import GaConfig, builtin_model, builtin_platform, decode, run_search

model = builtin_model("mixed3")
platform = builtin_platform("edge")
config = GaConfig(population_size=50, sample_budget=2000, rng_seed=0)

result = run_search(model, platform, objective="latency", config=config)

print("generation  samples   best fitness      median fitness")
for row in result.trace:
    if row.generation % 5 == 0 or row is result.trace[-1]:
        print("%9d %8d %14.0f %19.0f"
              % (row.generation, row.samples_used,
                 row.best_fitness, row.median_fitness))

design = decode(result.best_genome, model)
r = result.best_report
print("\nbest design after %d samples:" % result.samples_used)
print("  %d x %d PEs, %d words/PE local, %d words shared"
      % (design.pe_rows, design.pe_cols,
         design.l1_words_per_pe, design.l2_words))
print("  area %.4f of %.2f mm2" % (r.area_mm2, platform.area_budget))
print("  latency %d cycles, energy %.3g" % (r.cycles, r.energy_pj))
for layer, chrom in zip(model.layers, design.mappings):
    print("  %-6s parallel %s over arrays, %s inside; order %s / %s"
          % (layer.name, chrom.l2.parallel_dim, chrom.l1.parallel_dim,
             "".join(chrom.l2.order), "".join(chrom.l1.order)))
