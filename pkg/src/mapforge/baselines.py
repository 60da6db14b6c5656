"""Reference searchers the structured GA is measured against.

All of them spend the same kind of sample (one fitness evaluation) and
return the same result shape, so comparisons are budget-for-budget.
"""

from __future__ import annotations

import statistics

import numpy as np

from .costmodel import evaluate
from .designspace import GenomeCodec, TEMPLATES, decode, random_genome, repair
from .designspace import Genome, template_mapping
from .errors import InputError, NoValidDesignError
from .ga import GaConfig, SearchResult, TraceRow, run_search, select_elites

TRACE_CHUNK = 100

# Preset array shapes (rows, cols) for mapping-only search: small arrays
# leave area to buffers, large arrays spend it on compute.  Placeholder
# values; tune per deployment.
FIXED_HW_PRESETS = {
    "edge": {"buffer": (8, 8), "medium": (16, 16), "compute": (32, 32)},
    "cloud": {"buffer": (32, 32), "medium": (64, 64), "compute": (128, 128)},
}


def _preset_tier(platform):
    # coarse split: anything with a die budget of 1 mm2 or more is cloud-class
    return "cloud" if platform.area_budget >= 1.0 else "edge"


def _finish(best, trace, samples, platform):
    if best is None or not best[1].valid:
        report = best[1] if best else None
        msg = "no design fit the %.4g mm2 budget in %d samples" % (
            platform.area_budget, samples)
        if report is not None:
            msg += "; closest used %.4g mm2 (%.2fx over)" % (
                report.area_mm2, report.area_mm2 / platform.area_budget)
        raise NoValidDesignError(msg, best_report=report)
    return SearchResult(best_genome=best[0], best_report=best[1],
                        trace=trace, samples_used=samples)


def random_search(model, platform, objective="latency", sample_budget=40000,
                  seed=0) -> SearchResult:
    """Independent draws from the repaired genome space, best kept."""
    rng = np.random.default_rng(seed)
    best = None
    trace = []
    chunk = []
    samples = 0
    for i in range(sample_budget):
        g = random_genome(model, platform, rng)
        r = evaluate(decode(g, model), model, platform, objective)
        samples += 1
        chunk.append(r.fitness)
        if best is None or r.fitness > best[1].fitness:
            best = (g, r)
        if len(chunk) == TRACE_CHUNK or i == sample_budget - 1:
            trace.append(TraceRow(generation=len(trace), samples_used=samples,
                                  best_fitness=best[1].fitness,
                                  median_fitness=statistics.median(chunk),
                                  best_area_mm2=best[1].area_mm2))
            chunk = []
    return _finish(best, trace, samples, platform)


def std_ga(model, platform, objective="latency", config=None) -> SearchResult:
    """Textbook GA on the flat integer vector, blind to gene meaning.

    Same elitist truncation and budget accounting as the structured
    search, but single-point crossover and per-position resampling at
    one expected flip per child; every vector is repaired on decode.
    """
    config = config or GaConfig()
    config.validate()
    codec = GenomeCodec(model, platform)
    rng = np.random.default_rng(config.rng_seed)
    generations = config.sample_budget // config.population_size
    length = codec.length
    pos_rate = 1.0 / length

    def draw():
        return [int(rng.integers(lo, hi + 1)) for lo, hi in codec.bounds]

    def ga_score(vecs):
        out = []
        for v in vecs:
            g = codec.unflatten(v)
            out.append((v, evaluate(decode(g, model), model, platform, objective)))
        return out

    population = [draw() for _ in range(config.population_size)]
    elite_count = max(1, int(np.ceil(config.elite_ratio * config.population_size)))
    best = None
    trace = []
    samples = 0
    for gen in range(generations):
        scored = ga_score(population)
        samples += len(scored)
        for pair in scored:
            if best is None or pair[1].fitness > best[1].fitness:
                best = pair
        trace.append(TraceRow(
            generation=gen, samples_used=samples,
            best_fitness=best[1].fitness,
            median_fitness=statistics.median(r.fitness for _, r in scored),
            best_area_mm2=best[1].area_mm2))
        if gen == generations - 1:
            break
        elites = select_elites(scored, elite_count)
        nxt = [list(v) for v, _ in elites]
        while len(nxt) < config.population_size:
            if rng.random() < config.crossover_rate:
                i, j = rng.integers(len(elites), size=2)
                pt = int(rng.integers(1, length))
                child = list(elites[int(i)][0][:pt]) + list(elites[int(j)][0][pt:])
            else:
                child = list(elites[int(rng.integers(len(elites)))][0])
            for k, (lo, hi) in enumerate(codec.bounds):
                if rng.random() < pos_rate:
                    child[k] = int(rng.integers(lo, hi + 1))
            nxt.append(child)
        population = nxt
    if best is None or not best[1].valid:
        return _finish(best, trace, samples, platform)
    return SearchResult(best_genome=codec.unflatten(best[0]),
                        best_report=best[1], trace=trace, samples_used=samples)


def grid_search_hw(model, platform, objective="latency", template="dla",
                   sample_budget=40000, grid=None) -> SearchResult:
    """Sweep array shapes on a fixed mapping template.

    The default grid is every allowed (rows, cols) pair under the PE
    cap.  Buffers follow implicitly from the decoded mapping.
    """
    if template not in TEMPLATES:
        raise InputError("unknown mapping template %r (have: %s)"
                         % (template, ", ".join(sorted(TEMPLATES))))
    if grid is None:
        choices = platform.pi_choices
        grid = [(r, c) for r in choices for c in choices
                if r * c <= platform.max_pes]
    if len(grid) > sample_budget:
        raise InputError("grid has %d points but the budget is %d"
                         % (len(grid), sample_budget))
    best = None
    trace = []
    samples = 0
    for rows, cols in grid:
        g = repair(Genome(pi_l2=cols, pi_l1=rows,
                          mappings=[template_mapping(template, layer, rows, cols)
                                    for layer in model.layers]),
                   model, platform)
        r = evaluate(decode(g, model), model, platform, objective)
        samples += 1
        if best is None or r.fitness > best[1].fitness:
            best = (g, r)
        trace.append(TraceRow(generation=len(trace), samples_used=samples,
                              best_fitness=best[1].fitness,
                              median_fitness=r.fitness,
                              best_area_mm2=best[1].area_mm2))
    return _finish(best, trace, samples, platform)


def mapping_opt_fixed_hw(model, platform, objective="latency", preset="medium",
                         config=None) -> SearchResult:
    """Mapping-only evolution on one preset array shape."""
    tier = _preset_tier(platform)
    presets = FIXED_HW_PRESETS[tier]
    if preset not in presets:
        raise InputError("unknown fixed-HW preset %r (have: %s)"
                         % (preset, ", ".join(sorted(presets))))
    return run_search(model, platform, objective, config,
                      fix_hw=presets[preset])
