"""Genetic search over the joint hardware and mapping space.

The operators know the genome's structure: tiles resample within a
dimension, orders swap positions, the array shape doubles or halves,
and every child passes through repair, so the search never leaves the
legal region.  Selection is elitist truncation and each fitness
evaluation debits one sample from a fixed budget.
"""

from __future__ import annotations

import statistics
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .costmodel import evaluate
from .designspace import decode, random_genome, repair, template_mapping
from .errors import InputError, NoValidDesignError
from .workload import DIMS

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml


@dataclass
class GaConfig:
    population_size: int = 100
    sample_budget: int = 40000
    elite_ratio: float = 0.05
    crossover_rate: float = 0.7
    tile_rate: float = 0.30
    order_rate: float = 0.10
    parallel_rate: float = 0.10
    pe_rate: float = 0.10
    rng_seed: int = 0
    threads: int = 1

    def validate(self):
        if not isinstance(self.population_size, int) or self.population_size < 2:
            raise InputError("population_size must be an integer >= 2")
        if not isinstance(self.sample_budget, int) or self.sample_budget < 1:
            raise InputError("sample_budget must be a positive integer")
        if self.sample_budget < self.population_size:
            raise InputError("sample_budget %d cannot cover one generation of %d"
                             % (self.sample_budget, self.population_size))
        if not 0.0 < self.elite_ratio < 1.0:
            raise InputError("elite_ratio must lie in (0, 1)")
        for name in ("crossover_rate", "tile_rate", "order_rate",
                     "parallel_rate", "pe_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InputError("%s must lie in [0, 1], got %r" % (name, v))
        if not isinstance(self.threads, int) or self.threads < 1:
            raise InputError("threads must be a positive integer")


_CONFIG_FIELDS = {f.name for f in fields(GaConfig)}
_CONFIG_INT_FIELDS = ("population_size", "sample_budget", "rng_seed", "threads")


def ga_config_from_dict(obj, where="ga config") -> GaConfig:
    """Build a GaConfig from a mapping; every field is optional."""
    if not isinstance(obj, dict):
        raise InputError("%s: top level must be a table" % where)
    extra = set(obj) - _CONFIG_FIELDS
    if extra:
        raise InputError("%s: unknown field %r" % (where, sorted(extra)[0]))
    kw = dict(obj)
    for name in kw:
        if name in _CONFIG_INT_FIELDS:
            if isinstance(kw[name], bool) or not isinstance(kw[name], int):
                raise InputError("%s: field %r must be an integer" % (where, name))
        else:
            kw[name] = float(kw[name])
    cfg = GaConfig(**kw)
    cfg.validate()
    return cfg


def load_ga_config(path) -> GaConfig:
    """Read search settings from a TOML file; missing fields keep defaults."""
    try:
        with open(path, "rb") as fh:
            obj = _toml.load(fh)
    except OSError as e:
        raise InputError("cannot read ga config file %s: %s" % (path, e))
    except _toml.TOMLDecodeError as e:
        raise InputError("ga config file %s is not valid TOML: %s" % (path, e))
    return ga_config_from_dict(obj, where="ga config file %s" % path)


@dataclass(frozen=True)
class TraceRow:
    generation: int
    samples_used: int
    best_fitness: float
    median_fitness: float
    best_area_mm2: float


@dataclass
class SearchResult:
    best_genome: object
    best_report: object
    trace: list
    samples_used: int


def select_elites(scored, count):
    """Top slice by fitness; ties prefer smaller area, then input order."""
    ranked = sorted(range(len(scored)),
                    key=lambda i: (-scored[i][1].fitness,
                                   scored[i][1].area_mm2, i))
    return [scored[i] for i in ranked[:count]]


def crossover(a, b, rng):
    """Child takes the PE pair from one parent and each layer's mapping
    from either, chosen per layer."""
    hw = a if rng.random() < 0.5 else b
    child = hw.copy()
    for i in range(len(child.mappings)):
        src = a if rng.random() < 0.5 else b
        child.mappings[i] = src.mappings[i].copy()
    return child


def mutate_tiles(genome, model, rng, rate):
    for chrom, layer in zip(genome.mappings, model.layers):
        for gene in (chrom.l2, chrom.l1):
            if rng.random() < rate:
                d = DIMS[rng.integers(6)]
                gene.tiles[d] = int(rng.integers(1, layer.dim(d) + 1))


def mutate_order(genome, rng, rate):
    for chrom in genome.mappings:
        for gene in (chrom.l2, chrom.l1):
            if rng.random() < rate:
                i, j = rng.choice(6, size=2, replace=False)
                o = list(gene.order)
                o[i], o[j] = o[j], o[i]
                gene.order = tuple(o)


def mutate_parallel(genome, rng, rate):
    for chrom in genome.mappings:
        for gene in (chrom.l2, chrom.l1):
            if rng.random() < rate:
                gene.parallel_dim = DIMS[rng.integers(6)]


def mutate_pe(genome, platform, rng, rate):
    """Grow, shrink, or redraw the array shape; repair caps the product."""
    if rng.random() >= rate:
        return
    op = int(rng.integers(5))
    if op == 0:
        genome.pi_l1 *= 2
    elif op == 1:
        genome.pi_l1 = max(1, genome.pi_l1 // 2)
    elif op == 2:
        genome.pi_l2 *= 2
    elif op == 3:
        genome.pi_l2 = max(1, genome.pi_l2 // 2)
    else:
        choices = platform.pi_choices
        genome.pi_l1 = int(choices[rng.integers(len(choices))])
        genome.pi_l2 = int(choices[rng.integers(len(choices))])


def run_search(model, platform, objective="latency", config=None,
               fix_hw=None, fix_mapping=None, observer=None) -> SearchResult:
    """Evolve genomes for a fixed sample budget and return the best.

    fix_hw pins the PE pair (rows, cols) and disables the array
    operator; fix_mapping locks every layer's mapping to the named
    template, leaving only the array shape free.  observer, if given,
    sees every (genome, report) that spends a sample.  Results depend
    only on the inputs and the seed, never on the thread count.
    """
    config = config or GaConfig()
    config.validate()
    if fix_hw is not None:
        fr, fc = fix_hw
        if fr * fc > platform.max_pes:
            raise InputError("fixed PE shape %dx%d exceeds the platform cap %d"
                             % (fr, fc, platform.max_pes))
    generations = config.sample_budget // config.population_size
    rng = np.random.default_rng(config.rng_seed)

    def conform(g):
        # constraint modes override whatever the operators produced
        if fix_hw is not None:
            g.pi_l1, g.pi_l2 = fix_hw
        if fix_mapping is not None:
            g.mappings = [template_mapping(fix_mapping, layer, g.pi_l1, g.pi_l2)
                          for layer in model.layers]
        return repair(g, model, platform)

    def score(genomes):
        if config.threads > 1:
            with ThreadPoolExecutor(max_workers=config.threads) as pool:
                reports = list(pool.map(
                    lambda g: evaluate(decode(g, model), model, platform, objective),
                    genomes))
        else:
            reports = [evaluate(decode(g, model), model, platform, objective)
                       for g in genomes]
        if observer is not None:
            for g, r in zip(genomes, reports):
                observer(g, r)
        return list(zip(genomes, reports))

    population = [conform(random_genome(model, platform, rng))
                  for _ in range(config.population_size)]
    elite_count = max(1, int(np.ceil(config.elite_ratio * config.population_size)))

    best = None
    trace = []
    samples = 0
    for gen in range(generations):
        scored = score(population)
        samples += len(scored)
        for pair in scored:
            if best is None or pair[1].fitness > best[1].fitness:
                best = pair
        trace.append(TraceRow(
            generation=gen,
            samples_used=samples,
            best_fitness=best[1].fitness,
            median_fitness=statistics.median(r.fitness for _, r in scored),
            best_area_mm2=best[1].area_mm2,
        ))
        if gen == generations - 1:
            break
        elites = select_elites(scored, elite_count)
        nxt = [g for g, _ in elites]
        while len(nxt) < config.population_size:
            if rng.random() < config.crossover_rate:
                i, j = rng.integers(len(elites), size=2)
                child = crossover(elites[int(i)][0], elites[int(j)][0], rng)
            else:
                child = elites[int(rng.integers(len(elites)))][0].copy()
            mutate_tiles(child, model, rng, config.tile_rate)
            mutate_order(child, rng, config.order_rate)
            mutate_parallel(child, rng, config.parallel_rate)
            if fix_hw is None:
                mutate_pe(child, platform, rng, config.pe_rate)
            nxt.append(conform(child))
        population = nxt

    if not best[1].valid:
        over = best[1].area_mm2 / platform.area_budget
        raise NoValidDesignError(
            "no design fit the %.4g mm2 budget in %d samples; "
            "closest used %.4g mm2 (%.2fx over)"
            % (platform.area_budget, samples, best[1].area_mm2, over),
            best_report=best[1])
    return SearchResult(best_genome=best[0], best_report=best[1],
                        trace=trace, samples_used=samples)
