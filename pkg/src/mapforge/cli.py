"""Command-line front end: optimize, compare, inspect.

Reports are written with sorted keys and no timestamps, so a repeated
run with the same inputs is byte-identical regardless of thread count.
Exit codes: 0 success, 2 bad input, 3 no valid design, 4 internal.
"""

import argparse
import csv
import json
import math
import os
import sys
import traceback
from pathlib import Path

from . import builtin_model, builtin_platform, BUILTIN_PLATFORMS
from .baselines import (grid_search_hw, mapping_opt_fixed_hw, random_search,
                        std_ga)
from .costmodel import OBJECTIVES, area_of, evaluate, load_platform
from .designspace import decode, load_genome, save_genome, validate_genome
from .errors import InputError, NoValidDesignError
from .ga import GaConfig, run_search
from .workload import load_model, total_macs

SCHEMES = ("digamma", "stdga", "random",
           "grid-dla", "grid-shi", "grid-eye",
           "fixedhw-buffer", "fixedhw-medium", "fixedhw-compute")


def resolve_platform(spec):
    if spec in BUILTIN_PLATFORMS:
        return builtin_platform(spec)
    return load_platform(spec)


def resolve_model(spec):
    p = Path(spec)
    if p.suffix == ".json" or p.exists():
        return load_model(p)
    return builtin_model(spec)


def resolve_threads(value):
    if value is not None:
        return value
    env = os.environ.get("MAPFORGE_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise InputError("MAPFORGE_THREADS must be an integer, got %r" % env)
        if n < 1:
            raise InputError("MAPFORGE_THREADS must be positive, got %d" % n)
        return n
    return 1


def run_scheme(scheme, model, platform, objective, budget, population, seed,
               threads=1, fix_hw=None, fix_mapping=None):
    """Dispatch one search scheme under a shared sample budget."""
    if scheme not in SCHEMES:
        raise InputError("unknown scheme %r (have: %s)"
                         % (scheme, ", ".join(SCHEMES)))
    config = GaConfig(population_size=population, sample_budget=budget,
                      rng_seed=seed, threads=threads)
    if scheme == "digamma":
        return run_search(model, platform, objective, config,
                          fix_hw=fix_hw, fix_mapping=fix_mapping)
    if fix_hw is not None or fix_mapping is not None:
        raise InputError("--fix-hw and --fix-mapping apply to the digamma scheme only")
    if scheme == "stdga":
        return std_ga(model, platform, objective, config)
    if scheme == "random":
        return random_search(model, platform, objective, budget, seed)
    if scheme.startswith("grid-"):
        return grid_search_hw(model, platform, objective,
                              template=scheme.split("-", 1)[1],
                              sample_budget=budget)
    return mapping_opt_fixed_hw(model, platform, objective,
                                preset=scheme.split("-", 1)[1], config=config)


def platform_dict(platform):
    return {"area_budget": platform.area_budget, "max_pes": platform.max_pes,
            "a_pe": platform.a_pe, "a_sram": platform.a_sram,
            "word_bytes": platform.word_bytes, "bw_dram": platform.bw_dram,
            "bw_l2": platform.bw_l2, "e_mac": platform.e_mac,
            "e_l2": platform.e_l2, "e_dram": platform.e_dram,
            "pi_choices": list(platform.pi_choices)}


def report_dict(result, model, platform, objective, args_info):
    design = decode(result.best_genome, model)
    r = result.best_report
    return {
        "run": args_info,
        "model": model.name,
        "platform": platform_dict(platform),
        "samples_used": result.samples_used,
        "design": {
            "pe_rows": design.pe_rows,
            "pe_cols": design.pe_cols,
            "num_pes": design.num_pes,
            "l1_words_per_pe": design.l1_words_per_pe,
            "l2_words": design.l2_words,
        },
        "metrics": {
            "latency_cycles": r.cycles,
            "energy_pj": r.energy_pj,
            "edp": r.cycles * r.energy_pj,
            "area_mm2": r.area_mm2,
            "latency_area_product": r.latency_area_product,
            "dram_words": r.dram_words,
            "l2_words": r.l2_words,
            "objective": objective,
            "objective_value": r.objective_value,
            "fitness": r.fitness,
            "valid": r.valid,
        },
        "per_layer": [
            {"name": lc.name, "macs": lc.macs,
             "compute_cycles": lc.compute_cycles, "dram_words": lc.dram_words,
             "l2_words": lc.l2_words, "cycles": lc.cycles}
            for lc in r.per_layer
        ],
    }


def write_outputs(out_dir, result, model, platform, objective, args_info):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = report_dict(result, model, platform, objective, args_info)
    with open(out / "report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out / "trace.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["generation", "samples_used", "best_fitness",
                    "median_fitness", "best_area_mm2"])
        for row in result.trace:
            w.writerow([row.generation, row.samples_used, row.best_fitness,
                        row.median_fitness, row.best_area_mm2])
    save_genome(out / "best_genome.json", result.best_genome)
    return report


def parse_fix_hw(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError("--fix-hw expects 'ROWS,COLS', got %r" % text)
    try:
        rows, cols = int(parts[0]), int(parts[1])
    except ValueError:
        raise InputError("--fix-hw expects two integers, got %r" % text)
    if rows < 1 or cols < 1:
        raise InputError("--fix-hw extents must be positive, got %r" % text)
    return rows, cols


def cmd_optimize(args):
    model = resolve_model(args.model)
    platform = resolve_platform(args.platform)
    threads = resolve_threads(args.threads)
    fix_hw = parse_fix_hw(args.fix_hw) if args.fix_hw else None
    result = run_scheme(args.scheme, model, platform, args.objective,
                        args.budget, args.population, args.seed,
                        threads=threads, fix_hw=fix_hw,
                        fix_mapping=args.fix_mapping)
    args_info = {"scheme": args.scheme, "objective": args.objective,
                 "budget": args.budget, "population": args.population,
                 "seed": args.seed,
                 "fix_hw": list(fix_hw) if fix_hw else None,
                 "fix_mapping": args.fix_mapping}
    report = write_outputs(args.out, result, model, platform,
                           args.objective, args_info)
    m = report["metrics"]
    d = report["design"]
    print("best design: %d x %d PEs, %d words/PE L1, %d words L2"
          % (d["pe_rows"], d["pe_cols"], d["l1_words_per_pe"], d["l2_words"]))
    print("latency %d cycles | energy %.6g | area %.6g mm2 | %s %.6g"
          % (m["latency_cycles"], m["energy_pj"], m["area_mm2"],
             args.objective, m["objective_value"]))
    print("wrote %s" % (Path(args.out) / "report.json"))
    return 0


def cmd_compare(args):
    models = [resolve_model(m) for m in args.model]
    platform = resolve_platform(args.platform)
    schemes = [s.strip() for s in args.schemes.split(",") if s.strip()]
    seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    if not schemes or not seeds:
        raise InputError("--schemes and --seeds must be non-empty")
    for s in schemes:
        if s not in SCHEMES:
            raise InputError("unknown scheme %r (have: %s)" % (s, ", ".join(SCHEMES)))
    baseline = args.baseline or schemes[0]
    if baseline not in schemes:
        raise InputError("--baseline %r is not among the chosen schemes" % baseline)

    cells = {}
    for model in models:
        for scheme in schemes:
            values = []
            for seed in seeds:
                try:
                    res = run_scheme(scheme, model, platform, args.objective,
                                     args.budget, args.population, seed)
                    values.append(res.best_report.objective_value)
                except (InputError, NoValidDesignError):
                    values.append(None)
            cells[(model.name, scheme)] = values

    def agg(vals):
        good = [v for v in vals if v is not None]
        if not good:
            return None
        good.sort()
        n = len(good)
        mid = n // 2
        return good[mid] if n % 2 else 0.5 * (good[mid - 1] + good[mid])

    rows = []
    for model in models:
        base = agg(cells[(model.name, baseline)])
        for scheme in schemes:
            v = agg(cells[(model.name, scheme)])
            ratio = (base / v) if (v and base) else None
            rows.append({"model": model.name, "scheme": scheme,
                         "median_objective": v,
                         "ratio_vs_%s" % baseline: ratio})

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "compare.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["model", "scheme", "median_objective",
                    "ratio_vs_" + baseline])
        for row in rows:
            w.writerow([row["model"], row["scheme"],
                        "N/A" if row["median_objective"] is None
                        else row["median_objective"],
                        "N/A" if row["ratio_vs_%s" % baseline] is None
                        else "%.4f" % row["ratio_vs_%s" % baseline]])

    header = "%-12s %-16s %16s %12s" % ("model", "scheme",
                                        "median " + args.objective, "vs " + baseline)
    print(header)
    print("-" * len(header))
    for row in rows:
        v = row["median_objective"]
        ratio = row["ratio_vs_%s" % baseline]
        print("%-12s %-16s %16s %12s"
              % (row["model"], row["scheme"],
                 "N/A" if v is None else "%.6g" % v,
                 "N/A" if ratio is None else "%.3fx" % ratio))
    for scheme in schemes:
        ratios = [row["ratio_vs_%s" % baseline] for row in rows
                  if row["scheme"] == scheme and row["ratio_vs_%s" % baseline]]
        if ratios:
            gm = math.exp(sum(math.log(x) for x in ratios) / len(ratios))
            print("geomean %-16s %.3fx" % (scheme, gm))
    print("wrote %s" % (out / "compare.csv"))
    return 0


def cmd_inspect(args):
    model = resolve_model(args.model)
    platform = resolve_platform(args.platform)
    genome = load_genome(args.genome)
    problems = validate_genome(genome, model)
    if problems:
        raise InputError("; ".join(problems))
    design = decode(genome, model)
    report = evaluate(design, model, platform, args.objective)

    print("pe array: %d x %d (%d PEs)"
          % (design.pe_rows, design.pe_cols, design.num_pes))
    print("buffers: %d words/PE at level 1, %d words at level 2"
          % (design.l1_words_per_pe, design.l2_words))
    print("area: %.6g mm2 (budget %.6g, %s)"
          % (report.area_mm2, platform.area_budget,
             "valid" if report.valid else "OVER BUDGET"))
    for layer, chrom, req in zip(model.layers, design.mappings,
                                 design.buffer_reqs):
        print("layer %s: parallel %s-%s" % (layer.name, chrom.l2.parallel_dim,
                                            chrom.l1.parallel_dim))
        for lv, gene in (("l2", chrom.l2), ("l1", chrom.l1)):
            tiles = " ".join("%s=%d" % (d, gene.tiles[d]) for d in
                             ("K", "C", "Y", "X", "R", "S"))
            print("  %s: order %s | tiles %s" % (lv, "".join(gene.order), tiles))
        print("  buffer words: l2 %d (W%d I%d O%d) | l1/pe %d (W%d I%d O%d)"
              % (req.l2_total, req.l2_weight, req.l2_input, req.l2_output,
                 req.l1_total, req.l1_weight, req.l1_input, req.l1_output))
    print("latency %d cycles | energy %.6g | edp %.6g | lap %.6g"
          % (report.cycles, report.energy_pj,
             report.cycles * report.energy_pj, report.latency_area_product))
    print("traffic words: dram %d | l2 %d" % (report.dram_words, report.l2_words))
    print("macs: %d" % sum(total_macs(l) for l in model.layers))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="mapforge",
                                description="accelerator hardware and mapping co-search")
    sub = p.add_subparsers(dest="command", required=True)

    opt = sub.add_parser("optimize", help="search one model and write a report")
    opt.add_argument("--model", required=True,
                     help="model JSON path or bundled name")
    opt.add_argument("--platform", default="edge",
                     help="platform TOML path or profile name (edge, cloud)")
    opt.add_argument("--scheme", default="digamma", choices=SCHEMES)
    opt.add_argument("--objective", default="latency", choices=OBJECTIVES)
    opt.add_argument("--budget", type=int, default=40000,
                     help="total fitness evaluations")
    opt.add_argument("--population", type=int, default=100)
    opt.add_argument("--seed", type=int, default=0)
    opt.add_argument("--threads", type=int, default=None,
                     help="evaluation threads (default MAPFORGE_THREADS or 1)")
    opt.add_argument("--out", default="out", help="output directory")
    opt.add_argument("--fix-hw", default=None, metavar="ROWS,COLS",
                     help="pin the PE array shape")
    opt.add_argument("--fix-mapping", default=None,
                     choices=("dla", "shi", "eye"),
                     help="pin every layer's mapping to a template")
    opt.set_defaults(func=cmd_optimize)

    cmp_ = sub.add_parser("compare", help="run several schemes side by side")
    cmp_.add_argument("--model", action="append", required=True,
                      help="model JSON path or bundled name (repeatable)")
    cmp_.add_argument("--platform", default="edge")
    cmp_.add_argument("--schemes", default="digamma,stdga,random")
    cmp_.add_argument("--objective", default="latency", choices=OBJECTIVES)
    cmp_.add_argument("--budget", type=int, default=2000)
    cmp_.add_argument("--population", type=int, default=50)
    cmp_.add_argument("--seeds", default="0",
                      help="comma-separated seeds, one run per seed")
    cmp_.add_argument("--baseline", default=None,
                      help="scheme ratios are normalized to (default: first)")
    cmp_.add_argument("--out", default="out")
    cmp_.set_defaults(func=cmd_compare)

    ins = sub.add_parser("inspect", help="print a saved genome's design and cost")
    ins.add_argument("--genome", required=True, help="genome checkpoint JSON")
    ins.add_argument("--model", required=True)
    ins.add_argument("--platform", default="edge")
    ins.add_argument("--objective", default="latency", choices=OBJECTIVES)
    ins.set_defaults(func=cmd_inspect)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except NoValidDesignError as e:
        print("error: %s" % e, file=sys.stderr)
        return 3
    except Exception:
        traceback.print_exc()
        return 4


if __name__ == "__main__":
    sys.exit(main())
