"""Closed-form cost model: cycles, boundary traffic, energy, area.

The machine is a grid of pe_cols 1-D PE arrays of pe_rows PEs each,
fed by a shared level-2 buffer; every PE retires one MAC per cycle.
A layer runs as a two-level tiled loop nest: outer temporal loops walk
level-2 tiles of the layer (level-2 loop order), per-tile loops walk
level-1 tiles inside it (level-1 loop order).  The level-2 parallel
dimension spreads level-1 tiles across the arrays; the level-1 parallel
dimension spreads that tile's extent across the PEs of an array.
Partial tiles are costed at full size: counts use ceilings and
footprints use nominal tile extents, so the model never undercounts
the exact interpreter and matches it when everything divides.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, fields

from .designspace import (AcceleratorDesign, MappingChromosome, ceil_div,
                          tensor_words, TENSOR_DIMS, TENSORS)
from .errors import InputError
from .workload import DIMS, LayerShape, Model, total_macs

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

OBJECTIVES = ("latency", "energy", "edp")

# Penalty floor for over-budget designs; any reachable objective value
# must stay far below it so every valid design outranks every invalid one.
BIG = 1e30


@dataclass(frozen=True)
class Platform:
    """Technology and budget constants for one deployment target."""

    area_budget: float            # mm2
    max_pes: int = 4096
    a_pe: float = 4.0e-5          # mm2 per PE
    a_sram: float = 4.0e-7        # mm2 per byte of buffer
    word_bytes: int = 2
    bw_dram: float = 16.0         # words per cycle into the shared buffer
    bw_l2: float = 64.0           # words per cycle out to the arrays
    e_mac: float = 1.0            # energy units per MAC
    e_l2: float = 2.0             # per word crossing the shared buffer
    e_dram: float = 64.0          # per word crossing off-chip
    pi_choices: tuple = ()        # allowed per-level array extents

    def __post_init__(self):
        if self.area_budget <= 0:
            raise InputError("area_budget must be positive, got %r" % self.area_budget)
        if not isinstance(self.max_pes, int) or self.max_pes < 1:
            raise InputError("max_pes must be a positive integer, got %r" % self.max_pes)
        for name in ("a_pe", "a_sram", "bw_dram", "bw_l2", "e_mac", "e_l2", "e_dram"):
            if getattr(self, name) <= 0:
                raise InputError("%s must be positive, got %r" % (name, getattr(self, name)))
        if not isinstance(self.word_bytes, int) or self.word_bytes < 1:
            raise InputError("word_bytes must be a positive integer, got %r" % self.word_bytes)
        if not self.pi_choices:
            # powers of two up to the PE cap
            v, out = 1, []
            while v <= self.max_pes:
                out.append(v)
                v *= 2
            object.__setattr__(self, "pi_choices", tuple(out))
        else:
            vals = tuple(int(v) for v in self.pi_choices)
            if any(v < 1 for v in vals) or list(vals) != sorted(set(vals)):
                raise InputError("pi_choices must be strictly increasing positive integers")
            object.__setattr__(self, "pi_choices", vals)


_PLATFORM_FIELDS = {f.name for f in fields(Platform)}


def platform_from_dict(obj, where="platform") -> Platform:
    if not isinstance(obj, dict):
        raise InputError("%s: top level must be a table" % where)
    extra = set(obj) - _PLATFORM_FIELDS
    if extra:
        raise InputError("%s: unknown field %r" % (where, sorted(extra)[0]))
    if "area_budget" not in obj:
        raise InputError("%s: missing field 'area_budget'" % where)
    kw = dict(obj)
    if "pi_choices" in kw:
        kw["pi_choices"] = tuple(kw["pi_choices"])
    for name in ("area_budget", "a_pe", "a_sram", "bw_dram", "bw_l2",
                 "e_mac", "e_l2", "e_dram"):
        if name in kw:
            kw[name] = float(kw[name])
    return Platform(**kw)


def load_platform(path) -> Platform:
    """Read a platform description from a TOML file."""
    try:
        with open(path, "rb") as fh:
            obj = _toml.load(fh)
    except OSError as e:
        raise InputError("cannot read platform file %s: %s" % (path, e))
    except _toml.TOMLDecodeError as e:
        raise InputError("platform file %s is not valid TOML: %s" % (path, e))
    return platform_from_dict(obj, where="platform file %s" % path)


def area_of(design: AcceleratorDesign, platform: Platform) -> float:
    """Die area in mm2: PEs plus all buffer capacity at SRAM density."""
    sram_bytes = (design.num_pes * design.l1_words_per_pe
                  + design.l2_words) * platform.word_bytes
    return design.num_pes * platform.a_pe + sram_bytes * platform.a_sram


def compute_cycles(chrom: MappingChromosome, layer: LayerShape,
                   pi_l1: int, pi_l2: int) -> int:
    """Cycles to finish one layer ignoring bandwidth, one MAC per PE-cycle.

    Serial work per array step is the level-1 tile volume with the
    parallel extent folded onto the PEs; the parallel dimension's
    level-1 tile count folds likewise onto the arrays.
    """
    t2, t1 = chrom.l2.tiles, chrom.l1.tiles
    p2, p1 = chrom.l2.parallel_dim, chrom.l1.parallel_dim
    total = 1
    for d in DIMS:
        total *= ceil_div(layer.dim(d), t2[d])
    total *= ceil_div(ceil_div(t2[p2], t1[p2]), pi_l2)
    for d in DIMS:
        if d != p2:
            total *= ceil_div(t2[d], t1[d])
    total *= ceil_div(t1[p1], pi_l1)
    for d in DIMS:
        if d != p1:
            total *= t1[d]
    return total


def _fetch_events(loops, relevant) -> int:
    """Distinct fetches of one tensor over a serial loop nest.

    loops are (dim, count) outermost first; dim None marks loops that
    can never change the tensor's tile.  The tensor's tile changes
    exactly when some relevant loop index moves, so the innermost run
    of loops that are irrelevant or single-trip yields pure reuse and
    everything above it multiplies into the fetch count.
    """
    k = len(loops)
    while k and (loops[k - 1][1] == 1 or loops[k - 1][0] not in relevant):
        k -= 1
    ev = 1
    for _, n in loops[:k]:
        ev *= n
    return ev


def _loop_bands(chrom, layer, pi_l2):
    """Temporal loops of the nest, outermost first, per band."""
    t2, t1 = chrom.l2.tiles, chrom.l1.tiles
    p2 = chrom.l2.parallel_dim
    outer = [(d, ceil_div(layer.dim(d), t2[d])) for d in chrom.l2.order]
    per_tile = []
    for d in chrom.l1.order:
        n = ceil_div(t2[d], t1[d])
        if d == p2:
            n = ceil_div(n, pi_l2)   # serial passes after spreading over arrays
        per_tile.append((d, n))
    return outer, per_tile


def boundary_traffic(level: str, chrom: MappingChromosome, layer: LayerShape,
                     pi_l2: int) -> dict:
    """Words per tensor crossing one buffer boundary for a whole layer.

    level 'dram' counts words between off-chip and the shared buffer,
    at level-2 tile granularity; level 'l2' counts words between the
    shared buffer and the arrays, at level-1 tile granularity.  The
    per-tile loops sit inside the level-2 tile loops, so a tensor whose
    tile survives a level-2 tile change is not refetched.  At the array
    boundary a tensor indexed by the spread dimension crosses once per
    distinct sub-tile; other tensors are multicast and cross once.
    """
    if level not in ("dram", "l2"):
        raise InputError("unknown boundary %r" % level)
    outer, per_tile = _loop_bands(chrom, layer, pi_l2)
    s = layer.stride
    out = {}
    if level == "dram":
        # per-tile loops never change a level-2 tile index
        loops = outer + [(None, n) for _, n in per_tile]
        for t in TENSORS:
            out[t] = (tensor_words(t, chrom.l2.tiles, s)
                      * _fetch_events(loops, TENSOR_DIMS[t]))
    else:
        loops = outer + per_tile
        p2 = chrom.l2.parallel_dim
        n_p2 = ceil_div(chrom.l2.tiles[p2], chrom.l1.tiles[p2])
        for t in TENSORS:
            copies = min(pi_l2, n_p2) if p2 in TENSOR_DIMS[t] else 1
            out[t] = (tensor_words(t, chrom.l1.tiles, s)
                      * _fetch_events(loops, TENSOR_DIMS[t]) * copies)
    return out


@dataclass(frozen=True)
class LayerCost:
    name: str
    macs: int
    compute_cycles: int
    dram_words: int
    l2_words: int
    cycles: int


@dataclass(frozen=True)
class CostReport:
    """Whole-model cost of one design on one platform."""

    cycles: int
    dram_words: int
    l2_words: int
    energy_pj: float
    area_mm2: float
    valid: bool
    objective: str
    objective_value: float
    fitness: float
    latency_area_product: float
    per_layer: tuple = field(default=())


def evaluate(design: AcceleratorDesign, model: Model, platform: Platform,
             objective: str = "latency") -> CostReport:
    """Roofline cost of a design: each layer pays its slowest of compute,
    off-chip bandwidth, and shared-buffer bandwidth.

    Traffic counts are fetch words; every output refetch implies the
    matching write-back, so reads alone determine the exchange.
    Over-budget designs get a fitness below every valid design, graded
    by how far they overshoot so a search can still climb back in.
    """
    if objective not in OBJECTIVES:
        raise InputError("unknown objective %r (have: %s)"
                         % (objective, ", ".join(OBJECTIVES)))
    area = area_of(design, platform)
    cycles = 0
    dram = 0
    l2w = 0
    energy = 0.0
    per_layer = []
    for layer, chrom in zip(model.layers, design.mappings):
        cc = compute_cycles(chrom, layer, design.pe_rows, design.pe_cols)
        dw = sum(boundary_traffic("dram", chrom, layer, design.pe_cols).values())
        lw = sum(boundary_traffic("l2", chrom, layer, design.pe_cols).values())
        lc = max(cc, math.ceil(dw / platform.bw_dram), math.ceil(lw / platform.bw_l2))
        macs = total_macs(layer)
        cycles += lc
        dram += dw
        l2w += lw
        energy += macs * platform.e_mac + dw * platform.e_dram + lw * platform.e_l2
        per_layer.append(LayerCost(layer.name, macs, cc, dw, lw, lc))
    valid = area <= platform.area_budget
    value = {"latency": float(cycles), "energy": energy,
             "edp": cycles * energy}[objective]
    if valid:
        fitness = -value
    else:
        fitness = -(BIG + area / platform.area_budget - 1.0)
    return CostReport(cycles=cycles, dram_words=dram, l2_words=l2w,
                      energy_pj=energy, area_mm2=area, valid=valid,
                      objective=objective, objective_value=value,
                      fitness=fitness, latency_area_product=cycles * area,
                      per_layer=tuple(per_layer))
