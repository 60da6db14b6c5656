"""Genome encoding of one hardware plus mapping co-design point.

A genome carries a shared PE-array shape (two spatial extents: the
length of each 1-D PE array and the number of arrays) and, per layer,
a two-level mapping chromosome.  Each level holds tile sizes for the
six dimensions, a loop order (leftmost letter is the outermost temporal
loop), and the dimension parallelized across that level's spatial
units.  Level 2 is the shared buffer feeding the arrays; level 1 is the
per-PE buffer.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field

from .errors import InputError
from .workload import DIMS, LayerShape, Model

# Relevant dimensions per tensor: weights, inputs, outputs.
TENSORS = ("W", "I", "O")
TENSOR_DIMS = {
    "W": ("K", "C", "R", "S"),
    "I": ("C", "Y", "X", "R", "S"),
    "O": ("K", "Y", "X"),
}


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def tensor_words(tensor: str, ext, stride: int) -> int:
    """Words of one tensor tile given per-dimension extents.

    Inputs include the halo: a tile of ty output rows built with tr
    filter rows spans (ty - 1) * stride + tr input rows.
    """
    if tensor == "W":
        return ext["K"] * ext["C"] * ext["R"] * ext["S"]
    if tensor == "I":
        return (ext["C"]
                * ((ext["Y"] - 1) * stride + ext["R"])
                * ((ext["X"] - 1) * stride + ext["S"]))
    return ext["K"] * ext["Y"] * ext["X"]


@dataclass
class LevelGene:
    pi: int
    parallel_dim: str
    order: tuple
    tiles: dict

    def copy(self) -> "LevelGene":
        return LevelGene(self.pi, self.parallel_dim, self.order, dict(self.tiles))


@dataclass
class MappingChromosome:
    l2: LevelGene
    l1: LevelGene

    def copy(self) -> "MappingChromosome":
        return MappingChromosome(self.l2.copy(), self.l1.copy())


@dataclass
class Genome:
    pi_l2: int
    pi_l1: int
    mappings: list

    def copy(self) -> "Genome":
        return Genome(self.pi_l2, self.pi_l1, [m.copy() for m in self.mappings])


@dataclass(frozen=True)
class BufferReq:
    """Minimum words per tensor at each level for one layer's mapping."""

    l2_weight: int
    l2_input: int
    l2_output: int
    l1_weight: int
    l1_input: int
    l1_output: int

    @property
    def l2_total(self) -> int:
        return self.l2_weight + self.l2_input + self.l2_output

    @property
    def l1_total(self) -> int:
        return self.l1_weight + self.l1_input + self.l1_output


@dataclass(frozen=True)
class AcceleratorDesign:
    """Decoded hardware: array shape, buffer sizes, and the mapping used."""

    pe_rows: int        # length of each 1-D PE array
    pe_cols: int        # number of instantiated arrays
    l1_words_per_pe: int
    l2_words: int
    mappings: tuple
    buffer_reqs: tuple

    @property
    def num_pes(self) -> int:
        return self.pe_rows * self.pe_cols


def min_buffer_requirement(chrom: MappingChromosome, layer: LayerShape,
                           pi_l1: int) -> BufferReq:
    """Exact words each level must hold to run one layer's mapping.

    The shared buffer holds one level-2 tile of each tensor.  Each PE
    holds its share of one level-1 tile: the parallel dimension's extent
    is split across the pi_l1 PEs of the array, the busiest PE taking
    the ceiling share, and the input halo shrinks with the reduced
    extent.
    """
    s = layer.stride
    l2 = {t: tensor_words(t, chrom.l2.tiles, s) for t in TENSORS}
    share = dict(chrom.l1.tiles)
    p1 = chrom.l1.parallel_dim
    share[p1] = ceil_div(share[p1], pi_l1)
    l1 = {t: tensor_words(t, share, s) for t in TENSORS}
    return BufferReq(l2["W"], l2["I"], l2["O"], l1["W"], l1["I"], l1["O"])


def repair(genome: Genome, model: Model, platform) -> Genome:
    """Clamp a genome into the legal region, in place.

    Tile sizes are clamped level-2 into [1, dim] and level-1 into
    [1, level-2 tile].  The PE product is capped by halving the larger
    extent until it fits (ties halve the array length).  The shared PE
    extents are mirrored into every per-layer gene.  Idempotent.
    """
    genome.pi_l1 = max(1, int(genome.pi_l1))
    genome.pi_l2 = max(1, int(genome.pi_l2))
    while genome.pi_l1 * genome.pi_l2 > platform.max_pes:
        if genome.pi_l1 >= genome.pi_l2:
            genome.pi_l1 = max(1, genome.pi_l1 // 2)
        else:
            genome.pi_l2 = max(1, genome.pi_l2 // 2)
    for chrom, layer in zip(genome.mappings, model.layers):
        t2, t1 = chrom.l2.tiles, chrom.l1.tiles
        for d in DIMS:
            t2[d] = min(max(1, int(t2[d])), layer.dim(d))
            t1[d] = min(max(1, int(t1[d])), t2[d])
        chrom.l2.pi = genome.pi_l2
        chrom.l1.pi = genome.pi_l1
    return genome


def validate_genome(genome: Genome, model: Model) -> list:
    """Structural checks; returns violation strings naming the bad field."""
    problems = []
    for name in ("pi_l2", "pi_l1"):
        v = getattr(genome, name)
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            problems.append("%s: must be a positive integer, got %r" % (name, v))
    if len(genome.mappings) != len(model.layers):
        problems.append("mappings: expected %d entries, got %d"
                        % (len(model.layers), len(genome.mappings)))
        return problems
    for i, (chrom, layer) in enumerate(zip(genome.mappings, model.layers)):
        for lv, gene in (("l2", chrom.l2), ("l1", chrom.l1)):
            where = "mappings[%d].%s" % (i, lv)
            if tuple(sorted(gene.order)) != tuple(sorted(DIMS)):
                problems.append("%s.order: not a permutation of %s, got %r"
                                % (where, "".join(DIMS), "".join(gene.order)))
            if gene.parallel_dim not in DIMS:
                problems.append("%s.parallel_dim: unknown dimension %r"
                                % (where, gene.parallel_dim))
            for d in DIMS:
                t = gene.tiles.get(d)
                if not isinstance(t, int) or isinstance(t, bool) or t < 1:
                    problems.append("%s.tiles.%s: must be a positive integer, got %r"
                                    % (where, d, t))
                elif t > layer.dim(d):
                    problems.append("%s.tiles.%s: %d exceeds layer dimension %d"
                                    % (where, d, t, layer.dim(d)))
        for d in DIMS:
            a, b = chrom.l1.tiles.get(d), chrom.l2.tiles.get(d)
            if isinstance(a, int) and isinstance(b, int) and a > b:
                problems.append("mappings[%d].l1.tiles.%s: %d exceeds the level-2 tile %d"
                                % (i, d, a, b))
    return problems


def decode(genome: Genome, model: Model) -> AcceleratorDesign:
    """Materialize the hardware a repaired genome describes.

    Buffers get the exact largest per-layer requirement: each level is
    sized by the layer whose three tensors sum highest there.
    """
    reqs = tuple(min_buffer_requirement(chrom, layer, genome.pi_l1)
                 for chrom, layer in zip(genome.mappings, model.layers))
    return AcceleratorDesign(
        pe_rows=genome.pi_l1,
        pe_cols=genome.pi_l2,
        l1_words_per_pe=max(r.l1_total for r in reqs),
        l2_words=max(r.l2_total for r in reqs),
        mappings=tuple(genome.mappings),
        buffer_reqs=reqs,
    )


# Well-known dataflow styles as (level-2 parallel dim, level-1 parallel dim).
TEMPLATES = {
    "dla": ("K", "C"),
    "shi": ("Y", "X"),
    "eye": ("Y", "R"),
}


def template_mapping(kind: str, layer: LayerShape, pi_l1: int,
                     pi_l2: int) -> MappingChromosome:
    """Fixed-style mapping for one layer on a given array shape.

    The level-1 tile covers the array along its parallel dimension; the
    level-2 tile additionally covers pi_l2 such tiles along its own
    parallel dimension.  Both clamp to the layer.  Loop order is the
    canonical dimension order at both levels.
    """
    if kind not in TEMPLATES:
        raise InputError("unknown mapping template %r (have: %s)"
                         % (kind, ", ".join(sorted(TEMPLATES))))
    p2, p1 = TEMPLATES[kind]
    t1 = {d: 1 for d in DIMS}
    t1[p1] = min(layer.dim(p1), pi_l1)
    t2 = dict(t1)
    t2[p2] = min(layer.dim(p2), t1[p2] * pi_l2)
    return MappingChromosome(
        l2=LevelGene(pi_l2, p2, DIMS, t2),
        l1=LevelGene(pi_l1, p1, DIMS, t1),
    )


def random_genome(model: Model, platform, rng) -> Genome:
    """Draw one repaired genome uniformly over the raw gene ranges.

    Consumes the generator in a fixed order (PE extents, then per layer
    the level-2 and level-1 genes) so a seed pins the result.
    """
    choices = platform.pi_choices
    pi_l2 = int(choices[rng.integers(len(choices))])
    pi_l1 = int(choices[rng.integers(len(choices))])
    mappings = []
    for layer in model.layers:
        genes = []
        for pi in (pi_l2, pi_l1):
            p = DIMS[rng.integers(6)]
            order = tuple(DIMS[i] for i in rng.permutation(6))
            tiles = {d: int(rng.integers(1, layer.dim(d) + 1)) for d in DIMS}
            genes.append(LevelGene(pi, p, order, tiles))
        mappings.append(MappingChromosome(l2=genes[0], l1=genes[1]))
    return repair(Genome(pi_l2, pi_l1, mappings), model, platform)


def order_to_index(order) -> int:
    """Rank of a dimension permutation in lexicographic order."""
    letters = list(DIMS)
    idx = 0
    for d in order:
        j = letters.index(d)
        idx += j * math.factorial(len(letters) - 1)
        letters.pop(j)
    return idx


def index_to_order(idx: int) -> tuple:
    letters = list(DIMS)
    out = []
    for i in range(6, 0, -1):
        j, idx = divmod(idx, math.factorial(i - 1))
        out.append(letters.pop(j))
    return tuple(out)


class GenomeCodec:
    """Flat integer-vector view of the genome space.

    Layout: [pe-rows choice, pe-cols choice] then per layer and per
    level (2 then 1): [parallel dim, order rank, six tile sizes].
    Domain-blind searchers operate on the vector; decoding clamps each
    position into its range and repairs the result.
    """

    def __init__(self, model: Model, platform):
        self.model = model
        self.platform = platform
        self.choices = list(platform.pi_choices)
        bounds = [(0, len(self.choices) - 1), (0, len(self.choices) - 1)]
        for layer in model.layers:
            for _ in range(2):
                bounds.append((0, 5))
                bounds.append((0, 719))
                bounds.extend((1, layer.dim(d)) for d in DIMS)
        self.bounds = tuple(bounds)

    @property
    def length(self) -> int:
        return len(self.bounds)

    def _pi_index(self, value: int) -> int:
        # nearest allowed value from below; clamps off-grid extents
        i = bisect_right(self.choices, value) - 1
        return max(0, i)

    def flatten(self, genome: Genome) -> list:
        vec = [self._pi_index(genome.pi_l1), self._pi_index(genome.pi_l2)]
        for chrom in genome.mappings:
            for gene in (chrom.l2, chrom.l1):
                vec.append(DIMS.index(gene.parallel_dim))
                vec.append(order_to_index(gene.order))
                vec.extend(gene.tiles[d] for d in DIMS)
        return vec

    def unflatten(self, vec) -> Genome:
        if len(vec) != self.length:
            raise InputError("vector length %d does not match the space (%d)"
                             % (len(vec), self.length))
        vals = [min(max(int(v), lo), hi) for v, (lo, hi) in zip(vec, self.bounds)]
        pi_l1 = self.choices[vals[0]]
        pi_l2 = self.choices[vals[1]]
        mappings = []
        pos = 2
        for _ in self.model.layers:
            genes = []
            for pi in (pi_l2, pi_l1):
                p = DIMS[vals[pos]]
                order = index_to_order(vals[pos + 1])
                tiles = {d: vals[pos + 2 + i] for i, d in enumerate(DIMS)}
                genes.append(LevelGene(pi, p, order, tiles))
                pos += 8
            mappings.append(MappingChromosome(l2=genes[0], l1=genes[1]))
        return repair(Genome(pi_l2, pi_l1, mappings), self.model, self.platform)


def genome_to_dict(genome: Genome) -> dict:
    def gene(g):
        return {"pi": g.pi, "parallel_dim": g.parallel_dim,
                "order": "".join(g.order),
                "tiles": {d: g.tiles[d] for d in DIMS}}
    return {"pi_l2": genome.pi_l2, "pi_l1": genome.pi_l1,
            "mappings": [{"l2": gene(m.l2), "l1": gene(m.l1)}
                         for m in genome.mappings]}


def genome_from_dict(obj) -> Genome:
    """Rebuild a genome from its checkpoint form, naming any bad field."""
    if not isinstance(obj, dict):
        raise InputError("genome file: top level must be an object")
    for name in ("pi_l2", "pi_l1"):
        v = obj.get(name)
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise InputError("genome file: %s must be a positive integer, got %r"
                             % (name, v))
    if not isinstance(obj.get("mappings"), list) or not obj["mappings"]:
        raise InputError("genome file: 'mappings' must be a non-empty list")

    def gene(spec, where):
        if not isinstance(spec, dict):
            raise InputError("%s: must be an object" % where)
        order = spec.get("order")
        if (not isinstance(order, str) or len(order) != 6
                or sorted(order) != sorted(DIMS)):
            raise InputError("%s.order: not a permutation of %s, got %r"
                             % (where, "".join(DIMS), order))
        p = spec.get("parallel_dim")
        if p not in DIMS:
            raise InputError("%s.parallel_dim: unknown dimension %r" % (where, p))
        tiles = spec.get("tiles")
        if not isinstance(tiles, dict) or set(tiles) != set(DIMS):
            raise InputError("%s.tiles: must map exactly the six dimensions" % where)
        for d in DIMS:
            t = tiles[d]
            if not isinstance(t, int) or isinstance(t, bool) or t < 1:
                raise InputError("%s.tiles.%s: must be a positive integer, got %r"
                                 % (where, d, t))
        pi = spec.get("pi")
        if not isinstance(pi, int) or isinstance(pi, bool) or pi < 1:
            raise InputError("%s.pi: must be a positive integer, got %r" % (where, pi))
        return LevelGene(pi, p, tuple(order), {d: tiles[d] for d in DIMS})

    mappings = []
    for i, m in enumerate(obj["mappings"]):
        where = "mappings[%d]" % i
        if not isinstance(m, dict) or set(m) - {"l2", "l1"}:
            raise InputError("%s: must hold exactly 'l2' and 'l1'" % where)
        mappings.append(MappingChromosome(
            l2=gene(m.get("l2"), where + ".l2"),
            l1=gene(m.get("l1"), where + ".l1")))
    return Genome(obj["pi_l2"], obj["pi_l1"], mappings)


def save_genome(path, genome: Genome) -> None:
    with open(path, "w") as fh:
        json.dump(genome_to_dict(genome), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_genome(path) -> Genome:
    try:
        with open(path, "rb") as fh:
            obj = json.load(fh)
    except OSError as e:
        raise InputError("cannot read genome file %s: %s" % (path, e))
    except json.JSONDecodeError as e:
        raise InputError("genome file %s is not valid JSON: %s" % (path, e))
    return genome_from_dict(obj)
