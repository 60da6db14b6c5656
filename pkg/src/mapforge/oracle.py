"""Exact loop-nest interpreter for small layers.

Walks the two-level tiled loop nest a mapping describes, step by step,
with real (clipped) edge tiles and real PE shares.  Counts cycles as
the slowest unit per step, counts words whenever a unit's tile of a
tensor actually changes, and tracks peak buffer residency.  It shares
no formulas with the closed-form model; agreement between the two is
checked, not assumed.  Cost grows with the number of tiles, so layers
are capped by their MAC count.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .designspace import ceil_div, tensor_words, TENSOR_DIMS, TENSORS
from .errors import InputError
from .workload import DIMS, LayerShape, total_macs

MAC_CAP = 1_000_000


@dataclass(frozen=True)
class ExactCounts:
    """Ground-truth counts from interpreting one layer's mapping."""

    cycles: int
    dram_words: int
    l2_words: int
    max_live_l2_words: int
    max_live_l1_words_per_pe: int
    dram_by_tensor: dict
    l2_by_tensor: dict


def oracle_simulate(chrom, layer: LayerShape, pi_l1: int, pi_l2: int,
                    cap: int = MAC_CAP) -> ExactCounts:
    """Interpret one layer's mapping exactly.

    Outer loops walk level-2 tiles in the level-2 order; per-tile loops
    walk level-1 tiles in the level-1 order, with the level-2 parallel
    dimension advancing pi_l2 sub-tiles per serial pass.  Each array
    splits its tile's level-1 parallel extent across pi_l1 PEs; a step
    lasts as long as its busiest PE.  A unit fetches a tensor when the
    tile it needs differs from the one it last held; tensors not
    indexed by the spread dimension are multicast and counted once.
    Output tiles write back what they fetch, so fetch words alone are
    reported.
    """
    if total_macs(layer) > cap:
        raise InputError("layer %s has %d MACs, above the interpreter cap %d"
                         % (layer.name, total_macs(layer), cap))
    dims = {d: layer.dim(d) for d in DIMS}
    s = layer.stride
    t2, t1 = chrom.l2.tiles, chrom.l1.tiles
    p2, p1 = chrom.l2.parallel_dim, chrom.l1.parallel_dim
    l2_order, l1_order = chrom.l2.order, chrom.l1.order

    outer_counts = [ceil_div(dims[d], t2[d]) for d in l2_order]
    dram_words = {t: 0 for t in TENSORS}
    l2_words = {t: 0 for t in TENSORS}
    last_dram = {t: None for t in TENSORS}
    last_l2 = {}
    cycles = 0
    live_l2_max = 0
    live_l1_max = 0

    for oi in product(*(range(c) for c in outer_counts)):
        start2 = {}
        ext2 = {}
        for d, i in zip(l2_order, oi):
            st = i * t2[d]
            start2[d] = st
            ext2[d] = min(t2[d], dims[d] - st)
        live = sum(tensor_words(t, ext2, s) for t in TENSORS)
        if live > live_l2_max:
            live_l2_max = live
        for t in TENSORS:
            key = tuple(start2[d] for d in TENSOR_DIMS[t])
            if key != last_dram[t]:
                dram_words[t] += tensor_words(t, ext2, s)
                last_dram[t] = key

        # level-1 sub-tiles along the spread dimension, handed to the
        # arrays round robin; one serial pass covers pi_l2 of them
        m_p2 = ceil_div(ext2[p2], t1[p2])
        per_tile_counts = []
        for d in l1_order:
            if d == p2:
                per_tile_counts.append(ceil_div(m_p2, pi_l2))
            else:
                per_tile_counts.append(ceil_div(ext2[d], t1[d]))

        for mi in product(*(range(c) for c in per_tile_counts)):
            step = 0
            start1 = {}
            ext1 = {}
            for d, j in zip(l1_order, mi):
                if d == p2:
                    step = j
                else:
                    st = start2[d] + j * t1[d]
                    start1[d] = st
                    ext1[d] = min(t1[d], start2[d] + ext2[d] - st)
            step_cycles = 0
            multicast_seen = set()
            for c in range(pi_l2):
                sub = step * pi_l2 + c
                if sub >= m_p2:
                    break
                st = start2[p2] + sub * t1[p2]
                start1[p2] = st
                ext1[p2] = min(t1[p2], start2[p2] + ext2[p2] - st)

                # busiest PE takes the ceiling share of the parallel extent
                share = ceil_div(ext1[p1], pi_l1)
                work = share
                for d in DIMS:
                    if d != p1:
                        work *= ext1[d]
                if work > step_cycles:
                    step_cycles = work
                pe_ext = dict(ext1)
                pe_ext[p1] = share
                live = sum(tensor_words(t, pe_ext, s) for t in TENSORS)
                if live > live_l1_max:
                    live_l1_max = live

                for t in TENSORS:
                    rel = TENSOR_DIMS[t]
                    key = tuple(start1[d] for d in rel)
                    if p2 in rel:
                        slot = (t, c)      # each array streams its own sub-tiles
                    else:
                        if t in multicast_seen:
                            continue
                        multicast_seen.add(t)
                        slot = t           # one broadcast stream for all arrays
                    if last_l2.get(slot) != key:
                        l2_words[t] += tensor_words(t, ext1, s)
                        last_l2[slot] = key
            cycles += step_cycles

    return ExactCounts(
        cycles=cycles,
        dram_words=sum(dram_words.values()),
        l2_words=sum(l2_words.values()),
        max_live_l2_words=live_l2_max,
        max_live_l1_words_per_pe=live_l1_max,
        dram_by_tensor=dram_words,
        l2_by_tensor=l2_words,
    )
