import numpy as np
import pytest

from mapforge import DIMS, InputError, LayerShape, min_buffer_requirement
from mapforge.costmodel import boundary_traffic, compute_cycles
from mapforge.designspace import LevelGene, MappingChromosome
from mapforge.oracle import MAC_CAP, oracle_simulate

from conftest import random_divisible_case, random_ragged_case


def test_unit_problem_counts():
    layer = LayerShape(name="u", K=1, C=1, Y=1, X=1, R=1, S=1, stride=1)
    unit = {d: 1 for d in DIMS}
    chrom = MappingChromosome(
        l2=LevelGene(1, "K", tuple(DIMS), dict(unit)),
        l1=LevelGene(1, "K", tuple(DIMS), dict(unit)),
    )
    got = oracle_simulate(chrom, layer, 1, 1)
    assert got.cycles == 1
    assert got.dram_words == 3
    assert got.l2_words == 3
    assert got.max_live_l2_words == 3
    assert got.max_live_l1_words_per_pe == 3


# Same frozen mapping as the model tests; the interpreter must agree on
# every count because the tiling divides evenly.
REF_LAYER = LayerShape(name="ref", K=4, C=4, Y=4, X=2, R=2, S=1, stride=1)
REF_CHROM = MappingChromosome(
    l2=LevelGene(2, "K", ("C", "K", "Y", "X", "R", "S"),
                 {"K": 2, "C": 4, "Y": 2, "X": 2, "R": 2, "S": 1}),
    l1=LevelGene(2, "C", ("K", "Y", "C", "X", "R", "S"),
                 {"K": 1, "C": 2, "Y": 2, "X": 1, "R": 1, "S": 1}),
)


def test_reference_divisible_exact():
    got = oracle_simulate(REF_CHROM, REF_LAYER, 2, 2)
    assert got.cycles == 64
    assert got.dram_by_tensor == {"W": 32, "I": 96, "O": 32}
    assert got.l2_by_tensor == {"W": 128, "I": 128, "O": 64}
    assert got.max_live_l2_words == 48
    assert got.max_live_l1_words_per_pe == 5


def test_reference_divisible_matches_model():
    got = oracle_simulate(REF_CHROM, REF_LAYER, 2, 2)
    assert compute_cycles(REF_CHROM, REF_LAYER, 2, 2) == got.cycles
    assert boundary_traffic("dram", REF_CHROM, REF_LAYER, 2) == got.dram_by_tensor
    assert boundary_traffic("l2", REF_CHROM, REF_LAYER, 2) == got.l2_by_tensor
    req = min_buffer_requirement(REF_CHROM, REF_LAYER, 2)
    assert req.l2_total >= got.max_live_l2_words
    assert req.l1_total >= got.max_live_l1_words_per_pe


# A ragged tiling: K=5 split in 2s leaves a remainder column, so the
# closed forms round up while the interpreter pays only real work.
RAG_LAYER = LayerShape(name="rag", K=5, C=3, Y=3, X=1, R=1, S=1, stride=1)
RAG_CHROM = MappingChromosome(
    l2=LevelGene(2, "K", ("K", "C", "Y", "X", "R", "S"),
                 {"K": 2, "C": 3, "Y": 2, "X": 1, "R": 1, "S": 1}),
    l1=LevelGene(2, "Y", ("C", "K", "Y", "X", "R", "S"),
                 {"K": 1, "C": 2, "Y": 1, "X": 1, "R": 1, "S": 1}),
)


def test_reference_ragged_exact_counts():
    got = oracle_simulate(RAG_CHROM, RAG_LAYER, 2, 2)
    assert got.cycles == 27
    assert got.dram_words == 57
    assert got.dram_by_tensor == {"W": 15, "I": 27, "O": 15}
    assert got.l2_words == 82


def test_reference_ragged_model_bounds():
    got = oracle_simulate(RAG_CHROM, RAG_LAYER, 2, 2)
    assert compute_cycles(RAG_CHROM, RAG_LAYER, 2, 2) == 48
    dram = boundary_traffic("dram", RAG_CHROM, RAG_LAYER, 2)
    assert dram == {"W": 18, "I": 36, "O": 24}
    l2 = boundary_traffic("l2", RAG_CHROM, RAG_LAYER, 2)
    assert sum(l2.values()) == 144
    assert got.cycles <= 48
    for t in ("W", "I", "O"):
        assert got.dram_by_tensor[t] <= dram[t]
        assert got.l2_by_tensor[t] <= l2[t]


def test_divisible_mappings_agree_everywhere():
    rng = np.random.default_rng(101)
    for _ in range(60):
        chrom, layer, pi_l1, pi_l2 = random_divisible_case(rng)
        got = oracle_simulate(chrom, layer, pi_l1, pi_l2)
        assert compute_cycles(chrom, layer, pi_l1, pi_l2) == got.cycles
        assert boundary_traffic("dram", chrom, layer, pi_l2) == got.dram_by_tensor
        assert boundary_traffic("l2", chrom, layer, pi_l2) == got.l2_by_tensor
        req = min_buffer_requirement(chrom, layer, pi_l1)
        assert req.l2_total >= got.max_live_l2_words
        assert req.l1_total >= got.max_live_l1_words_per_pe


def test_ragged_mappings_stay_upper_bounds():
    rng = np.random.default_rng(102)
    for _ in range(60):
        chrom, layer, pi_l1, pi_l2 = random_ragged_case(rng)
        got = oracle_simulate(chrom, layer, pi_l1, pi_l2)
        assert compute_cycles(chrom, layer, pi_l1, pi_l2) >= got.cycles
        dram = boundary_traffic("dram", chrom, layer, pi_l2)
        l2 = boundary_traffic("l2", chrom, layer, pi_l2)
        for t in ("W", "I", "O"):
            assert dram[t] >= got.dram_by_tensor[t]
            assert l2[t] >= got.l2_by_tensor[t]
        req = min_buffer_requirement(chrom, layer, pi_l1)
        assert req.l2_total >= got.max_live_l2_words
        assert req.l1_total >= got.max_live_l1_words_per_pe


def test_mac_cap_guards_runtime():
    layer = LayerShape(name="big", K=256, C=256, Y=16, X=16, R=3, S=3,
                       stride=1)
    chrom = MappingChromosome(
        l2=LevelGene(1, "K", tuple(DIMS), {d: layer.dim(d) for d in DIMS}),
        l1=LevelGene(1, "K", tuple(DIMS), {d: layer.dim(d) for d in DIMS}),
    )
    with pytest.raises(InputError) as err:
        oracle_simulate(chrom, layer, 1, 1)
    assert str(MAC_CAP) in str(err.value)


def test_cap_can_be_raised():
    layer = LayerShape(name="k", K=2, C=2, Y=2, X=2, R=1, S=1, stride=1)
    chrom = MappingChromosome(
        l2=LevelGene(1, "K", tuple(DIMS), {d: layer.dim(d) for d in DIMS}),
        l1=LevelGene(1, "K", tuple(DIMS), {d: layer.dim(d) for d in DIMS}),
    )
    with pytest.raises(InputError):
        oracle_simulate(chrom, layer, 1, 1, cap=3)
    got = oracle_simulate(chrom, layer, 1, 1, cap=16)
    assert got.cycles == 16
