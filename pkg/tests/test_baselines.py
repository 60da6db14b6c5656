import pytest

from mapforge import (FIXED_HW_PRESETS, GaConfig, InputError, LayerShape,
                      Model, Platform, decode, evaluate, genome_to_dict,
                      grid_search_hw, mapping_opt_fixed_hw, random_search,
                      std_ga)

PLAT = Platform(area_budget=1.0, max_pes=2048)
MODEL = Model(name="m", layers=(
    LayerShape(name="a", K=8, C=8, Y=8, X=8, R=3, S=3, stride=1),
    LayerShape(name="b", K=16, C=8, Y=4, X=4, R=1, S=1, stride=1),
))


def test_random_search_deterministic():
    a = random_search(MODEL, PLAT, sample_budget=200, seed=4)
    b = random_search(MODEL, PLAT, sample_budget=200, seed=4)
    assert genome_to_dict(a.best_genome) == genome_to_dict(b.best_genome)
    assert a.trace == b.trace
    assert a.samples_used == 200


def test_random_search_trace_chunks():
    res = random_search(MODEL, PLAT, sample_budget=250, seed=0)
    assert [row.samples_used for row in res.trace] == [100, 200, 250]
    best = [row.best_fitness for row in res.trace]
    assert best == sorted(best)


def test_random_search_solves_unit_space():
    unit = Model(name="u", layers=(
        LayerShape(name="a", K=1, C=1, Y=1, X=1, R=1, S=1, stride=1),))
    plat = Platform(area_budget=1.0, max_pes=1)
    res = random_search(unit, plat, sample_budget=5, seed=0)
    assert res.best_report.objective_value == 1.0


def test_std_ga_deterministic_and_budgeted():
    cfg = GaConfig(population_size=8, sample_budget=70, rng_seed=1)
    a = std_ga(MODEL, PLAT, config=cfg)
    b = std_ga(MODEL, PLAT, config=cfg)
    assert genome_to_dict(a.best_genome) == genome_to_dict(b.best_genome)
    assert a.trace == b.trace
    assert a.samples_used == 64  # whole generations only
    assert a.best_report.valid


def test_std_ga_trace_monotone():
    cfg = GaConfig(population_size=8, sample_budget=160, rng_seed=2)
    res = std_ga(MODEL, PLAT, config=cfg)
    best = [row.best_fitness for row in res.trace]
    assert best == sorted(best)


def test_grid_search_enumerates_given_grid():
    grid = [(1, 1), (1, 2), (2, 1), (2, 2)]
    res = grid_search_hw(MODEL, PLAT, grid=grid)
    assert res.samples_used == 4
    reports = [grid_search_hw(MODEL, PLAT, grid=[pt]).best_report
               for pt in grid]
    assert res.best_report.objective_value == min(
        r.objective_value for r in reports)


def test_grid_search_default_grid_respects_cap():
    plat = Platform(area_budget=1.0, max_pes=16)
    res = grid_search_hw(MODEL, plat)
    # pairs (r, c) over powers of two with r*c <= 16
    assert res.samples_used == 15


def test_grid_search_rejects_unknown_template():
    with pytest.raises(InputError) as err:
        grid_search_hw(MODEL, PLAT, template="systolic")
    assert "systolic" in str(err.value)


def test_grid_search_rejects_oversized_grid():
    with pytest.raises(InputError):
        grid_search_hw(MODEL, PLAT, sample_budget=3,
                       grid=[(1, 1), (1, 2), (2, 1), (2, 2)])


def test_preset_table_shape():
    assert set(FIXED_HW_PRESETS) == {"edge", "cloud"}
    for tier in FIXED_HW_PRESETS.values():
        assert set(tier) == {"buffer", "medium", "compute"}
        pes = [r * c for name in ("buffer", "medium", "compute")
               for r, c in (tier[name],)]
        assert pes[0] < pes[1] < pes[2]


def test_mapping_opt_pins_preset_shape():
    cfg = GaConfig(population_size=8, sample_budget=64, rng_seed=0)
    res = mapping_opt_fixed_hw(MODEL, PLAT, preset="buffer", config=cfg)
    rows, cols = FIXED_HW_PRESETS["cloud"]["buffer"]  # budget 1.0 is cloud-class
    assert (res.best_genome.pi_l1, res.best_genome.pi_l2) == (rows, cols)


def test_mapping_opt_edge_tier():
    plat = Platform(area_budget=0.2, max_pes=4096)
    cfg = GaConfig(population_size=8, sample_budget=64, rng_seed=0)
    res = mapping_opt_fixed_hw(MODEL, plat, preset="medium", config=cfg)
    rows, cols = FIXED_HW_PRESETS["edge"]["medium"]
    assert (res.best_genome.pi_l1, res.best_genome.pi_l2) == (rows, cols)


def test_mapping_opt_unknown_preset():
    with pytest.raises(InputError) as err:
        mapping_opt_fixed_hw(MODEL, PLAT, preset="huge")
    assert "huge" in str(err.value)


def test_mapping_opt_deterministic():
    cfg = GaConfig(population_size=8, sample_budget=64, rng_seed=3)
    a = mapping_opt_fixed_hw(MODEL, PLAT, preset="buffer", config=cfg)
    b = mapping_opt_fixed_hw(MODEL, PLAT, preset="buffer", config=cfg)
    assert genome_to_dict(a.best_genome) == genome_to_dict(b.best_genome)
