"""Shared helpers: random mapping generators and the acceptance summary."""
import numpy as np

from mapforge import DIMS, LayerShape
from mapforge.designspace import LevelGene, MappingChromosome


def divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def random_divisible_case(rng):
    """Layer plus 2-level mapping where every tile divides its parent.

    The spatial split is also kept whole: pi_l2 either divides the
    parallel sub-tile count or covers it, so no array runs a ragged
    final pass.  On these cases the closed-form model is exact.
    """
    dims = {d: int(rng.choice([1, 2, 3, 4, 6])) for d in DIMS}
    stride = int(rng.choice([1, 2]))
    layer = LayerShape(name="t", stride=stride, **dims)
    t2 = {d: int(rng.choice(divisors(dims[d]))) for d in DIMS}
    t1 = {d: int(rng.choice(divisors(t2[d]))) for d in DIMS}
    p2 = DIMS[rng.integers(6)]
    p1 = DIMS[rng.integers(6)]
    o2 = tuple(DIMS[i] for i in rng.permutation(6))
    o1 = tuple(DIMS[i] for i in rng.permutation(6))
    n_p2 = t2[p2] // t1[p2]
    ok = [v for v in (1, 2, 4) if n_p2 % v == 0 or v >= n_p2]
    pi_l2 = int(rng.choice(ok))
    pi_l1 = int(rng.choice([1, 2, 4]))
    chrom = MappingChromosome(l2=LevelGene(pi_l2, p2, o2, t2),
                              l1=LevelGene(pi_l1, p1, o1, t1))
    return chrom, layer, pi_l1, pi_l2


def random_ragged_case(rng):
    """Arbitrary tiles and splits; the model may only overcount here."""
    dims = {d: int(rng.integers(1, 9)) for d in DIMS}
    stride = int(rng.choice([1, 2]))
    layer = LayerShape(name="t", stride=stride, **dims)
    t2 = {d: int(rng.integers(1, dims[d] + 1)) for d in DIMS}
    t1 = {d: int(rng.integers(1, t2[d] + 1)) for d in DIMS}
    p2 = DIMS[rng.integers(6)]
    p1 = DIMS[rng.integers(6)]
    o2 = tuple(DIMS[i] for i in rng.permutation(6))
    o1 = tuple(DIMS[i] for i in rng.permutation(6))
    pi_l2 = int(rng.integers(1, 5))
    pi_l1 = int(rng.integers(1, 5))
    chrom = MappingChromosome(l2=LevelGene(pi_l2, p2, o2, t2),
                              l1=LevelGene(pi_l1, p1, o1, t1))
    return chrom, layer, pi_l1, pi_l2


# filled by test_acceptance.py, printed after the run so the verdict
# lines survive pytest's output capture
ACCEPTANCE_LINES = []


def record_criterion(number, passed, detail):
    ACCEPTANCE_LINES.append("criterion %d: %s - %s"
                            % (number, "PASS" if passed else "FAIL", detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
