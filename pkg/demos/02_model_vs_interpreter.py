"""Cross-check the closed-form cost model against the loop interpreter.

The interpreter actually walks every tile step and counts fetches, so
it is slow but unarguable.  On tilings that divide evenly the two must
agree to the word; on ragged ones the closed forms may only overshoot.
"""

import numpy as np

from mapforge import min_buffer_requirement
from mapforge.costmodel import boundary_traffic, compute_cycles
from mapforge.oracle import oracle_simulate

import pathlib
import sys
sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "tests"))
from conftest import random_divisible_case, random_ragged_case  # noqa: E402

rng = np.random.default_rng(7)

print("divisible tilings: model vs interpreter")
print("%-28s %10s %10s %10s" % ("", "cycles", "dram", "l2"))
for i in range(5):
    chrom, layer, pi_l1, pi_l2 = random_divisible_case(rng)
    got = oracle_simulate(chrom, layer, pi_l1, pi_l2)
    cycles = compute_cycles(chrom, layer, pi_l1, pi_l2)
    dram = sum(boundary_traffic("dram", chrom, layer, pi_l2).values())
    l2 = sum(boundary_traffic("l2", chrom, layer, pi_l2).values())
    match = (cycles, dram, l2) == (got.cycles, got.dram_words, got.l2_words)
    print("case %d  %-20s %10d %10d %10d" % (i, "model", cycles, dram, l2))
    print("        %-20s %10d %10d %10d  %s"
          % ("interpreter", got.cycles, got.dram_words, got.l2_words,
             "exact" if match else "MISMATCH"))

print("\nragged tilings: the model rounds partial tiles up")
for i in range(5):
    chrom, layer, pi_l1, pi_l2 = random_ragged_case(rng)
    got = oracle_simulate(chrom, layer, pi_l1, pi_l2)
    cycles = compute_cycles(chrom, layer, pi_l1, pi_l2)
    dram = sum(boundary_traffic("dram", chrom, layer, pi_l2).values())
    slack_c = cycles - got.cycles
    slack_d = dram - got.dram_words
    req = min_buffer_requirement(chrom, layer, pi_l1)
    print("case %d  cycles %5d (true %5d, +%d)   dram %6d (true %6d, +%d)"
          % (i, cycles, got.cycles, slack_c, dram, got.dram_words, slack_d))
    assert slack_c >= 0 and slack_d >= 0
    assert req.l2_total >= got.max_live_l2_words

print("\nbuffer sizing always covers the interpreter's peak live words")
