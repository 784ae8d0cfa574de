#!/usr/bin/env python3
"""Regenerate src/sobol_table.inc from the Joe-Kuo new-joe-kuo-6.21201 tables
bundled with SciPy. Prints nothing on success; checks the first 4096 points of
every dimension against scipy.stats.qmc.Sobol before writing."""

import os
import sys

import numpy as np
import scipy
from scipy.stats import qmc

DIMENSIONS = 64
BITS = 32


def direction_numbers(poly, vinit):
    if poly == 1:
        return [1 << (BITS - 1 - k) for k in range(BITS)]
    s = poly.bit_length() - 1
    a = (poly >> 1) & ((1 << (s - 1)) - 1)
    m = [int(x) for x in vinit[:s]]
    for k in range(s, BITS):
        value = m[k - s] ^ (m[k - s] << s)
        for j in range(1, s):
            if (a >> (s - 1 - j)) & 1:
                value ^= m[k - j] << j
        m.append(value)
    return [m[k] << (BITS - 1 - k) for k in range(BITS)]


def main():
    path = os.path.join(os.path.dirname(scipy.__file__), "stats", "_sobol_direction_numbers.npz")
    data = np.load(path)
    table = [direction_numbers(int(data["poly"][d]), data["vinit"][d]) for d in range(DIMENSIONS)]

    n = 4096
    reference = qmc.Sobol(DIMENSIONS, scramble=False).random_base2(12)
    x = [0] * DIMENSIONS
    for i in range(1, n):
        c = (i - 1 ^ ((i - 1) >> 1)) ^ (i ^ (i >> 1))
        bit = c.bit_length() - 1
        for d in range(DIMENSIONS):
            x[d] ^= table[d][bit]
            if abs(x[d] / 2.0**BITS - reference[i, d]) > 1e-9:
                sys.exit(f"mismatch at point {i}, dimension {d}")

    out = os.path.join(os.path.dirname(__file__), "..", "src", "sobol_table.inc")
    with open(out, "w") as f:
        f.write("// Generated by scripts/gen_sobol_table.py. Do not edit.\n")
        f.write(f"// Joe-Kuo direction numbers, {DIMENSIONS} dimensions x {BITS} bits.\n")
        for row in table:
            f.write("{" + ", ".join(f"0x{v:08x}u" for v in row) + "},\n")


if __name__ == "__main__":
    main()
