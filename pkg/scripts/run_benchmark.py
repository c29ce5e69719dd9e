#!/usr/bin/env python3
"""Thin wrapper so the benchmark runs without installing the console script.

Example:
    python scripts/run_benchmark.py --problems BK1,JOS1_l1 --runs 50 \
        --solvers backtracking,fixed --fixed-l-scale 10 --out bench_out
"""

import sys

from mofista.cli import main

if __name__ == "__main__":
    sys.exit(main())
