#!/usr/bin/env python3
"""
Self-similar p-groups - Main Entry Point

Decides self-similarity of finite p-groups of degree p through simple virtual
endomorphisms, emits the induced tree representations as Mealy automata and
checks the exponent and power-structure theorems on a catalog of small groups.

Usage:
    python main.py catalog list
    python main.py analyze heisenberg3
    python main.py search-selfsim c4 --all
    python main.py emit-automaton heisenberg3 --endo example23 --format dot
    python main.py --config config/default_config.json verify --suite default --out report.json
    python main.py --help

Exit codes: 0 success, 1 theorem violations, 2 usage, input or limit errors.
"""

import sys

from selfsim.cli import main

if __name__ == "__main__":
    sys.exit(main())
