#!/usr/bin/env python3
"""
Transverse Invariant Runner
Entry point for the transverse CLI: python run_transverse.py <subcommand> [options]
"""

import sys

from transverse.cli import main

if __name__ == '__main__':
    sys.exit(main())
