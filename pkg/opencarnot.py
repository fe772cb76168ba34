#!/usr/bin/env python3
"""
opencarnot - numerical sub-Riemannian distances
Command-line launcher
"""

import os
import sys

# Add src to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.cli import main as cli_main


def main():
    sys.exit(cli_main())


if __name__ == '__main__':
    main()
