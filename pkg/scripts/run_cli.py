#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Launch the simulator CLI from a source checkout without installing it.
"""

import os
import sys


def main():
    project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    sys.path.insert(0, project_root)

    from dmimo.harness.cli import main as run_main
    return run_main()


if __name__ == "__main__":
    sys.exit(main())
