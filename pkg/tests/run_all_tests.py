#!/usr/bin/env python3
"""
Run all functional tests for opencarnot
"""

import sys
import os
import unittest

# Add project directory to path
project_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_dir)
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

PHASES = [
    ("PHASE 1: Algebra & Groups", [
        "test_constants", "test_validation", "test_linalg_skew", "test_groups", "test_preset_library",
    ]),
    ("PHASE 2: Controls & Extremals", [
        "test_controls", "test_extremals",
    ]),
    ("PHASE 3: Distance Solvers", [
        "test_optimizer", "test_global_optimizer", "test_distance",
    ]),
    ("PHASE 4: Probes & Sections", [
        "test_probes", "test_scan",
    ]),
    ("PHASE 5: Export & Command Line", [
        "test_export", "test_cli",
    ]),
]


def run_phase(title, module_names):
    print("\n" + "=" * 70)
    print(title)
    print("=" * 70)
    try:
        loader = unittest.TestLoader()
        suite = unittest.TestSuite()
        for name in module_names:
            suite.addTests(loader.loadTestsFromName(name))
        runner = unittest.TextTestRunner(verbosity=2)
        return runner.run(suite).wasSuccessful()
    except Exception as e:
        print(f"Error running {title}: {e}")
        import traceback
        traceback.print_exc()
        return False


def main():
    print("=" * 70)
    print("opencarnot - Complete Test Suite")
    print("=" * 70)

    failed = [title for title, modules in PHASES if not run_phase(title, modules)]

    print("\n" + "=" * 70)
    print("TEST SUITE SUMMARY")
    print("=" * 70)

    if not failed:
        print("\n✓✓✓ ALL TESTS PASSED! ✓✓✓")
        return 0

    print("\n✗✗✗ SOME TESTS FAILED ✗✗✗")
    for title in failed:
        print(f"  - {title} failed")
    return 1


if __name__ == '__main__':
    sys.exit(main())
