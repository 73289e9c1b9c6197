"""Run the acceptance gate and print one pass/fail line per criterion.

Usage: python3 scripts/run_acceptance.py [extra pytest args]
"""
import os
import sys

import pytest

HERE = os.path.dirname(os.path.abspath(__file__))


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    target = os.path.join(HERE, os.pardir, "tests", "test_acceptance.py")
    return pytest.main([os.path.normpath(target), "-q", "-p", "no:cacheprovider", *argv])


if __name__ == "__main__":
    sys.exit(main())
