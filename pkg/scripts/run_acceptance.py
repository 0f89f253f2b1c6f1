"""Run the acceptance criteria outside pytest and print one line per criterion."""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))

from test_acceptance import run_criterion  # noqa: E402


def main():
    ok = True
    for k in range(1, 11):
        passed, line = run_criterion(k)
        ok &= passed
        print(line, flush=True)
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
