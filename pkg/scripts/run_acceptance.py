"""Print one PASS/FAIL line per acceptance criterion (no pytest needed).

    python3 scripts/run_acceptance.py            # all criteria
    python3 scripts/run_acceptance.py 1 5        # selected ones
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "tests"))

import test_acceptance as acc  # noqa: E402


def main(argv):
    names = [n for n in acc.CRITERIA if not argv or n.split()[0] in argv]
    failed = 0
    for name in names:
        passed, detail = acc.CRITERIA[name]()
        acc.record(name, passed, detail)
        sys.stdout.flush()
        failed += not passed
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
