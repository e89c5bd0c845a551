"""Recompute the three summary tables and write them as JSON.

    python scripts/reproduce_tables.py [table1 table2 table3] [--out DIR]
"""

import argparse
import json
from pathlib import Path

from entadd.tables import TABLES, run_table


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("tables", nargs="*", default=list(TABLES), choices=TABLES)
    p.add_argument("--out", type=Path, default=Path("results"))
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    failed = 0
    for name in args.tables:
        rep = run_table(name)
        print(rep.render(), flush=True)
        print(flush=True)
        (args.out / f"{name}.json").write_text(json.dumps(rep.to_json(), indent=2))
        failed += not rep.passed
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
