"""Regenerate the seven zero tables and write them as CSV files.

Usage: python3 scripts/reproduce_tables.py [--out-dir results/tables]
Exits 3 if any entry misses the printed value by more than the tolerance.
"""
import argparse
import sys
import time
from pathlib import Path

from r2spectra.cli import main as cli_main
from r2spectra.tables import TABLES, compute_table


def run(out_dir: Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    status = 0
    t0 = time.perf_counter()
    for t in sorted(TABLES):
        code = cli_main(["table", "--id", str(t), "--out", str(out_dir / f"table{t}.csv")])
        res = compute_table(t)
        print(f"table {t}: {len(res.rows):3d} entries  max |diff| {res.max_diff:.2e}  "
              f"{'ok' if code == 0 else 'MISMATCH'}")
        status = max(status, code)
    print(f"elapsed {time.perf_counter() - t0:.2f} s; CSV files in {out_dir}")
    return status


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, default=Path("results/tables"))
    sys.exit(run(ap.parse_args().out_dir))
