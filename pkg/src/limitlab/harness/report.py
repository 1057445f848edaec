"""CSV reports for sweeps."""

from __future__ import annotations

import csv
from pathlib import Path

COLUMNS = ("config_id", "seed", "ordering", "channel", "converged_at", "verified",
           "samples", "mass", "wall_ms")
HASH_COLUMNS = ("config_id", "seed", "ordering", "channel", "hypothesis_hash")


def _sort_key(report):
    return (report.config_id, report.seed, report.channel, report.ordering)


def write_csv(reports, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=COLUMNS)
        w.writeheader()
        for r in sorted(reports, key=_sort_key):
            w.writerow(r.row())
    return path


def hash_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".hashes.csv")


def write_hashes(reports, path) -> Path:
    """Final hypothesis hashes, keyed like the main report rows."""
    out = hash_path(path)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HASH_COLUMNS)
        for r in sorted(reports, key=_sort_key):
            w.writerow([r.config_id, r.seed, r.ordering, r.channel, r.final_hash or ""])
    return out


def read_csv(path) -> list:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))
