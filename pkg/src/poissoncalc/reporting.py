"""Deterministic CSV and JSON report writers.

Reports carry a hash of the scientific part of the configuration (the output
directory is excluded, so runs into different directories stay byte-identical)
and the library version. No timestamps are embedded: identical configuration
and seed must produce identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import dataclass

VERDICTS = ("consistent", "violated", "reported")


@dataclass(frozen=True)
class CheckRow:
    suite: str
    check: str
    inputs: str
    left: float
    right: float
    stderr: float
    verdict: str
    exact: float | None = None
    detail: dict | None = None

    def as_dict(self) -> dict:
        d = {"suite": self.suite, "check": self.check, "inputs": self.inputs,
             "left": self.left, "right": self.right, "stderr": self.stderr,
             "verdict": self.verdict}
        if self.exact is not None:
            d["exact"] = self.exact
        if self.detail is not None:
            d["detail"] = self.detail
        return d


def hashable_config(config: dict) -> dict:
    return {k: v for k, v in config.items() if k != "out_dir"}


def config_hash(config: dict) -> str:
    canonical = json.dumps(hashable_config(config), sort_keys=True,
                           separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def rows_ok(rows) -> bool:
    return all(r.verdict in ("consistent", "reported") for r in rows)


def write_reports(rows, config: dict, out_dir: str,
                  version: str) -> tuple[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "report.csv")
    json_path = os.path.join(out_dir, "report.json")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["suite", "check", "inputs", "left", "right",
                         "stderr", "verdict", "exact"])
        for r in rows:
            writer.writerow([r.suite, r.check, r.inputs, repr(r.left),
                             repr(r.right), repr(r.stderr), r.verdict,
                             "" if r.exact is None else repr(r.exact)])
    doc = {
        "tool": "poissoncalc",
        "version": version,
        "config_hash": config_hash(config),
        "config": hashable_config(config),
        "rows": [r.as_dict() for r in rows],
        "summary": {
            "n_checks": len(rows),
            "n_consistent": sum(r.verdict == "consistent" for r in rows),
            "n_reported": sum(r.verdict == "reported" for r in rows),
            "n_violated": sum(r.verdict == "violated" for r in rows),
        },
    }
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return csv_path, json_path
