"""Minimal column-ordered tables rendered as CSV."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import List, Sequence


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    if hasattr(v, "dtype"):
        v = v.item()
        return _fmt(v)
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    s = str(v)
    if any(c in s for c in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


@dataclass
class Table:
    columns: List[str]
    rows: List[tuple] = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, table has {len(self.columns)} columns")
        self.rows.append(tuple(values))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def records(self) -> List[dict]:
        return [dict(zip(self.columns, r)) for r in self.rows]

    def with_provenance(self, seed: int, config_hash: str) -> "Table":
        return Table(["seed", "config_hash"] + list(self.columns),
                     [(seed, config_hash) + tuple(r) for r in self.rows])

    def extend(self, other: "Table"):
        if other.columns != self.columns:
            raise ValueError("column mismatch")
        self.rows.extend(other.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.columns) + "\n")
        for r in self.rows:
            buf.write(",".join(_fmt(v) for v in r) + "\n")
        return buf.getvalue()


def concat(tables: Sequence[Table]) -> Table:
    out = Table(list(tables[0].columns))
    for t in tables:
        out.extend(t)
    return out
