"""Tabular campaign trace with deterministic CSV and JSON rendering.

Cell formatting uses Python's shortest round-trip float repr, so identical
runs produce byte-identical files.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Union

Cell = Union[int, float]


def _format_cell(value: Cell) -> str:
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


@dataclass(frozen=True)
class TraceTable:
    columns: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...]

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(
                    f"row has {len(row)} cells, table has {len(self.columns)} columns"
                )

    def column(self, name: str) -> list[Cell]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow(_format_cell(v) for v in row)
        return buffer.getvalue()

    def to_json_rows(self) -> list[dict[str, Cell]]:
        return [dict(zip(self.columns, row)) for row in self.rows]

    @classmethod
    def from_csv(cls, text: str) -> "TraceTable":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("trace CSV is empty") from None
        rows: list[tuple[Cell, ...]] = []
        for raw in reader:
            if not raw:
                continue
            cells: list[Cell] = []
            for token in raw:
                try:
                    cells.append(int(token))
                except ValueError:
                    cells.append(float(token))
            rows.append(tuple(cells))
        return cls(columns=tuple(header), rows=tuple(rows))
