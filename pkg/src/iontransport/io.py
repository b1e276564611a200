"""CSV helpers shared by the exporters."""
from __future__ import annotations

import csv
import math


def format_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def format_cell(x) -> str:
    if isinstance(x, float):
        return format_float(x)
    if x is None:
        return ""
    return str(x)


def write_csv(path, header, rows) -> None:
    """RFC-4180 CSV, UTF-8, 17 significant digits for floats."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))
