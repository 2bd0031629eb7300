import csv
import io
import json
import time
from contextlib import contextmanager
from fractions import Fraction

import humanize

from .logger import log

# ------------------------------------------------------------------------------------ #
#                                      Formatting                                      #
# ------------------------------------------------------------------------------------ #


def fmt_float(x, digits: int = 9) -> str:
    """
    Fixed formatting for every float we emit, so repeated runs diff cleanly.
    Integers, Fractions and text pass through unchanged.
    """
    if isinstance(x, (bool, int, str)) or x is None:
        return str(x)
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    if isinstance(x, (list, tuple)):
        return " ".join(fmt_float(v, digits) for v in x)
    x = float(x)
    if x == 0.0:
        return "0"
    return f"{x:.{digits}g}"


def render_rows(rows: list[dict], fmt: str = "text", digits: int = 9) -> str:
    """
    Render a list of flat dicts as csv, json or an aligned text table.
    Column order follows the first row.
    """
    if not rows:
        return ""
    columns = list(rows[0].keys())

    if fmt == "json":
        return json.dumps(
            [{k: _jsonable(r.get(k), digits) for k in columns} for r in rows],
            indent=2,
        )

    cells = [[fmt_float(r.get(k), digits) for k in columns] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(cells)
        return buf.getvalue().rstrip("\n")

    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)


def _jsonable(x, digits):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return float(fmt_float(x, digits))
    if isinstance(x, (list, tuple)):
        return [_jsonable(v, digits) for v in x]
    return x


# ------------------------------------------------------------------------------------ #
#                                         Misc                                         #
# ------------------------------------------------------------------------------------ #


@contextmanager
def timed(what: str):
    """Log how long the wrapped block took."""
    start = time.monotonic()
    try:
        yield
    finally:
        elapsed = time.monotonic() - start
        log.debug(f"{what} took {humanize.precisedelta(elapsed, minimum_unit='milliseconds')}")
