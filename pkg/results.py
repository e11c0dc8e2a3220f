"""CSV and JSON result files.

Both formats carry a single header line

    # airy-barrier-spectral v0.1 | params: kappa=1.0, n_max=5 | UTC: ... | mem: ...

followed by the data. Floats are written with 17 significant digits so a
file parsed and emitted again is identical.
"""

import dataclasses
import json
import os
from datetime import datetime, timezone

import numpy as np
import psutil

from errors import ConfigError

PROGRAM = "airy-barrier-spectral"
VERSION = "0.1"
FLOAT_FORMAT = "%.16e"


def create_dir(dir_name):
    try:
        os.mkdir(dir_name)
    except FileExistsError:
        pass


def memory_mb():
    return psutil.Process().memory_info().rss / 2**20


def header_line(params, summary=None, elapsed=None):
    params = ", ".join(f"{key}={_format(value)}" for key, value in sorted(params.items()))
    fields = [f"# {PROGRAM} v{VERSION}", f"params: {params}"]
    if summary:
        fields.append(
            "summary: " + ", ".join(f"{key}={_format(val)}" for key, val in summary.items())
        )
    fields.append(f"UTC: {datetime.now(timezone.utc).isoformat()}")
    if elapsed is not None:
        fields.append(f"elapsed: {elapsed:.3f}s")
    fields.append(f"mem: {memory_mb():.1f}MB")
    return " | ".join(fields)


def parse_header(line):
    """Fields of a header line as a dict of strings ("params" and "summary" as dicts)"""
    if not line.startswith(f"# {PROGRAM} v"):
        raise ConfigError(f"not a {PROGRAM} header: {line!r}")
    parts = line.split(" | ")
    fields = {"version": parts[0].rsplit("v", 1)[1]}
    for part in parts[1:]:
        key, _, value = part.partition(": ")
        if key in ("params", "summary"):
            pairs = [item.split("=", 1) for item in value.split(", ") if item]
            fields[key] = {k: _parse_value(v) for k, v in pairs}
        else:
            fields[key] = value
    return fields


def _format(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    if isinstance(value, (list, tuple)):
        return " ".join(_format(item) for item in value)
    return str(value)


def _parse_value(text):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def emit_csv(header, columns, rows):
    lines = [header, ",".join(columns)]
    lines += [",".join(_format(value) for value in row) for row in rows]
    return "\n".join(lines) + "\n"


def parse_csv(text):
    """(header line, columns, rows) of a CSV produced by emit_csv"""
    lines = text.rstrip("\n").split("\n")
    columns = lines[1].split(",")
    rows = [[_parse_value(value) for value in line.split(",")] for line in lines[2:]]
    return lines[0], columns, rows


def emit_json(header, columns, rows):
    data = [dict(zip(columns, (_json_value(value) for value in row))) for row in rows]
    return json.dumps({"header": header, "data": data}, indent=4) + "\n"


def parse_json(text):
    content = json.loads(text)
    data = content["data"]
    columns = list(data[0]) if data else []
    rows = [[item[col] for col in columns] for item in data]
    return content["header"], columns, rows


def _json_value(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


EMITTERS = {"csv": emit_csv, "json": emit_json}
PARSERS = {"csv": parse_csv, "json": parse_json}


def write_results(path, fmt, columns, rows, params, summary=None, elapsed=None):
    if fmt not in EMITTERS:
        raise ConfigError(f"unknown output format '{fmt}'")
    text = EMITTERS[fmt](header_line(params, summary, elapsed), columns, rows)
    dir_name = os.path.dirname(path)
    if dir_name:
        create_dir(dir_name)
    with open(path, "w") as dst:
        dst.write(text)
    return text


def read_results(path):
    fmt = "json" if path.endswith(".json") else "csv"
    with open(path) as src:
        return PARSERS[fmt](src.read())


@dataclasses.dataclass
class GridResult:
    """Values on a (re, im) grid, stored as rows (re, im, value)"""

    re_values: np.ndarray
    im_values: np.ndarray
    values: np.ndarray

    columns = ("re", "im", "value")

    def to_rows(self):
        return [
            (float(re), float(im), float(self.values[j, i]))
            for j, im in enumerate(self.im_values)
            for i, re in enumerate(self.re_values)
        ]

    @classmethod
    def from_rows(cls, rows):
        rows = np.asarray(rows, dtype=float)
        re_values = np.unique(rows[:, 0])
        im_values = np.unique(rows[:, 1])
        values = rows[:, 2].reshape(im_values.size, re_values.size)
        return cls(re_values, im_values, values)
