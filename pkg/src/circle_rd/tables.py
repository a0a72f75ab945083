"""Readers and writers for rate-distortion tables and JSON reports.

``dat`` is a whitespace table with header ``n vq uq`` and 7 significant
digits, readable by pgfplots as is. ``csv`` adds SNR columns and keeps
full precision, with the run configuration in leading ``#`` lines.
``json`` holds the configuration and one object per rate. Every format
re-emits byte-identically after a read.
"""

import csv
import io
import json
import math

from .analytics import RdPoint, snr_db

FORMATS = ("dat", "csv", "json")
CSV_COLUMNS = ("n", "vq", "uq", "snr_vq", "snr_uq")


def _g7(x):
    return format(x, ".7g")


def dumps_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def format_rd_table(points, fmt="dat", config=None):
    if fmt == "dat":
        lines = ["n vq uq"]
        lines += [f"{p.n_codewords} {_g7(p.d_vq)} {_g7(p.d_uq)}" for p in points]
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        for key, value in sorted((config or {}).items()):
            buf.write(f"# {key}={json.dumps(value)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for p in points:
            w.writerow([p.n_codewords, repr(p.d_vq), repr(p.d_uq), repr(p.snr_vq_db), repr(p.snr_uq_db)])
        return buf.getvalue()
    if fmt == "json":
        return dumps_json({"config": config or {}, "points": [p.as_dict() for p in points]})
    raise ValueError(f"unknown format {fmt!r}")


def _point(n, vq, uq, snr_vq=None, snr_uq=None):
    n = int(n)
    return RdPoint(
        int(round(math.log2(n))), n, vq, uq,
        float(snr_db(vq)) if snr_vq is None else snr_vq,
        float(snr_db(uq)) if snr_uq is None else snr_uq,
    )


def parse_rd_table(text, fmt="dat"):
    """Inverse of ``format_rd_table``; returns ``(points, config)``."""
    if fmt == "dat":
        rows = [line.split() for line in text.splitlines() if line.strip()]
        if not rows or rows[0] != ["n", "vq", "uq"]:
            raise ValueError("missing 'n vq uq' header")
        return [_point(r[0], float(r[1]), float(r[2])) for r in rows[1:]], {}
    if fmt == "csv":
        config, body = {}, []
        for line in text.splitlines():
            if line.startswith("# "):
                key, _, value = line[2:].partition("=")
                config[key] = json.loads(value)
            else:
                body.append(line)
        reader = csv.DictReader(body)
        pts = [
            _point(r["n"], float(r["vq"]), float(r["uq"]), float(r["snr_vq"]), float(r["snr_uq"]))
            for r in reader
        ]
        return pts, config
    if fmt == "json":
        obj = json.loads(text)
        return [RdPoint(**d) for d in obj["points"]], obj["config"]
    raise ValueError(f"unknown format {fmt!r}")
