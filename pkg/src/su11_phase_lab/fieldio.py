"""Field and report serialization.

CSV schema v1:
    # su11-phase-lab field v1
    # nx=<int> np=<int> extent=<repr float>
    # max_abs_imag_discarded=<repr float>
    x,p,value
    <repr x>,<repr p>,<repr value>      (p-major row order, masked cells omitted)

Floats are written with repr (shortest round-trip, 17 significant digits
when needed), so a parsed field reproduces the in-memory array bit for
bit.  PGM is 16-bit binary grayscale with metadata in comment lines for
eyeballing; JSON mirrors the CSV content structurally.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import DomainError
from .grids import PhaseSpaceGrid, ScalarField

CSV_HEADER = "# su11-phase-lab field v1"
FIELD_FORMAT = "su11-phase-lab.field"
FIELD_VERSION = 1


def format_float(x: float) -> str:
    return repr(float(x))


def write_field_csv(field: ScalarField, path) -> None:
    grid = field.grid
    lines = [
        CSV_HEADER,
        f"# nx={grid.nx} np={grid.np} extent={format_float(grid.extent)}",
        f"# max_abs_imag_discarded={format_float(field.max_abs_imag_discarded)}",
        "x,p,value",
    ]
    mask = grid.mask
    xs, ps = grid.x, grid.p
    vals = field.values
    for ip in range(grid.np):
        row = vals[ip]
        keep = np.where(mask[ip])[0]
        p_str = format_float(ps[ip])
        for ix in keep:
            lines.append(f"{format_float(xs[ix])},{p_str},{format_float(row[ix])}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_field_csv(path) -> ScalarField:
    text = Path(path).read_text().splitlines()
    if not text or text[0].strip() != CSV_HEADER:
        raise DomainError(f"{path}: missing field header {CSV_HEADER!r}")
    meta = {}
    body_start = None
    for i, line in enumerate(text[1:], start=1):
        if line.startswith("#"):
            for tok in line[1:].strip().split():
                if "=" in tok:
                    key, val = tok.split("=", 1)
                    meta[key] = val
        elif line.strip() == "x,p,value":
            body_start = i + 1
            break
        else:
            raise DomainError(f"{path}: unexpected line before column header: {line!r}")
    if body_start is None:
        raise DomainError(f"{path}: no 'x,p,value' column header")
    try:
        grid = PhaseSpaceGrid(
            nx=int(meta["nx"]), np=int(meta["np"]), extent=float(meta["extent"])
        )
    except KeyError as missing:
        raise DomainError(f"{path}: missing grid metadata {missing}") from None
    values = np.full(grid.shape, np.nan)
    xs, ps = grid.x, grid.p
    for line in text[body_start:]:
        if not line.strip():
            continue
        sx, sp, sv = line.split(",")
        ix = int(np.searchsorted(xs, float(sx)))
        ip = int(np.searchsorted(ps, float(sp)))
        if ix >= grid.nx or xs[ix] != float(sx) or ip >= grid.np or ps[ip] != float(sp):
            raise DomainError(f"{path}: row ({sx},{sp}) is not on the declared grid")
        values[ip, ix] = float(sv)
    return ScalarField(
        grid=grid,
        values=values,
        max_abs_imag_discarded=float(meta.get("max_abs_imag_discarded", 0.0)),
    )


def write_field_pgm(field: ScalarField, path) -> None:
    """16-bit binary PGM; [min, max] maps linearly onto [0, 65535] and
    masked-out cells render as 0."""
    grid = field.grid
    vals = field.values
    mask = grid.mask
    finite = vals[mask]
    lo = float(np.min(finite)) if finite.size else 0.0
    hi = float(np.max(finite)) if finite.size else 0.0
    span = hi - lo
    pix = np.zeros(grid.shape, dtype=np.uint16)
    if span > 0:
        scaled = (vals - lo) / span * 65535.0
        pix[mask] = np.round(scaled[mask]).astype(np.uint16)
    comments = (
        f"# su11-phase-lab pgm v1\n"
        f"# nx={grid.nx} np={grid.np} extent={format_float(grid.extent)}\n"
        f"# min={format_float(lo)} max={format_float(hi)}\n"
    )
    with open(path, "wb") as fh:
        fh.write(b"P5\n")
        fh.write(comments.encode())
        fh.write(f"{grid.nx} {grid.np}\n65535\n".encode())
        fh.write(pix.astype(">u2").tobytes())


def field_to_json_dict(field: ScalarField) -> dict:
    grid = field.grid
    rows = []
    for ip in range(grid.np):
        row = [
            (None if not grid.mask[ip, ix] else field.values[ip, ix])
            for ix in range(grid.nx)
        ]
        rows.append(row)
    return {
        "format": FIELD_FORMAT,
        "version": FIELD_VERSION,
        "nx": grid.nx,
        "np": grid.np,
        "extent": grid.extent,
        "max_abs_imag_discarded": field.max_abs_imag_discarded,
        "values": rows,
    }


def field_from_json_dict(doc: dict) -> ScalarField:
    if doc.get("format") != FIELD_FORMAT:
        raise DomainError(f"not a {FIELD_FORMAT} document")
    grid = PhaseSpaceGrid(nx=int(doc["nx"]), np=int(doc["np"]), extent=float(doc["extent"]))
    values = np.full(grid.shape, np.nan)
    for ip, row in enumerate(doc["values"]):
        for ix, v in enumerate(row):
            if v is not None:
                values[ip, ix] = v
    return ScalarField(
        grid=grid,
        values=values,
        max_abs_imag_discarded=float(doc.get("max_abs_imag_discarded", 0.0)),
    )


def write_field_json(field: ScalarField, path) -> None:
    write_json(field_to_json_dict(field), path)


def read_field_json(path) -> ScalarField:
    return field_from_json_dict(json.loads(Path(path).read_text()))


def write_json(obj, path) -> None:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def params_digest(params: dict) -> str:
    canon = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def manifest_dict(command: str, params: dict, version: str, timings: dict) -> dict:
    return {
        "tool": "su11-phase-lab",
        "version": version,
        "command": command,
        "params": params,
        "params_digest": params_digest(params),
        "timings": timings,
    }
