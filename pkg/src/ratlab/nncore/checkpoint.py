"""Binary checkpoint container: version tag, names, shapes, freeze mask, data.

Layout: 8-byte magic, 8-byte little-endian header length, UTF-8 JSON
header, then the raw float64 little-endian parameter buffers in header
order. Writes are deterministic byte-for-byte, and load(save(x)) is
bit-exact.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import DataError
from .tensor import ParamStore

MAGIC = b"RLCKPT01"


def save(params: ParamStore, path: str | Path, meta: dict | None = None) -> None:
    """Write the store (and optional JSON-able metadata) to path."""
    entries = []
    buffers = []
    for name in params.names():
        t = params[name]
        entries.append({
            "name": name,
            "shape": list(t.data.shape),
            "frozen": params.is_frozen(name),
        })
        buffers.append(np.ascontiguousarray(t.data, dtype="<f8").tobytes())
    header = json.dumps(
        {"format_version": 1, "params": entries, "meta": meta or {}},
        sort_keys=True, ensure_ascii=False,
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        for buf in buffers:
            fh.write(buf)


def load(path: str | Path) -> tuple[ParamStore, dict]:
    """Read a checkpoint; returns (ParamStore, meta)."""
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise DataError(f"{path}: not a checkpoint file (bad magic)")
        (hlen,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        if header.get("format_version") != 1:
            raise DataError(f"{path}: unsupported checkpoint version")
        store = ParamStore()
        for entry in header["params"]:
            shape = tuple(entry["shape"])
            n = int(np.prod(shape)) if shape else 1
            raw = fh.read(8 * n)
            if len(raw) != 8 * n:
                raise DataError(f"{path}: truncated data for {entry['name']!r}")
            arr = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
            store.add(entry["name"], arr, frozen=bool(entry["frozen"]))
    return store, header.get("meta", {})
