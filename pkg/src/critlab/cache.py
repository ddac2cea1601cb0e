"""On-disk grid cache: binary header + packed float64 values.

File layout: magic, 4-byte little-endian header length, UTF-8 JSON header
(id, t0, t1, delta, clamp_floor, precision, version, count, achieved,
clamped_count), then the raw values array.  Floats round-trip bit-exactly
because the payload is the raw IEEE bytes.
"""

import hashlib
import json
import os
import struct
import warnings

import numpy as np

from .errors import CacheError
from .grid import CriticalLineGrid, log_abs_grid

MAGIC = b"CLGRID1\n"
GRID_VERSION = 1

_ENV_VAR = "CRITLAB_CACHE"


def default_cache_dir():
    return os.environ.get(_ENV_VAR, os.path.join(os.path.expanduser("~"), ".cache", "critlab"))


def _key(id_key, t0, t1, delta, precision, clamp_floor, version):
    parts = (
        id_key,
        f"{t0:.17g}",
        f"{t1:.17g}",
        f"{delta:.17g}",
        "auto" if precision is None else f"{precision:.17g}",
        f"{clamp_floor:.17g}",
        str(version),
    )
    return hashlib.sha256("|".join(parts).encode()).hexdigest()[:32]


def write_grid(grid, path):
    header = {
        "id": grid.id.key(),
        "t0": grid.t0,
        "t1": grid.t1,
        "delta": grid.delta,
        "clamp_floor": grid.clamp_floor,
        "precision": grid.precision_target,
        "version": grid.version,
        "count": grid.n,
        "achieved": grid.achieved,
        "clamped_count": grid.clamped_count,
    }
    blob = json.dumps(header, sort_keys=True).encode()
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(grid.values.tobytes())
    os.replace(tmp, path)


def read_grid(path, lid=None):
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise CacheError(f"{path}: bad magic")
        raw = fh.read(4)
        if len(raw) != 4:
            raise CacheError(f"{path}: truncated header length")
        (hlen,) = struct.unpack("<I", raw)
        blob = fh.read(hlen)
        if len(blob) != hlen:
            raise CacheError(f"{path}: truncated header")
        try:
            header = json.loads(blob.decode())
        except ValueError as exc:
            raise CacheError(f"{path}: unreadable header") from exc
        data = fh.read()
    values = np.frombuffer(data, dtype=np.float64)
    if len(values) != header.get("count", -1):
        raise CacheError(f"{path}: value count mismatch")
    return CriticalLineGrid(
        id=lid if lid is not None else header["id"],
        t0=header["t0"],
        t1=header["t1"],
        delta=header["delta"],
        values=values.copy(),
        clamp_floor=header["clamp_floor"],
        precision_target=header["precision"],
        achieved=header["achieved"],
        clamped_count=header["clamped_count"],
        version=header["version"],
    )


class GridCache:
    """Exact-key grid cache over a directory; corrupt entries are evicted."""

    def __init__(self, directory=None, workers=1):
        self.directory = directory or default_cache_dir()
        self.workers = workers
        self.hits = 0
        self.misses = 0

    def path_for(self, lid, t0, t1, delta, precision, clamp_floor):
        name = _key(lid.key(), t0, t1, delta, precision, clamp_floor, GRID_VERSION)
        return os.path.join(self.directory, name + ".grid")

    def grid(self, lid, t0, t1, delta, precision=None, clamp_floor=-40.0):
        """Cached grid on exact key match, else compute, store, return."""
        os.makedirs(self.directory, exist_ok=True)
        path = self.path_for(lid, t0, t1, delta, precision, clamp_floor)
        if os.path.exists(path):
            try:
                g = read_grid(path, lid=lid)
                self.hits += 1
                return g
            except CacheError as exc:
                warnings.warn(f"evicting corrupt cache entry: {exc}")
                os.remove(path)
        self.misses += 1
        g = log_abs_grid(
            lid, t0, t1, delta, clamp_floor=clamp_floor, precision=precision, workers=self.workers
        )
        write_grid(g, path)
        return g
