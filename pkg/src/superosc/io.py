"""Serialization of sampled fields (CSV and the ``SOSF`` binary container) and JSON records.

Binary layout, all little-endian::

    offset  size  content
    0       4     magic b"SOSF"
    4       2     format version (u16, currently 1)
    6       2     dimension D (u16)
    8       4     value type code (u32, 1 = complex128 as interleaved re/im f64)
    12      4     reserved (u32, zero)
    16      8*D   extents (u64 each)
    ...     8*D   origin (f64 each)
    ...     8*D   spacing (f64 each)
    ...     16*N  values in C order, N = prod(extents)

The extents follow the fixed 16-byte header because an arbitrary number of
64-bit extents cannot fit inside it.
"""

import csv
import io
import json
import struct

import numpy as np

from .exceptions import SuperoscError
from .signal import SampledField

MAGIC = b"SOSF"
VERSION = 1
_COMPLEX128 = 1
_HEADER = struct.Struct("<4sHHII")


def write_binary(fld, path_or_buffer):
    d = fld.dimension
    payload = [
        _HEADER.pack(MAGIC, VERSION, d, _COMPLEX128, 0),
        struct.pack(f"<{d}Q", *fld.extents),
        struct.pack(f"<{d}d", *fld.origin),
        struct.pack(f"<{d}d", *fld.spacing),
        np.ascontiguousarray(fld.values, dtype="<c16").tobytes(),
    ]
    data = b"".join(payload)
    if hasattr(path_or_buffer, "write"):
        path_or_buffer.write(data)
    else:
        with open(path_or_buffer, "wb") as fh:
            fh.write(data)


def read_binary(path_or_buffer):
    if hasattr(path_or_buffer, "read"):
        data = path_or_buffer.read()
    else:
        with open(path_or_buffer, "rb") as fh:
            data = fh.read()
    if len(data) < _HEADER.size:
        raise SuperoscError("truncated SOSF header")
    magic, version, d, code, _ = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SuperoscError(f"bad magic {magic!r}")
    if version != VERSION:
        raise SuperoscError(f"unsupported SOSF version {version}")
    if code != _COMPLEX128:
        raise SuperoscError(f"unsupported value type code {code}")
    off = _HEADER.size
    extents = struct.unpack_from(f"<{d}Q", data, off)
    off += 8 * d
    origin = struct.unpack_from(f"<{d}d", data, off)
    off += 8 * d
    spacing = struct.unpack_from(f"<{d}d", data, off)
    off += 8 * d
    n = int(np.prod(extents))
    if len(data) - off != 16 * n:
        raise SuperoscError(f"expected {16 * n} value bytes, found {len(data) - off}")
    values = np.frombuffer(data, dtype="<c16", count=n, offset=off).reshape(extents)
    return SampledField(origin, spacing, values.astype(complex))


def field_to_csv(fld, comments=()):
    """CSV text with columns ``x0..x{D-1}, re, im``; ``comments`` become ``#`` lines."""
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"x{d}" for d in range(fld.dimension)] + ["re", "im"])
    coords = fld.coordinates()
    vals = fld.values.ravel()
    for row, v in zip(coords, vals):
        writer.writerow([repr(float(c)) for c in row] + [repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()


def field_from_csv(text):
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    header, body = rows[0], rows[1:]
    d = len(header) - 2
    if d < 1 or header[-2:] != ["re", "im"]:
        raise SuperoscError(f"unexpected CSV header {header}")
    arr = np.array(body, dtype=float)
    axes = [np.unique(arr[:, j]) for j in range(d)]
    extents = tuple(a.size for a in axes)
    if int(np.prod(extents)) != arr.shape[0]:
        raise SuperoscError("CSV rows do not form a full lattice")
    order = np.lexsort([arr[:, j] for j in reversed(range(d))])
    arr = arr[order]
    values = (arr[:, d] + 1j * arr[:, d + 1]).reshape(extents)
    spacing = tuple((a[1] - a[0]) if a.size > 1 else 1.0 for a in axes)
    return SampledField(tuple(a[0] for a in axes), spacing, values)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(record):
    """Deterministic UTF-8 JSON: sorted keys, complex numbers as ``{re, im}``."""
    return json.dumps(_jsonable(record), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
