"""AVHT binary tensor files and named-tensor checkpoint directories.

Layout (little-endian): ``b"AVHT"``, u32 version (1), u8 dtype code, u32 ndim,
ndim x u32 extents, then the row-major payload.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import DataError

MAGIC = b"AVHT"
VERSION = 1
DTYPE_CODES = {0: np.dtype("<f4"), 1: np.dtype("<f8"), 2: np.dtype("<i4")}
_CODE_OF = {v: k for k, v in DTYPE_CODES.items()}


def encode_tensor(arr: np.ndarray) -> bytes:
    arr = np.asarray(arr)
    if arr.dtype.kind == "f":
        dt = np.dtype("<f4") if arr.dtype.itemsize == 4 else np.dtype("<f8")
    elif arr.dtype.kind in "iub":
        dt = np.dtype("<i4")
    else:
        raise DataError(f"cannot serialize dtype {arr.dtype}")
    header = MAGIC + struct.pack("<IBI", VERSION, _CODE_OF[dt], arr.ndim)
    header += struct.pack(f"<{arr.ndim}I", *arr.shape)
    return header + np.ascontiguousarray(arr, dtype=dt).tobytes()


def decode_tensor(buf: bytes, source: str = "<bytes>") -> np.ndarray:
    if len(buf) < 13 or buf[:4] != MAGIC:
        raise DataError(f"{source}: not an AVHT tensor file")
    version, code, ndim = struct.unpack_from("<IBI", buf, 4)
    if version != VERSION:
        raise DataError(f"{source}: unsupported AVHT version {version}")
    if code not in DTYPE_CODES:
        raise DataError(f"{source}: unknown dtype code {code}")
    off = 13
    dims = struct.unpack_from(f"<{ndim}I", buf, off)
    off += 4 * ndim
    dt = DTYPE_CODES[code]
    count = int(np.prod(dims, dtype=np.int64))
    if len(buf) - off != count * dt.itemsize:
        raise DataError(f"{source}: payload has {len(buf) - off} bytes, expected {count * dt.itemsize}")
    return np.frombuffer(buf, dtype=dt, count=count, offset=off).reshape(dims).copy()


def save_tensor(path, arr: np.ndarray) -> None:
    Path(path).write_bytes(encode_tensor(arr))


def load_tensor(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise DataError(f"tensor file not found: {path}")
    return decode_tensor(path.read_bytes(), str(path))


def save_checkpoint(directory, tensors: dict[str, np.ndarray], extra: dict | None = None) -> Path:
    """Write one AVHT file per named tensor plus ``manifest.json``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for name in sorted(tensors):
        arr = np.asarray(tensors[name])
        fname = name + ".avht"
        save_tensor(directory / fname, arr)
        entries.append({"name": name, "file": fname, "shape": list(arr.shape)})
    manifest = {"format": "AVHT-checkpoint", "version": VERSION, "tensors": entries}
    if extra:
        manifest["extra"] = extra
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n",
                                             encoding="utf-8")
    return directory


def load_checkpoint(directory) -> tuple[dict[str, np.ndarray], dict]:
    directory = Path(directory)
    mpath = directory / "manifest.json"
    if not mpath.exists():
        raise DataError(f"checkpoint manifest not found: {mpath}")
    manifest = json.loads(mpath.read_text(encoding="utf-8"))
    tensors = {}
    for e in manifest["tensors"]:
        arr = load_tensor(directory / e["file"])
        if list(arr.shape) != e["shape"]:
            raise DataError(f"{e['name']}: manifest shape {e['shape']} != file shape {list(arr.shape)}")
        tensors[e["name"]] = arr
    return tensors, manifest.get("extra", {})
