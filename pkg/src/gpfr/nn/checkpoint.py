"""Binary artifact container.

Layout: magic ``GPFR`` | u16 version (LE) | u32 manifest length (LE) |
manifest JSON (utf-8) | tensor payloads back to back. The manifest carries a
``tensors`` list of ``{"shape": [...], "dtype": "f32"|"i32"}`` describing the
payload in order; parameter tensors are always little-endian float32. The
manifest is serialized with sorted keys so identical contents give identical
bytes.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import MalformedHeaderError, TruncatedFileError
from .layers import LayerStack

MAGIC = b"GPFR"
VERSION = 1

_DTYPES = {"f32": np.dtype("<f4"), "i32": np.dtype("<i4")}


def _dtype_tag(arr: np.ndarray) -> str:
    if np.issubdtype(arr.dtype, np.integer):
        return "i32"
    return "f32"


def write_container(path, manifest: dict, tensors: list[np.ndarray]) -> None:
    manifest = dict(manifest)
    manifest["tensors"] = [{"shape": list(t.shape), "dtype": _dtype_tag(t)} for t in tensors]
    blob = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<H", VERSION))
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for t in tensors:
            fh.write(np.ascontiguousarray(t, dtype=_DTYPES[_dtype_tag(t)]).tobytes())


def read_container(path) -> tuple[dict, list[np.ndarray]]:
    path = Path(path)
    data = path.read_bytes()
    if len(data) < 10:
        raise MalformedHeaderError(f"{path}: too short for a header")
    if data[:4] != MAGIC:
        raise MalformedHeaderError(f"{path}: bad magic {data[:4]!r}")
    version, = struct.unpack("<H", data[4:6])
    if version != VERSION:
        raise MalformedHeaderError(f"{path}: unsupported version {version}")
    mlen, = struct.unpack("<I", data[6:10])
    if len(data) < 10 + mlen:
        raise TruncatedFileError(f"{path}: manifest truncated")
    try:
        manifest = json.loads(data[10:10 + mlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedHeaderError(f"{path}: manifest is not valid JSON: {exc}") from exc
    tensors = []
    offset = 10 + mlen
    for entry in manifest.get("tensors", []):
        dtype = _DTYPES[entry.get("dtype", "f32")]
        shape = tuple(entry["shape"])
        nbytes = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
        if len(data) < offset + nbytes:
            raise TruncatedFileError(f"{path}: tensor payload truncated at offset {offset}")
        tensors.append(np.frombuffer(data, dtype=dtype, count=int(np.prod(shape, dtype=np.int64)),
                                     offset=offset).reshape(shape).copy())
        offset += nbytes
    if offset != len(data):
        raise MalformedHeaderError(f"{path}: {len(data) - offset} trailing bytes after payload")
    return manifest, tensors


def stack_tensors(stack: LayerStack) -> list[np.ndarray]:
    return stack.param_list()


def save_stack(path, stack: LayerStack, kind: str = "model", meta: dict | None = None) -> None:
    manifest = {"kind": kind, "layers": stack.specs(), "meta": meta or {}}
    write_container(path, manifest, stack_tensors(stack))


def load_stack(path, expect_kind: str = "model") -> tuple[LayerStack, dict]:
    manifest, tensors = read_container(path)
    if manifest.get("kind") != expect_kind:
        raise MalformedHeaderError(f"{path}: artifact kind {manifest.get('kind')!r}, expected {expect_kind!r}")
    stack = LayerStack.from_specs(manifest["layers"])
    restore_stack(stack, tensors)
    return stack, manifest.get("meta", {})


def restore_stack(stack: LayerStack, tensors: list[np.ndarray], offset: int = 0) -> int:
    """Copy tensors into stack parameters (fixed order); returns next offset."""
    for layer in stack.layers:
        names = sorted(layer.params())
        values = {}
        for name in names:
            values[name] = tensors[offset]
            offset += 1
        if names:
            layer.set_params(values)
    return offset
