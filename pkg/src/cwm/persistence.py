"""Single-file container for models and conceptor banks.

Layout::

    b"CWM1" | u32 LE metadata length | UTF-8 JSON metadata | payload

The payload is the concatenation of every array, row-major, as little-endian
float64. The metadata ``arrays`` directory gives each array's name, shape,
byte offset (relative to the payload start) and byte length.
"""
from __future__ import annotations

import json
import os
import struct
from typing import Dict, Tuple

import numpy as np

from .conceptors import Conceptor
from .controller import ConceptorBank
from .esn import EsnModel, EsnParams

MAGIC = b"CWM1"
FORMAT_VERSION = 1
_DTYPE = np.dtype("<f8")


class ContainerError(Exception):
    """Base class for container read errors; ``code`` is a stable identifier."""

    code = "container"


class BadMagicError(ContainerError):
    code = "bad_magic"


class VersionError(ContainerError):
    code = "version"


class TruncatedError(ContainerError):
    code = "truncated"


class MetadataError(ContainerError):
    code = "metadata"


def encode(arrays: Dict[str, np.ndarray], meta: dict) -> bytes:
    directory = []
    chunks = []
    offset = 0
    for name, arr in arrays.items():
        data = np.ascontiguousarray(arr, dtype=_DTYPE).tobytes(order="C")
        directory.append({"name": name, "shape": list(np.shape(arr)),
                          "offset": offset, "nbytes": len(data)})
        chunks.append(data)
        offset += len(data)
    meta = dict(meta, format_version=FORMAT_VERSION, dtype="f64", arrays=directory)
    header = json.dumps(meta, sort_keys=True).encode("utf-8")
    return MAGIC + struct.pack("<I", len(header)) + header + b"".join(chunks)


def decode(blob: bytes) -> Tuple[Dict[str, np.ndarray], dict]:
    if len(blob) < 4 or blob[:4] != MAGIC:
        raise BadMagicError(f"not a CWM1 container (magic {blob[:4]!r})")
    if len(blob) < 8:
        raise TruncatedError("file ends inside the header")
    (meta_len,) = struct.unpack("<I", blob[4:8])
    if len(blob) < 8 + meta_len:
        raise TruncatedError("file ends inside the metadata block")
    try:
        meta = json.loads(blob[8:8 + meta_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MetadataError(f"unreadable metadata: {exc}") from exc
    if meta.get("format_version") != FORMAT_VERSION:
        raise VersionError(f"unsupported format version {meta.get('format_version')!r}")
    if meta.get("dtype") != "f64":
        raise MetadataError(f"unsupported dtype {meta.get('dtype')!r}")

    payload = memoryview(blob)[8 + meta_len:]
    arrays = {}
    for entry in meta.get("arrays", []):
        start, nbytes = entry["offset"], entry["nbytes"]
        shape = tuple(entry["shape"])
        if nbytes != int(np.prod(shape, dtype=np.int64)) * _DTYPE.itemsize:
            raise MetadataError(f"array {entry['name']!r}: size does not match shape {shape}")
        if start + nbytes > len(payload):
            raise TruncatedError(f"array {entry['name']!r} extends past end of file")
        arrays[entry["name"]] = np.frombuffer(payload[start:start + nbytes], dtype=_DTYPE).reshape(shape).copy()
    declared = sum(e["nbytes"] for e in meta.get("arrays", []))
    if declared != len(payload):
        raise MetadataError(f"payload is {len(payload)} bytes, directory declares {declared}")
    return arrays, meta


def _write(path, blob: bytes):
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(blob)
    os.replace(tmp, path)


def _read(path) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def model_to_bytes(model: EsnModel) -> bytes:
    arrays = {"W": model.W, "W_in": model.W_in, "W_fb": model.W_fb, "x": model.x, "y": model.y}
    if model.W_out is not None:
        arrays["W_out"] = model.W_out
    meta = {
        "kind": "model",
        "params": model.params.to_dict(),
        "seed": int(model.params.seed),
        "rng_state": model.rng_state,
        "dims": {"n_neurons": model.n_neurons, "input_dim": model.params.input_dim,
                 "output_dim": model.params.output_dim},
    }
    return encode(arrays, meta)


def model_from_bytes(blob: bytes) -> EsnModel:
    arrays, meta = decode(blob)
    if meta.get("kind") != "model":
        raise MetadataError(f"container holds a {meta.get('kind')!r}, not a model")
    try:
        params = EsnParams(**meta["params"])
        model = EsnModel(W=arrays["W"], W_in=arrays["W_in"], W_fb=arrays["W_fb"], params=params,
                         W_out=arrays.get("W_out"), x=arrays["x"], y=arrays["y"])
    except KeyError as exc:
        raise MetadataError(f"missing field {exc}") from exc
    model.rng_state = meta["rng_state"]
    return model


def bank_to_bytes(bank: ConceptorBank) -> bytes:
    arrays = {}
    entries = []
    for i, (m, C) in enumerate(bank):
        arrays[f"C{i}"] = C.matrix
        entries.append({"tag": float(m), "aperture": float(C.aperture), "source_len": int(C.source_len)})
    n = bank.entries[0][1].n if len(bank) else 0
    meta = {
        "kind": "bank",
        "tags": [float(m) for m in bank.values],
        "entries": entries,
        "n_levels": int(bank.n_levels),
        "aperture": float(bank.aperture),
        "dims": {"n_neurons": n},
    }
    return encode(arrays, meta)


def bank_from_bytes(blob: bytes) -> ConceptorBank:
    arrays, meta = decode(blob)
    if meta.get("kind") != "bank":
        raise MetadataError(f"container holds a {meta.get('kind')!r}, not a bank")
    entries = []
    for i, e in enumerate(meta["entries"]):
        C = Conceptor(arrays[f"C{i}"], e["aperture"], e["tag"], e["source_len"])
        entries.append((e["tag"], C))
    return ConceptorBank(entries, n_levels=meta["n_levels"], aperture=meta["aperture"])


def save_model(model: EsnModel, path):
    _write(path, model_to_bytes(model))


def load_model(path) -> EsnModel:
    return model_from_bytes(_read(path))


def save_bank(bank: ConceptorBank, path):
    _write(path, bank_to_bytes(bank))


def load_bank(path) -> ConceptorBank:
    return bank_from_bytes(_read(path))


def read_metadata(path) -> dict:
    _, meta = decode(_read(path))
    return meta
