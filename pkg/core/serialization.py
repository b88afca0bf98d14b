"""Versioned binary model file.

Layout (all integers little-endian):

    magic            8 bytes  b"HYBRIDFM"
    format version   uint32
    header length    uint64
    header           UTF-8 JSON: d, dtype, table sizes, epoch counter,
                     feature-name dictionaries and entity feature lists
    tables           per table: uint16 name length, name, uint64 byte
                     length, row-major little-endian reals
"""

import json
import os
import struct
import tempfile
from pathlib import Path
from typing import Tuple, Union, BinaryIO

import numpy as np

from data.models import FeatureMapping
from utils.exceptions import ModelFormatError, ModelVersionError, ValidationError
from utils.logging_config import get_logger
from .state import ModelState

MAGIC = b"HYBRIDFM"
FORMAT_VERSION = 1
SUPPORTED_DTYPES = ('<f4', '<f8')
TABLE_ORDER = (
    'user_embeddings',
    'item_embeddings',
    'user_biases',
    'item_biases',
    'user_embedding_accumulators',
    'item_embedding_accumulators',
    'user_bias_accumulators',
    'item_bias_accumulators',
)

logger = get_logger('serialization')


def _table_shape(name: str, sizes: dict) -> tuple:
    rows = sizes['n_user_features'] if name.startswith('user') else sizes['n_item_features']
    return (rows, sizes['d']) if 'embedding' in name else (rows,)


def _header_int(header: dict, key: str, minimum: int) -> int:
    value = header[key]
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ValueError(f"{key} must be an integer >= {minimum}, got {value!r}")
    return value


def _encode(model: ModelState, mapping: FeatureMapping) -> bytes:
    if model.n_features('user') != mapping.n_features('user') or model.n_features('item') != mapping.n_features('item'):
        raise ValidationError("Model tables and feature mapping disagree on feature counts")
    dtype = np.dtype(model.dtype).newbyteorder('<').str
    if dtype not in SUPPORTED_DTYPES:
        raise ValidationError(f"Unsupported parameter dtype {model.dtype}")

    header = {
        'd': model.d,
        'dtype': dtype,
        'n_user_features': model.n_features('user'),
        'n_item_features': model.n_features('item'),
        'epoch_counter': model.epoch_counter,
        'mapping': mapping.to_dict(),
        'tables': list(TABLE_ORDER),
    }
    header_bytes = json.dumps(header, ensure_ascii=False).encode('utf-8')

    chunks = [MAGIC, struct.pack('<I', FORMAT_VERSION), struct.pack('<Q', len(header_bytes)), header_bytes]
    tables = model.tables()
    for name in TABLE_ORDER:
        payload = np.ascontiguousarray(tables[name], dtype=dtype).tobytes(order='C')
        encoded_name = name.encode('ascii')
        chunks += [struct.pack('<H', len(encoded_name)), encoded_name, struct.pack('<Q', len(payload)), payload]
    return b''.join(chunks)


def save_model(model: ModelState, mapping: FeatureMapping, destination: Union[str, Path]) -> None:
    destination = Path(destination)
    payload = _encode(model, mapping)
    # sibling temp file, then an atomic replace
    fd, tmp_name = tempfile.mkstemp(dir=destination.parent or Path('.'), prefix=f".{destination.name}.", suffix='.tmp')
    try:
        with os.fdopen(fd, 'wb') as handle:
            handle.write(payload)
        os.replace(tmp_name, destination)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    logger.info("Model saved", extra={'path': str(destination), 'bytes': len(payload)})


class _Reader:
    def __init__(self, handle: BinaryIO, path: str):
        self.handle = handle
        self.path = path

    def read(self, size: int, section: str) -> bytes:
        data = self.handle.read(size)
        if len(data) != size:
            raise ModelFormatError(f"Unexpected end of file: wanted {size} bytes, got {len(data)}", section, self.path)
        return data

    def unpack(self, fmt: str, section: str):
        return struct.unpack(fmt, self.read(struct.calcsize(fmt), section))[0]


def load_model(source: Union[str, Path]) -> Tuple[ModelState, FeatureMapping]:
    path = str(source)
    with open(source, 'rb') as handle:
        reader = _Reader(handle, path)

        if reader.read(len(MAGIC), 'magic') != MAGIC:
            raise ModelFormatError("Not a model file", 'magic', path)
        version = reader.unpack('<I', 'version')
        if version != FORMAT_VERSION:
            raise ModelVersionError(version, FORMAT_VERSION)

        header_length = reader.unpack('<Q', 'header')
        try:
            header = json.loads(reader.read(header_length, 'header').decode('utf-8'))
            sizes = {
                'd': _header_int(header, 'd', 1),
                'n_user_features': _header_int(header, 'n_user_features', 0),
                'n_item_features': _header_int(header, 'n_item_features', 0),
            }
            epoch_counter = _header_int(header, 'epoch_counter', 0)
            dtype = header['dtype']
        except (ValueError, KeyError, TypeError, UnicodeDecodeError) as e:
            raise ModelFormatError(f"Unreadable header: {e}", 'header', path) from e
        if dtype not in SUPPORTED_DTYPES:
            raise ModelFormatError(f"Unsupported dtype {dtype!r}", 'header', path)

        tables = {}
        for expected in TABLE_ORDER:
            name = reader.read(reader.unpack('<H', expected), expected).decode('ascii', errors='replace')
            if name != expected:
                raise ModelFormatError(f"Expected table {expected!r}, found {name!r}", expected, path)
            shape = _table_shape(name, sizes)
            byte_length = reader.unpack('<Q', name)
            if byte_length != int(np.prod(shape)) * np.dtype(dtype).itemsize:
                raise ModelFormatError(f"Table size {byte_length} does not match shape {shape}", name, path)
            values = np.frombuffer(reader.read(byte_length, name), dtype=dtype).reshape(shape)
            tables[name] = values.astype(np.dtype(dtype).newbyteorder('='), copy=True)

        if handle.read(1):
            raise ModelFormatError("Trailing bytes after the last table", 'trailer', path)

    try:
        mapping = FeatureMapping.from_dict(header['mapping'])
    except (KeyError, TypeError, ValidationError) as e:
        raise ModelFormatError(f"Invalid feature mapping: {e}", 'mapping', path) from e

    model = ModelState(d=sizes['d'], epoch_counter=epoch_counter, **tables)
    if mapping.n_features('user') != model.n_features('user') or mapping.n_features('item') != model.n_features('item'):
        raise ModelFormatError("Feature dictionary does not match table sizes", 'mapping', path)
    return model, mapping


def dump_feature_mapping(mapping: FeatureMapping, side: str, destination) -> None:
    """One `index<TAB>name` line per feature, to a path or an open text handle."""
    if hasattr(destination, "write"):
        for line in mapping.dump(side):
            destination.write(line + "\n")
        return
    with open(destination, "w", encoding="utf-8", newline="\n") as handle:
        dump_feature_mapping(mapping, side, handle)
