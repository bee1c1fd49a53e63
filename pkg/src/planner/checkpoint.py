"""
Checkpoint persistence: one JSON document of named fp64 arrays.
"""
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Union

import numpy as np

from src.core.exceptions import ConfigError, DatasetIOError, RecordParseError, SchemaError, SerializationError
from src.core.logging_config import app_logger

FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    params: Dict[str, np.ndarray]
    meta: Dict[str, Any] = field(default_factory=dict)

    def select(self, prefixes: Iterable[str]) -> Dict[str, np.ndarray]:
        prefixes = tuple(prefixes)
        return {k: v for k, v in self.params.items() if k.startswith(prefixes)}

    def merged(self, other: "Checkpoint") -> "Checkpoint":
        """Union of both parameter sets; ``other`` wins on name clashes."""
        return Checkpoint(params={**self.params, **other.params}, meta={**self.meta, **other.meta})

    def require(self, prefix: str) -> None:
        if not any(k.startswith(prefix) for k in self.params):
            raise ConfigError(f"checkpoint has no parameters under '{prefix}'")


def checkpoint_to_json(ckpt: Checkpoint) -> str:
    params = {}
    for name in sorted(ckpt.params):
        array = np.asarray(ckpt.params[name], dtype=np.float64)
        if not np.all(np.isfinite(array)):
            raise SerializationError(f"parameter {name} has non-finite values")
        params[name] = {"shape": list(array.shape), "data": [float(v) for v in array.reshape(-1)]}
    doc = {"format_version": FORMAT_VERSION, "params": params, "meta": ckpt.meta}
    return json.dumps(doc, sort_keys=True)


def checkpoint_from_json(text: str) -> Checkpoint:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise RecordParseError(f"malformed checkpoint: {e.msg}") from e
    if doc.get("format_version") != FORMAT_VERSION:
        raise SchemaError(f"unsupported checkpoint format_version {doc.get('format_version')!r}", field="format_version")
    params = {}
    for name, entry in doc.get("params", {}).items():
        data = np.asarray(entry["data"], dtype=np.float64)
        shape = tuple(entry["shape"])
        if data.size != math.prod(shape):
            raise SchemaError(f"parameter {name}: {data.size} values for shape {shape}", field=name)
        params[name] = data.reshape(shape)
    return Checkpoint(params=params, meta=doc.get("meta", {}))


def save_checkpoint(ckpt: Checkpoint, path: Union[str, Path]) -> None:
    text = checkpoint_to_json(ckpt)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise DatasetIOError(f"cannot write checkpoint {path}: {e}") from e
    app_logger.info(f"✅ Saved checkpoint with {len(ckpt.params)} tensors to {path}")


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DatasetIOError(f"cannot read checkpoint {path}: {e}") from e
    return checkpoint_from_json(text)
