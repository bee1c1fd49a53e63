"""
JSONL record codec for scenes and QA records.

One JSON object per line, UTF-8, floats written with six decimals.
"""
import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterator, List, Tuple, Union

from pydantic import ValidationError

from src.core.exceptions import DatasetIOError, RecordParseError, SchemaError, SerializationError
from src.domain.types import AgentState, QARecord, Scene, Trajectory
from src.domain.validation import validate_scene

Record = Union[Scene, QARecord]


def _points(points) -> List[List[float]]:
    return [[x, y] for x, y in points]


def _trajectory(traj: Trajectory) -> Any:
    return None if traj is None else _points(traj.waypoints)


def _agent_to_dict(agent: AgentState) -> Dict[str, Any]:
    return {
        "id": agent.id,
        "class": agent.agent_class,
        "x": agent.x,
        "y": agent.y,
        "heading": agent.heading,
        "speed": agent.speed,
        "length": agent.length,
        "width": agent.width,
        "future": _points(agent.future),
    }


def scene_to_dict(scene: Scene) -> Dict[str, Any]:
    return {
        "scene_id": scene.scene_id,
        "ego": {
            "x": scene.ego.x,
            "y": scene.ego.y,
            "heading": scene.ego.heading,
            "speed": scene.ego.speed,
        },
        "agents": [_agent_to_dict(a) for a in scene.agents],
        "traffic_light": scene.traffic_light,
        "nav_command": scene.nav_command,
        "ego_future": _trajectory(scene.ego_future),
    }


def qa_to_dict(record: QARecord) -> Dict[str, Any]:
    return {
        "scene_id": record.scene_id,
        "qa_type": record.qa_type,
        "question": record.question,
        "answer": record.answer,
    }


def _render(obj: Any, path: str) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, Enum):
        return json.dumps(obj.value, ensure_ascii=False)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise SerializationError(f"non-finite number at {path}: {obj}")
        return format(obj, ".6f")
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_render(v, f"{path}[{i}]") for i, v in enumerate(obj)) + "]"
    if isinstance(obj, dict):
        return "{" + ",".join(
            f"{json.dumps(k)}:{_render(v, f'{path}.{k}')}" for k, v in obj.items()
        ) + "}"
    raise SerializationError(f"unsupported value at {path}: {type(obj).__name__}")


def encode_record(value: Record) -> str:
    """Encode a Scene or QARecord as one JSON line (no trailing newline)."""
    if isinstance(value, Scene):
        return _render(scene_to_dict(value), "scene")
    if isinstance(value, QARecord):
        return _render(qa_to_dict(value), "qa")
    raise SerializationError(f"cannot encode {type(value).__name__}")


def _schema_error(err: ValidationError, line_number=None) -> SchemaError:
    first = err.errors()[0]
    field = ".".join(str(p) for p in first["loc"]) or "<root>"
    return SchemaError(f"{field}: {first['msg']}", field=field, line_number=line_number)


def decode_record(line: str, line_number=None) -> Record:
    """Decode one JSON line into a Scene or QARecord."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise RecordParseError(f"malformed JSON: {e.msg}", line_number) from e
    if not isinstance(obj, dict):
        raise SchemaError("record must be a JSON object", line_number=line_number)

    model = QARecord if "qa_type" in obj else Scene
    try:
        value = model.model_validate(obj)
    except ValidationError as e:
        raise _schema_error(e, line_number) from e

    if isinstance(value, Scene):
        violations = validate_scene(value)
        if violations:
            raise SchemaError(violations[0], field="scene", line_number=line_number)
    return value


def write_records(path: Union[str, Path], records) -> int:
    """Write records as JSONL; returns the number of lines."""
    count = 0
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for record in records:
                fh.write(encode_record(record))
                fh.write("\n")
                count += 1
    except OSError as e:
        raise DatasetIOError(f"cannot write {path}: {e}") from e
    return count


def iter_records(path: Union[str, Path]) -> Iterator[Tuple[int, Record]]:
    """Yield (line_number, record) for each non-empty line of a JSONL file."""
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as e:
        raise DatasetIOError(f"cannot read {path}: {e}") from e
    with fh:
        for line_number, line in enumerate(fh, 1):
            if not line.strip():
                continue
            yield line_number, decode_record(line, line_number)


def read_scenes(path: Union[str, Path]) -> List[Scene]:
    scenes = []
    for line_number, record in iter_records(path):
        if not isinstance(record, Scene):
            raise SchemaError("expected a scene record", line_number=line_number)
        scenes.append(record)
    return scenes


def read_qas(path: Union[str, Path]) -> List[QARecord]:
    records = []
    for line_number, record in iter_records(path):
        if not isinstance(record, QARecord):
            raise SchemaError("expected a QA record", line_number=line_number)
        records.append(record)
    return records
