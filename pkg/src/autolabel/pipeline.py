"""
Dataset labeller: scene JSONL -> QA JSONL (six records per scene).
"""
from pathlib import Path
from typing import Dict, List, Union

from src.autolabel.qa import label_scene
from src.autolabel.rules import DEFAULT_THRESHOLDS, LabelThresholds
from src.core.logging_config import app_logger
from src.domain.codec import read_scenes, write_records
from src.domain.types import QARecord
from src.domain.vocabulary import QA_ORDER


def label_dataset(
    scenes_path: Union[str, Path],
    out_path: Union[str, Path],
    th: LabelThresholds = DEFAULT_THRESHOLDS,
) -> Dict:
    """
    Label every scene of a JSONL file.

    Args:
        scenes_path: Scene JSONL written by the generator
        out_path: Destination QA JSONL
        th: Labelling thresholds

    Returns:
        Summary with per-type record counts
    """
    app_logger.info(f"Labelling scenes from {scenes_path}")
    scenes = read_scenes(scenes_path)

    records: List[QARecord] = []
    for scene in scenes:
        records.extend(label_scene(scene, th))

    write_records(out_path, records)

    counts = {t.value: 0 for t in QA_ORDER}
    for record in records:
        counts[record.qa_type.value] += 1

    app_logger.info(f"✅ Wrote {len(records)} QA records for {len(scenes)} scenes to {out_path}")
    return {"scenes": len(scenes), "records": len(records), "records_per_type": counts}
