"""
Loss curves as CSV (epoch, stage, loss) for plotting.
"""
import csv
from pathlib import Path
from typing import Dict, Iterable, Union

from src.core.exceptions import DatasetIOError
from src.core.logging_config import app_logger

LOSS_COLUMNS = ("epoch", "stage", "loss")


def write_loss_csv(path: Union[str, Path], records: Iterable[Dict], append: bool = False) -> int:
    """Write loss records; the header is written unless appending to an existing file."""
    path = Path(path)
    rows = list(records)
    write_header = not (append and path.exists() and path.stat().st_size > 0)
    try:
        with path.open("a" if append else "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            if write_header:
                writer.writerow(LOSS_COLUMNS)
            for row in rows:
                writer.writerow([row["epoch"], row["stage"], f"{row['loss']:.6f}"])
    except OSError as e:
        raise DatasetIOError(f"cannot write loss log {path}: {e}") from e
    app_logger.info(f"Wrote {len(rows)} loss rows to {path}")
    return len(rows)
