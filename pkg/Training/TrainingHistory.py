import io
import csv
import logging
from pathlib import Path
from typing import NamedTuple
from ..Core.AtomicFile import write_text_atomic

class HistoryRecord(NamedTuple):
    epoch: int
    split: str
    loss: float
    metric: float

class TrainingHistory:
    """
    Per-epoch loss and one quality metric (accuracy for the classifier, Dice for segmentation),
    rendered as CSV with header `epoch,split,loss,<metric_name>`.
    """

    def __init__(self, metric_name: str):
        self.__metric_name: str = metric_name
        self.__records: list[HistoryRecord] = []

    @property
    def metric_name(self) -> str:
        return self.__metric_name

    @property
    def records(self) -> list[HistoryRecord]:
        return list(self.__records)

    def append(self, epoch: int, split: str, loss: float, metric: float) -> None:
        self.__records.append(HistoryRecord(epoch, split, float(loss), float(metric)))

    def last(self, split: str) -> HistoryRecord | None:
        matching: list[HistoryRecord] = [record for record in self.__records if record.split == split]
        return matching[-1] if matching else None

    def to_csv(self) -> str:
        buffer: io.StringIO = io.StringIO()
        writer = csv.writer(buffer, lineterminator = "\n")
        writer.writerow(["epoch", "split", "loss", self.__metric_name])
        for record in self.__records:
            writer.writerow([record.epoch, record.split, f"{record.loss:.6f}", f"{record.metric:.6f}"])
        return buffer.getvalue()

    def save(self, file_path: str | Path, logger: logging.Logger | None = None) -> Exception | None:

        logger = logger if logger is not None else logging.getLogger(__name__)
        try:
            write_text_atomic(file_path, self.to_csv())
        except OSError as e:
            logger.error("Error saving training history to %s: %s", file_path, e)
            return e
        return None
