import numpy as np
from dataclasses import dataclass, field
from ..Core.Errors import ContractError, ShapeError

@dataclass(slots = True)
class MetricsReport:
    pa: float
    miou: float
    dice: float
    per_class_iou: dict[int, float] = field(default_factory = dict)

def confusion_counts(pred: np.ndarray, truth: np.ndarray, num_classes: int) -> np.ndarray:
    """
    (num_classes, num_classes) matrix, rows indexed by truth and columns by prediction.
    """
    flat: np.ndarray = truth.astype(np.int64).reshape(-1) * num_classes + pred.astype(np.int64).reshape(-1)
    return np.bincount(flat, minlength = num_classes * num_classes).reshape(num_classes, num_classes)

def evaluate(pred: np.ndarray, truth: np.ndarray, num_classes: int = 2, foreground: int = 1) -> MetricsReport:
    """
    Summary:
        Pixel accuracy, mean IoU over the classes present in either mask, and the Dice score
        of the foreground class (1.0 when neither mask has foreground).
    """
    if pred.shape != truth.shape:
        raise ShapeError(f"prediction {pred.shape} and ground truth {truth.shape} differ in size")
    if pred.size == 0:
        raise ShapeError("cannot evaluate empty masks")
    for name, mask in (("prediction", pred), ("ground truth", truth)):
        if mask.min() < 0 or mask.max() >= num_classes:
            raise ContractError(f"{name} labels must lie in [0, {num_classes})")

    confusion: np.ndarray = confusion_counts(pred, truth, num_classes)
    true_positive: np.ndarray = np.diag(confusion)
    false_positive: np.ndarray = confusion.sum(axis = 0) - true_positive
    false_negative: np.ndarray = confusion.sum(axis = 1) - true_positive

    per_class_iou: dict[int, float] = {}
    for label in range(num_classes):
        union: int = int(true_positive[label] + false_positive[label] + false_negative[label])
        if union > 0:
            per_class_iou[label] = float(true_positive[label]) / union

    dice_denominator: int = int(2 * true_positive[foreground] + false_positive[foreground] + false_negative[foreground])
    dice: float = 1.0 if dice_denominator == 0 else 2.0 * float(true_positive[foreground]) / dice_denominator

    return MetricsReport(
        pa = float(true_positive.sum()) / pred.size,
        miou = float(np.mean(list(per_class_iou.values()))),
        dice = dice,
        per_class_iou = per_class_iou,
    )

def mean_report(reports: list[MetricsReport]) -> MetricsReport:
    """
    Mean PA and Dice over the reports. Per-class IoU averages over the reports where the class
    occurs, and MIoU is the mean of those per-class values.
    """
    if not reports:
        raise ContractError("mean_report needs at least one report")
    labels: set[int] = set()
    for report in reports:
        labels.update(report.per_class_iou)
    per_class: dict[int, float] = {}
    for label in sorted(labels):
        values: list[float] = [report.per_class_iou[label] for report in reports if label in report.per_class_iou]
        per_class[label] = float(np.mean(values))
    return MetricsReport(
        pa = float(np.mean([report.pa for report in reports])),
        miou = float(np.mean(list(per_class.values()))) if per_class else float(np.mean([report.miou for report in reports])),
        dice = float(np.mean([report.dice for report in reports])),
        per_class_iou = per_class,
    )
