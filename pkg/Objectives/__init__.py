from .LossModeEnum import LossModeEnum
from .Losses import SeedRegions, seed_regions_from_masks, seeding_loss, pixel_ce_loss, combined_loss, IGNORE_LABEL
from .Metrics import MetricsReport, evaluate, mean_report, confusion_counts

__all__ = [
    'LossModeEnum',
    'SeedRegions',
    'seed_regions_from_masks',
    'seeding_loss',
    'pixel_ce_loss',
    'combined_loss',
    'IGNORE_LABEL',
    'MetricsReport',
    'evaluate',
    'mean_report',
    'confusion_counts',
]
