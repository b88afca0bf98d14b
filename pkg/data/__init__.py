from .models import (
    POSITIVE,
    NEGATIVE,
    SPLIT_KINDS,
    EntityIndex,
    InteractionSet,
    FeatureMapping,
    RawRating,
    TagAssignment,
    RecommendationDataset,
    DatasetSplit,
    EpochRecord,
    TrainingHistory,
    ExperimentReport,
)

__all__ = [
    "POSITIVE", "NEGATIVE", "SPLIT_KINDS", "EntityIndex", "InteractionSet", "FeatureMapping",
    "RawRating", "TagAssignment", "RecommendationDataset", "DatasetSplit", "EpochRecord",
    "TrainingHistory", "ExperimentReport",
]
