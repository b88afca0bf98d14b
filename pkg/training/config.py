from dataclasses import dataclass, asdict
from typing import Any, Dict, Optional

from config.schemas import TrainConfigSchema, load_or_raise
from config.settings import Config

DEFAULT_SEED = 42


@dataclass(frozen=True)
class TrainConfig:
    base_learning_rate: float = 0.05
    epochs_max: int = 50
    threads: int = 4
    early_stop_patience: int = 2
    rng_seed: int = DEFAULT_SEED

    def __post_init__(self):
        load_or_raise(TrainConfigSchema(), asdict(self))

    @classmethod
    def from_settings(cls, settings: Config, **overrides: Optional[Any]) -> 'TrainConfig':
        values = {
            'base_learning_rate': settings.LEARNING_RATE,
            'epochs_max': settings.EPOCHS_MAX,
            'threads': settings.THREADS,
            'early_stop_patience': settings.EARLY_STOP_PATIENCE,
            'rng_seed': settings.SEED,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
