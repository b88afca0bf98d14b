import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional, Dict, Mapping, Any

from dotenv import dotenv_values

ENV_PREFIX = 'HYBRIDFM_'


def _as_bool(value: str) -> bool:
    return str(value).strip().lower() in ('1', 'true', 'yes', 'on')


@dataclass
class Config:
    # Model and training
    LATENT_DIM: int = 64
    LEARNING_RATE: float = 0.05
    THREADS: int = 4
    EPOCHS_MAX: int = 50
    EARLY_STOP_PATIENCE: int = 2
    SEED: int = 42

    REPETITIONS: int = 10
    TEST_FRACTION: float = 0.2
    COLD_ITEM_FRACTION: float = 0.2
    VALIDATION_FRACTION: float = 0.1

    NEGATIVE_RATIO: int = 3
    TAG_THRESHOLD: float = 0.8
    ABOUT_VOCABULARY_SIZE: int = 5000

    LOG_LEVEL: str = "WARNING"
    LOG_DIR: Optional[Path] = None
    LOG_JSON: bool = False
    LOG_FILE: str = "hybridfm.log"
    LOG_MAX_BYTES: int = 10_000_000
    LOG_BACKUP_COUNT: int = 5

    @classmethod
    def _coerce(cls, values: Mapping[str, Any]) -> Dict[str, Any]:
        """Turn HYBRIDFM_* string values into typed dataclass kwargs."""
        from utils.exceptions import ConfigurationError

        typed: Dict[str, Any] = {}
        for f in fields(cls):
            key = ENV_PREFIX + f.name
            if key not in values or values[key] in (None, ''):
                continue
            raw = values[key]
            try:
                if f.type in (int, 'int'):
                    typed[f.name] = int(raw)
                elif f.type in (float, 'float'):
                    typed[f.name] = float(raw)
                elif f.type in (bool, 'bool'):
                    typed[f.name] = _as_bool(raw)
                elif f.name == 'LOG_DIR':
                    typed[f.name] = Path(raw)
                else:
                    typed[f.name] = str(raw)
            except ValueError as e:
                raise ConfigurationError(key, f"Invalid value for {key}: {raw!r}") from e
        return typed

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> 'Config':
        environ = os.environ if environ is None else environ
        return cls(**cls._coerce(environ))

    @classmethod
    def from_file(cls, path: Path, base: Optional['Config'] = None) -> 'Config':
        """Layer a dotenv-format config file over `base` (defaults + env when omitted)."""
        from utils.exceptions import ConfigurationError

        path = Path(path)
        if not path.exists():
            raise ConfigurationError('config_file', f"Config file not found: {path}")
        base = base or cls.from_env()
        return replace(base, **cls._coerce(dotenv_values(path)))

    @classmethod
    def load(cls, config_file: Optional[Path] = None) -> 'Config':
        config = cls.from_env()
        if config_file:
            config = cls.from_file(config_file, base=config)
        return config

    def with_overrides(self, **overrides: Any) -> 'Config':
        """Apply command-line overrides; None means 'flag not given'."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})
