from .settings import Config
from .logging_config import suppress_library_warnings, quiet_external_loggers

__all__ = ['Config', 'suppress_library_warnings', 'quiet_external_loggers']
