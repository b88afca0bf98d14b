from .logging_config import setup_logging, get_logger, LoggerMixin
from .exceptions import (HybridFMError, ValidationError, FeatureIndexError, ModelFormatError, ModelVersionError, DataParseError, EvaluationError, SearchError, ConfigurationError, handle_exception)
from .tables import write_table, read_table

__all__ = ['setup_logging', 'get_logger', 'LoggerMixin', 'HybridFMError', 'ValidationError', 'FeatureIndexError', 'ModelFormatError', 'ModelVersionError', 'DataParseError', 'EvaluationError', 'SearchError', 'ConfigurationError', 'handle_exception', 'write_table', 'read_table']
