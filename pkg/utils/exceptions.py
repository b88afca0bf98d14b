from typing import Optional, Dict, Any


class HybridFMError(Exception):

    error_code: str = "HYBRIDFM_ERROR"
    exit_code: int = 1
    message: str = "An internal error occurred"

    def __init__(self, message: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        """Base exception with a message and optional structured details

        Args:
            message: Error message
            details: Extra context (feature index, file section, line number...)
        """
        self.message = message or self.message
        self.details = details or {}
        super().__init__(self.message)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "code": self.error_code,
            "message": self.message,
            "details": self.details
        }


class ValidationError(HybridFMError, ValueError):

    error_code = "VALIDATION_ERROR"
    message = "Validation failed"

    def __init__(
        self,
        message: str,
        field_name: Optional[str] = None,
        field_value: Any = None,
        details: Optional[Dict[str, Any]] = None
    ):
        error_details = details or {}
        if field_name:
            error_details['field_name'] = field_name
        if field_value is not None:
            error_details['field_value'] = field_value

        super().__init__(message, error_details)
        self.field_name = field_name
        self.field_value = field_value


class FeatureIndexError(HybridFMError, IndexError):

    error_code = "FEATURE_INDEX_ERROR"
    message = "Feature index out of range"

    def __init__(self, index: int, side: str, size: int):
        super().__init__(
            f"{side} feature index {index} out of range [0, {size})",
            {'index': int(index), 'side': side, 'size': int(size)}
        )
        self.index = index
        self.side = side
        self.size = size


class ModelFormatError(HybridFMError):

    error_code = "MODEL_FORMAT_ERROR"
    message = "Malformed model file"

    def __init__(self, message: str, section: str, path: Optional[str] = None):
        """Model file could not be parsed

        Args:
            message: Error message
            section: Name of the file section that failed to parse
            path: File being read, when known
        """
        error_details = {'section': section}
        if path:
            error_details['path'] = str(path)
        super().__init__(f"{message} (section: {section})", error_details)
        self.section = section
        self.path = path


class ModelVersionError(HybridFMError):

    error_code = "MODEL_VERSION_ERROR"
    message = "Unsupported model format version"

    def __init__(self, found: int, supported: int):
        super().__init__(
            f"Model format version {found} is not supported (expected {supported})",
            {'found': found, 'supported': supported}
        )
        self.found = found
        self.supported = supported


class DataParseError(HybridFMError):

    error_code = "DATA_PARSE_ERROR"
    message = "Malformed input data"

    def __init__(
        self,
        message: str,
        source: Optional[str] = None,
        line_number: Optional[int] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        error_details = details or {}
        if source:
            error_details['source'] = str(source)
        if line_number is not None:
            error_details['line_number'] = line_number
            message = f"{message} (line {line_number})"

        super().__init__(message, error_details)
        self.source = source
        self.line_number = line_number


class EvaluationError(HybridFMError):

    error_code = "EVALUATION_ERROR"
    message = "Evaluation failed"


class SearchError(HybridFMError):

    error_code = "SEARCH_ERROR"
    message = "Similarity search failed"


class ConfigurationError(HybridFMError):

    error_code = "CONFIGURATION_ERROR"
    message = "Invalid configuration"

    def __init__(self, config_key: str, message: Optional[str] = None):
        message = message or f"Invalid configuration for '{config_key}'"
        super().__init__(message, {'config_key': config_key})
        self.config_key = config_key


def handle_exception(
    error: Exception,
    operation: str = "",
    logger=None,
    reraise: bool = True
) -> Optional[Exception]:
    """Centralized exception handler

    Args:
        error: Exception being handled
        operation: Name of the operation that failed
        logger: Logger used to record the error
        reraise: Whether to re-raise after logging

    Returns:
        The exception when it is not re-raised
    """
    if logger:
        if isinstance(error, HybridFMError):
            logger.error(
                f"Error in '{operation}': {error}",
                extra={'error_type': error.__class__.__name__, 'error_details': error.details}
            )
        else:
            logger.exception(f"Unexpected error in '{operation}': {error}")

    if reraise:
        raise error

    return error
