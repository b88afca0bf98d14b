import logging
import warnings
from typing import Optional, List

DEFAULT_EXTERNAL_LIBS = ['sklearn', 'scipy', 'numpy']
DEFAULT_WARNING_PATTERNS = [
    ".*lbfgs failed to converge.*",
    ".*Changing the sparsity structure.*",
    ".*k >= N for N \\* N square matrix.*",
]


def quiet_external_loggers(external_libs: Optional[List[str]] = None) -> None:
    libs_to_quiet = external_libs or DEFAULT_EXTERNAL_LIBS
    for lib in libs_to_quiet:
        logging.getLogger(lib).setLevel(logging.ERROR)


def suppress_library_warnings(warning_patterns: Optional[List[str]] = None) -> None:
    patterns = warning_patterns or DEFAULT_WARNING_PATTERNS
    for pattern in patterns:
        warnings.filterwarnings("ignore", message=pattern)
    try:
        from sklearn.exceptions import ConvergenceWarning
        # per-user regressions on a handful of points hit max_iter routinely
        warnings.filterwarnings("ignore", category=ConvergenceWarning)
    except ImportError:
        pass
