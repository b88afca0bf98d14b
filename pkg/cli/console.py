import sys
from datetime import datetime
from typing import Optional, TextIO

from colorama import Fore, Style, init

from utils.exceptions import HybridFMError

init()


class Console:
    """Human-facing status lines; always on stderr so stdout stays machine-readable."""

    def __init__(self, stream: Optional[TextIO] = None, timestamps: bool = True):
        self._stream = stream
        self.timestamps = timestamps

    @property
    def stream(self) -> TextIO:
        return self._stream or sys.stderr

    def _emit(self, colour: str, label: str, message: str) -> None:
        prefix = f"[{datetime.now().strftime('%H:%M:%S')}] " if self.timestamps else ""
        self.stream.write(f"{colour}{prefix}[{label}]{Style.RESET_ALL} {message}\n")
        self.stream.flush()

    def info(self, message: str) -> None:
        self._emit(Fore.CYAN, 'INFO', message)

    def success(self, message: str) -> None:
        self._emit(Fore.GREEN, 'DONE', message)

    def warning(self, message: str) -> None:
        self._emit(Fore.YELLOW, 'WARNING', message)

    def error(self, message: str) -> None:
        self._emit(Fore.RED, 'ERROR', message)

    def diagnostic(self, error: HybridFMError) -> None:
        """One line: error code, message and the most useful detail."""
        location = []
        for key in ('source', 'line_number', 'section', 'field_name'):
            if key in error.details:
                location.append(f"{key}={error.details[key]}")
        suffix = f" ({', '.join(location)})" if location else ""
        self.error(f"{error.error_code}: {error.message}{suffix}")
