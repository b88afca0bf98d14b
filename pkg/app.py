"""hybridfm command-line entry point"""

import argparse
import sys
from typing import Any, Dict, Optional, Sequence, TextIO

from cli import build_parser, CommandRunner, Console
from config.logging_config import quiet_external_loggers, suppress_library_warnings
from config.settings import Config
from utils.exceptions import HybridFMError, handle_exception
from utils.logging_config import get_logger, setup_logging

USAGE_EXIT_CODE = 2

# argparse dest -> Config field
FLAG_SETTINGS = {
    'latent_dim': 'LATENT_DIM',
    'learning_rate': 'LEARNING_RATE',
    'threads': 'THREADS',
    'epochs_max': 'EPOCHS_MAX',
    'early_stop_patience': 'EARLY_STOP_PATIENCE',
    'seed': 'SEED',
    'repetitions': 'REPETITIONS',
    'threshold': 'TAG_THRESHOLD',
    'negative_ratio': 'NEGATIVE_RATIO',
    'vocabulary_size': 'ABOUT_VOCABULARY_SIZE',
    'log_level': 'LOG_LEVEL',
}


def flag_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {setting: getattr(args, flag) for flag, setting in FLAG_SETTINGS.items() if getattr(args, flag, None) is not None}


def load_settings(args: argparse.Namespace) -> Config:
    """Defaults, then HYBRIDFM_* environment, then --config file, then flags."""
    return Config.load(getattr(args, 'config', None)).with_overrides(**flag_overrides(args))


def dispatch(
    argv: Optional[Sequence[str]] = None,
    stdout: Optional[TextIO] = None,
    stderr: Optional[TextIO] = None
) -> int:
    console = Console(stream=stderr)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # --help exits 0, malformed arguments exit 2
        return e.code if isinstance(e.code, int) else USAGE_EXIT_CODE

    try:
        settings = load_settings(args)
        setup_logging(settings)
        suppress_library_warnings()
        quiet_external_loggers()
        return CommandRunner(settings, stdout=stdout, console=console).run(args)
    except HybridFMError as e:
        handle_exception(e, args.command, get_logger('app'), reraise=False)
        console.diagnostic(e)
        return e.exit_code
    except OSError as e:
        console.error(f"IO_ERROR: {e}")
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == '__main__':
    main()
