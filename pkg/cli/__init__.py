from .parser import build_parser, PROG
from .commands import CommandRunner
from .console import Console

__all__ = ['build_parser', 'PROG', 'CommandRunner', 'Console']
