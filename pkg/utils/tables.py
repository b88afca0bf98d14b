"""Tab-delimited UTF-8 tables shared by the CLI, reports and dataset files."""

import csv
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, TextIO, Union

import numpy as np


def format_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(
    rows: Iterable[Sequence],
    destination: Union[Path, str, TextIO],
    header: Optional[Sequence[str]] = None
) -> None:
    def _write(handle: TextIO) -> None:
        writer = csv.writer(handle, delimiter='\t', lineterminator='\n')
        if header:
            writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])

    if hasattr(destination, 'write'):
        _write(destination)
        return
    with open(destination, 'w', encoding='utf-8', newline='') as handle:
        _write(handle)


def read_table(source: Union[Path, str], skip_header: bool = False) -> List[List[str]]:
    with open(source, 'r', encoding='utf-8', newline='') as handle:
        rows = [row for row in csv.reader(handle, delimiter='\t') if row]
    return rows[1:] if skip_header else rows
