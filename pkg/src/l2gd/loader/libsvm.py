"""
LIBSVM text format: `label idx:val idx:val ...`, 1-based strictly increasing indices.

Labels must be +1 or -1 ("1", "+1", "-1"); '#' comments are rejected; LF and CRLF
line endings are accepted; blank lines are skipped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from src.l2gd.errors import LibsvmParseError
from src.l2gd.loader.dataset import LabeledExample


@dataclass(frozen=True)
class ParsedLibsvm:
    examples: list[LabeledExample]
    d: int


def _parse_label(token: str, line_number: int) -> int:
    try:
        value = float(token)
    except ValueError:
        raise LibsvmParseError(line_number, f"label '{token}' is not a number") from None
    if value == 1.:
        return 1
    if value == -1.:
        return -1
    raise LibsvmParseError(line_number, f"label '{token}' is not +1 or -1")


def _parse_feature(token: str, line_number: int) -> tuple[int, float]:
    index_part, sep, value_part = token.partition(':')
    if not sep:
        raise LibsvmParseError(line_number, f"feature '{token}' is not of the form idx:val")
    try:
        index = int(index_part)
        value = float(value_part)
    except ValueError:
        raise LibsvmParseError(line_number, f"feature '{token}' is not of the form idx:val") from None
    if index < 1:
        raise LibsvmParseError(line_number, f"feature index {index} must be >= 1")
    if not math.isfinite(value):
        raise LibsvmParseError(line_number, f"feature {index} has non-finite value {value_part}")
    return index - 1, value


def parse_line(line: str, line_number: int) -> LabeledExample:
    if '#' in line:
        raise LibsvmParseError(line_number, "comments are not part of the format")
    tokens = line.split()
    label = _parse_label(tokens[0], line_number)
    indices: list[int] = []
    values: list[float] = []
    for token in tokens[1:]:
        index, value = _parse_feature(token, line_number)
        if indices and index <= indices[-1]:
            raise LibsvmParseError(line_number, f"feature indices not strictly increasing at {index + 1}")
        indices.append(index)
        values.append(value)
    return LabeledExample(indices=tuple(indices), values=tuple(values), label=label)


def parse_libsvm(lines: str | Iterable[str], target_d: int | None = None) -> ParsedLibsvm:
    """
    Parse LIBSVM text into sparse examples.

    Args:
        lines: whole text or an iterable of lines (e.g. an open file)
        target_d: lower bound on the dimension; the dimension is the largest index seen, raised to target_d
    """
    if isinstance(lines, str):
        lines = lines.splitlines()
    examples: list[LabeledExample] = []
    d = 0
    for line_number, raw in enumerate(lines, start=1):
        line = raw.rstrip('\r\n')
        if not line.strip():
            continue
        example = parse_line(line, line_number)
        d = max(d, example.max_index + 1)
        examples.append(example)
    if target_d is not None:
        d = max(d, target_d)
    return ParsedLibsvm(examples=examples, d=d)


def serialize_libsvm(examples: Iterable[LabeledExample]) -> str:
    rows = []
    for example in examples:
        label = '+1' if example.label > 0 else '-1'
        features = ' '.join(f'{index + 1}:{value!r}' for index, value in zip(example.indices, example.values))
        rows.append(f'{label} {features}'.rstrip())
    return '\n'.join(rows) + '\n' if rows else ''
