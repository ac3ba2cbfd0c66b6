"""Deterministic offline completion backend.

Recognizes the extraction task from the system prompt and answers with
simple positional heuristics. Its misses on scrambled or ambiguous layouts
are intended; they stand in for model fallibility.
"""

import json
import re
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from src.core.identity import ID_CANDIDATE, ID_SHAPE
from src.core.lexicon import ID_LABELS, NAME_LABELS, is_name_token, name_tokens
from src.core.logger import get_logger
from src.core.prompts import (
    DIRECT_SYSTEM_PROMPT,
    HEADER_PREFIX,
    PLACEHOLDERS_PREFIX,
    REPLACE_SYSTEM_PROMPT,
    ROWS_PREFIX,
    SAMPLE_PREFIX,
    TABLE_SYSTEM_PROMPT,
    document_payload,
    parse_row,
)

logger = get_logger(__name__)

PLACEHOLDER = re.compile(r"⟦ID_\d+⟧")
NO_NAME = "-"


class TaskKind(str, Enum):
    DIRECT_EXTRACT = "DirectExtract"
    REPLACE_RESOLVE = "ReplaceResolve"
    TABLE_LOCATE = "TableLocate"


_TASKS_BY_PROMPT = {
    DIRECT_SYSTEM_PROMPT: TaskKind.DIRECT_EXTRACT,
    REPLACE_SYSTEM_PROMPT: TaskKind.REPLACE_RESOLVE,
    TABLE_SYSTEM_PROMPT: TaskKind.TABLE_LOCATE,
}


@dataclass
class BackendReply:
    text: str
    finish_reason: Optional[str] = "stop"


def task_kind_for(system_prompt: str) -> Optional[TaskKind]:
    return _TASKS_BY_PROMPT.get(system_prompt)


def _line_starts(text: str) -> list[int]:
    starts = [0]
    for index, char in enumerate(text):
        if char == "\n":
            starts.append(index + 1)
    return starts


def _direct_extract(prompt: str) -> str:
    payload = document_payload(prompt)
    starts = _line_starts(payload)
    tokens = name_tokens(payload)
    # Name tokens grouped by line index, in order.
    by_line: dict[int, list[tuple[int, int, str]]] = {}
    for token in tokens:
        by_line.setdefault(bisect_right(starts, token[0]) - 1, []).append(token)

    records = []
    for match in ID_CANDIDATE.finditer(payload):
        line = bisect_right(starts, match.start()) - 1
        name = None
        same_line = [t for t in by_line.get(line, []) if t[1] <= match.start()]
        if same_line:
            name = same_line[-1][2]
        else:
            for previous in range(line - 1, -1, -1):
                if by_line.get(previous):
                    name = by_line[previous][-1][2]
                    break
        if name is not None:
            records.append({"name": name, "id": match.group()})
    return json.dumps(records, ensure_ascii=False, indent=2)


def _nearest_name(
    candidates: list[tuple[int, int, str]], start: int, end: int
) -> Optional[str]:
    best: Optional[tuple[int, int, str]] = None
    for token_start, token_end, token in candidates:
        if token_end <= start:
            # Preceding tokens win ties.
            key = (start - token_end, 0, token)
        elif token_start >= end:
            key = (token_start - end, 1, token)
        else:
            continue
        if best is None or key[:2] < best[:2]:
            best = key
    return best[2] if best else None


def _replace_resolve(prompt: str) -> str:
    listed: list[str] = []
    for line in prompt.splitlines():
        if line.startswith(PLACEHOLDERS_PREFIX):
            listed = [p.strip() for p in line[len(PLACEHOLDERS_PREFIX):].split(",") if p.strip()]
            break
    payload = document_payload(prompt)
    starts = _line_starts(payload)
    tokens = name_tokens(payload)

    answers = []
    for placeholder in listed:
        position = payload.find(placeholder)
        if position == -1:
            answers.append(NO_NAME)
            continue
        end = position + len(placeholder)
        line = bisect_right(starts, position) - 1
        same_line = [t for t in tokens if bisect_right(starts, t[0]) - 1 == line]
        name = _nearest_name(same_line, position, end) or _nearest_name(tokens, position, end)
        answers.append(name or NO_NAME)
    return "\n".join(answers)


def _prefixed(prompt: str, prefix: str) -> Optional[str]:
    for line in prompt.splitlines():
        if line.startswith(prefix):
            return line[len(prefix):]
    return None


def _table_locate(prompt: str) -> str:
    header = parse_row(_prefixed(prompt, HEADER_PREFIX) or "")
    sample = parse_row(_prefixed(prompt, SAMPLE_PREFIX) or "")
    try:
        n_rows = int((_prefixed(prompt, ROWS_PREFIX) or "1").strip())
    except ValueError:
        n_rows = 1

    name_col = next((i for i, cell in enumerate(header) if cell in NAME_LABELS), None)
    id_col = next((i for i, cell in enumerate(header) if cell in ID_LABELS), None)
    if id_col is None:
        id_col = next((i for i, cell in enumerate(sample) if ID_SHAPE.match(cell)), None)
    if name_col is None:
        name_col = next((i for i, cell in enumerate(sample) if is_name_token(cell)), None)
    # Guess the leading columns when nothing matches.
    if id_col is None:
        id_col = 1 if name_col == 0 else 0
    if name_col is None:
        name_col = 1 if id_col == 0 else 0
    return f"{name_col},{id_col},0,{max(n_rows, 1) - 1}"


def reference_behavior(task_kind: TaskKind, prompt: str) -> str:
    """Deterministic answer for one task; always syntactically valid."""
    if task_kind is TaskKind.DIRECT_EXTRACT:
        return _direct_extract(prompt)
    if task_kind is TaskKind.REPLACE_RESOLVE:
        return _replace_resolve(prompt)
    return _table_locate(prompt)


class ReferenceBackend:
    """Offline backend standing in for an instruction-tuned model."""

    name = "reference"

    async def generate(self, system_prompt: str, user_prompt: str, max_output_tokens: int) -> BackendReply:
        kind = task_kind_for(system_prompt)
        if kind is None:
            logger.warning("Unrecognized system prompt; answering as direct extraction")
            kind = TaskKind.DIRECT_EXTRACT
        return BackendReply(text=reference_behavior(kind, user_prompt))

    async def close(self):
        return None
