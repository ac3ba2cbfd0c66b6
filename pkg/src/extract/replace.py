"""Replace extraction: IDs are found by pattern and masked; the model only
names the holder of each placeholder."""

import re

from src.core.errors import ArityMismatch, GatewayError, GatewayFailure, NoIdsFound
from src.core.identity import ID_CANDIDATE, IdentityPair, PairSet
from src.core.llm_client import CompletionRequest, LLMGateway
from src.core.logger import get_logger
from src.core.prompts import REPLACE_MAX_OUTPUT_TOKENS, REPLACE_SYSTEM_PROMPT, replace_prompt
from src.core.reference_backend import NO_NAME
from src.extract.models import ExtractionOutcome, Paradigm, PlaceholderEntry, PlaceholderMap, fatal_outcome
from src.ingest.models import StructuredText

logger = get_logger(__name__)

RE_ANSWER_PREFIX = re.compile(r"^(?:\d+[.)、]\s*|⟦ID_\d+⟧\s*[:：=]?\s*)")


def placeholder_token(index: int) -> str:
    return f"⟦ID_{index}⟧"


def mask_ids(text: str) -> tuple[str, PlaceholderMap]:
    """Replace every ID-shaped run with a numbered placeholder, in order."""
    entries = []
    pieces = []
    cursor = 0
    for index, match in enumerate(ID_CANDIDATE.finditer(text), start=1):
        token = placeholder_token(index)
        entries.append(PlaceholderEntry(token=token, id_number=match.group(), char_offset=match.start()))
        pieces.append(text[cursor:match.start()])
        pieces.append(token)
        cursor = match.end()
    pieces.append(text[cursor:])
    return "".join(pieces), PlaceholderMap(entries=entries)


def parse_name_lines(text: str) -> list[str]:
    """One name per non-empty line; an optional leading number or placeholder is stripped."""
    names = []
    for line in text.strip().splitlines():
        line = line.strip()
        if not line:
            continue
        names.append(RE_ANSWER_PREFIX.sub("", line).strip())
    return names


async def extract_replace(st: StructuredText, gateway: LLMGateway) -> ExtractionOutcome:
    """One batched completion resolving every placeholder.

    IDs are copied from the source text, never from model output.
    """
    ocr_seconds = st.extract_time
    masked, placeholders = mask_ids(st.plain_text)
    if len(placeholders) == 0:
        return fatal_outcome(Paradigm.REPLACE, NoIdsFound("no ID-shaped runs in text"), ocr_seconds=ocr_seconds)

    request = CompletionRequest(
        system_prompt=REPLACE_SYSTEM_PROMPT,
        user_prompt=replace_prompt(masked, placeholders.tokens),
        max_output_tokens=REPLACE_MAX_OUTPUT_TOKENS,
    )
    try:
        response = await gateway.complete(request)
    except GatewayError as e:
        return fatal_outcome(Paradigm.REPLACE, GatewayFailure(e), ocr_seconds=ocr_seconds, completions=1)

    llm_seconds = gateway.charged_seconds(response)
    names = parse_name_lines(response.text)
    if len(names) != len(placeholders):
        error = ArityMismatch(f"expected {len(placeholders)} names, got {len(names)}")
        return fatal_outcome(
            Paradigm.REPLACE, error, ocr_seconds, llm_seconds,
            completions=1, output_tokens=response.output_token_count,
        )

    pairs = []
    for entry, name in zip(placeholders.entries, names):
        if name == NO_NAME:
            logger.debug(f"No holder resolved for {entry.token}")
            name = ""
        pairs.append(IdentityPair(name=name, id_number=entry.id_number))
    return ExtractionOutcome(
        pairs=PairSet(pairs=tuple(pairs)),
        paradigm=Paradigm.REPLACE,
        ocr_seconds=ocr_seconds,
        llm_seconds=llm_seconds,
        total_seconds=ocr_seconds + llm_seconds,
        completions=1,
        output_tokens=response.output_token_count,
    )
