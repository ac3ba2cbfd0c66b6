"""Direct extraction: the model reads the whole text and writes every pair."""

import json
import re

from src.core.errors import GatewayError, GatewayFailure, MalformedInput, UnparseableOutput
from src.core.identity import ID_SHAPE, IdentityPair, PairSet
from src.core.llm_client import CompletionRequest, LLMGateway
from src.core.logger import get_logger
from src.core.prompts import DIRECT_MAX_OUTPUT_TOKENS, DIRECT_SYSTEM_PROMPT, direct_prompt
from src.extract.models import ExtractionOutcome, Paradigm, dropped_detail, fatal_outcome
from src.ingest.models import StructuredText

logger = get_logger(__name__)

RE_FENCE = re.compile(r"^```[a-zA-Z]*\s*|\s*```$")
RE_LOOSE_ID = re.compile(r"\d{17}[\dXx]", re.ASCII)
NAME_STRIP = " \t\"'`,，:：;；|-—[]{}()（）"
NAME_KEYS = ("name", "姓名")
ID_KEYS = ("id", "id_number", "身份证号")


def _field(record: dict, keys: tuple[str, ...]) -> str:
    for key in keys:
        if key in record and record[key] is not None:
            return str(record[key]).strip()
    return ""


def _from_json(text: str) -> list[tuple[str, str]] | None:
    start, end = text.find("["), text.rfind("]")
    if start == -1 or end < start:
        return None
    try:
        data = json.loads(text[start:end + 1])
    except json.JSONDecodeError:
        return None
    if not isinstance(data, list) or not all(isinstance(item, dict) for item in data):
        return None
    return [(_field(item, NAME_KEYS), _field(item, ID_KEYS)) for item in data]


def _from_lines(text: str) -> list[tuple[str, str]] | None:
    records = []
    for line in text.splitlines():
        match = RE_LOOSE_ID.search(line)
        if match is None:
            continue
        name = (line[:match.start()] + " " + line[match.end():]).strip(NAME_STRIP)
        name = re.sub(r"^(?:name|姓名)\s*[:：]\s*", "", name).strip(NAME_STRIP)
        records.append((name, match.group().upper()))
    return records or None


def parse_pair_list(text: str) -> tuple[list[IdentityPair], int]:
    """Lenient reader: a JSON array of objects, else one pair per line.

    Records whose ID has the wrong shape cannot form a pair and are dropped;
    checksum failures are kept. Returns the pairs and the dropped count.

    Raises:
        UnparseableOutput: Neither reading finds any record.
    """
    cleaned = RE_FENCE.sub("", text.strip())
    records = _from_json(cleaned)
    if records is None:
        records = _from_lines(cleaned)
    if records is None:
        raise UnparseableOutput(f"no pair list in output: {cleaned[:80]!r}")

    pairs = [IdentityPair(name=name, id_number=id_number) for name, id_number in records if ID_SHAPE.match(id_number)]
    return pairs, len(records) - len(pairs)


async def extract_direct(st: StructuredText, gateway: LLMGateway) -> ExtractionOutcome:
    """One completion over the full text; output is the serialized pair list.

    Raises:
        MalformedInput: st.plain_text is empty.
    """
    if not st.plain_text.strip():
        raise MalformedInput("direct extraction needs non-empty text")
    ocr_seconds = st.extract_time
    request = CompletionRequest(
        system_prompt=DIRECT_SYSTEM_PROMPT,
        user_prompt=direct_prompt(st.plain_text),
        max_output_tokens=DIRECT_MAX_OUTPUT_TOKENS,
    )
    try:
        response = await gateway.complete(request)
    except GatewayError as e:
        return fatal_outcome(Paradigm.DIRECT, GatewayFailure(e), ocr_seconds=ocr_seconds, completions=1)

    llm_seconds = gateway.charged_seconds(response)
    try:
        pairs, dropped = parse_pair_list(response.text)
    except UnparseableOutput as e:
        return fatal_outcome(
            Paradigm.DIRECT, e, ocr_seconds, llm_seconds, completions=1, output_tokens=response.output_token_count
        )
    if dropped:
        logger.info(f"Direct output had {dropped} records with malformed IDs")
    return ExtractionOutcome(
        pairs=PairSet(pairs=tuple(pairs)),
        paradigm=Paradigm.DIRECT,
        ocr_seconds=ocr_seconds,
        llm_seconds=llm_seconds,
        total_seconds=ocr_seconds + llm_seconds,
        completions=1,
        output_tokens=response.output_token_count,
        dropped_records=dropped,
        detail=dropped_detail(dropped),
    )
