"""Table extraction: the model only locates the name and ID columns; cells
are read deterministically from the parsed table."""

import json
import re

from src.core.errors import CoordinateUnresolvable, GatewayError, GatewayFailure, SpecOutOfBounds
from src.core.identity import ID_SHAPE, IdentityPair, PairSet
from src.core.llm_client import CompletionRequest, LLMGateway
from src.core.logger import get_logger
from src.core.prompts import TABLE_MAX_OUTPUT_TOKENS, TABLE_SYSTEM_PROMPT, table_prompt
from src.extract.models import CellCoordinateSpec, ExtractionOutcome, Paradigm, dropped_detail, fatal_outcome
from src.ingest.models import Fidelity, StructuredText, TableModel

logger = get_logger(__name__)

RE_SPEC = re.compile(r"(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)")
SPEC_KEYS = ("name_col", "id_col", "row_start", "row_end")


def parse_coordinate_spec(text: str) -> CellCoordinateSpec:
    """Read "name_col,id_col,row_start,row_end", or a JSON object with those keys.

    Raises:
        CoordinateUnresolvable: No four integers, or the columns and row span are inconsistent.
    """
    cleaned = text.strip()
    values = None
    if cleaned.startswith("{"):
        try:
            data = json.loads(cleaned)
            values = [int(data[key]) for key in SPEC_KEYS]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError):
            values = None
    if values is None:
        match = RE_SPEC.search(cleaned)
        if match is None:
            raise CoordinateUnresolvable(f"no coordinates in output: {cleaned[:80]!r}")
        values = [int(group) for group in match.groups()]
    try:
        return CellCoordinateSpec(*values)
    except ValueError as e:
        raise CoordinateUnresolvable(str(e)) from e


def check_bounds(spec: CellCoordinateSpec, table: TableModel):
    if min(spec.name_col, spec.id_col, spec.row_start) < 0:
        raise SpecOutOfBounds(f"negative coordinate in {spec}")
    if max(spec.name_col, spec.id_col) >= table.n_cols:
        raise SpecOutOfBounds(f"column out of range for {table.n_cols} columns")
    if spec.row_end >= len(table.rows):
        raise SpecOutOfBounds(f"row_end {spec.row_end} beyond {len(table.rows)} rows")


def read_cells(spec: CellCoordinateSpec, table: TableModel) -> tuple[list[IdentityPair], int]:
    """Pairs from the located rows, and the number of rows skipped for a malformed ID cell."""
    pairs = []
    skipped = 0
    for row in table.rows[spec.row_start:spec.row_end + 1]:
        id_number = row[spec.id_col].strip()
        if not ID_SHAPE.match(id_number):
            logger.debug(f"Skipping row with malformed ID cell {id_number!r}")
            skipped += 1
            continue
        pairs.append(IdentityPair(name=row[spec.name_col].strip(), id_number=id_number))
    return pairs, skipped


async def extract_table(st: StructuredText, gateway: LLMGateway) -> ExtractionOutcome:
    """Locate coordinates with one short completion, then read cells.

    Requires a preserved table; anything less fails without a completion.
    """
    ocr_seconds = st.extract_time
    table = st.table
    if table is None or st.fidelity is Fidelity.LOST:
        error = CoordinateUnresolvable("no table structure to locate columns in")
        return fatal_outcome(Paradigm.TABLE, error, ocr_seconds=ocr_seconds)
    if not table.rows:
        error = CoordinateUnresolvable("table has no data rows")
        return fatal_outcome(Paradigm.TABLE, error, ocr_seconds=ocr_seconds)

    request = CompletionRequest(
        system_prompt=TABLE_SYSTEM_PROMPT,
        user_prompt=table_prompt(table.header, table.rows[0], len(table.rows)),
        max_output_tokens=TABLE_MAX_OUTPUT_TOKENS,
    )
    try:
        response = await gateway.complete(request)
    except GatewayError as e:
        return fatal_outcome(Paradigm.TABLE, GatewayFailure(e), ocr_seconds=ocr_seconds, completions=1)

    llm_seconds = gateway.charged_seconds(response)
    try:
        spec = parse_coordinate_spec(response.text)
        check_bounds(spec, table)
    except (CoordinateUnresolvable, SpecOutOfBounds) as e:
        return fatal_outcome(
            Paradigm.TABLE, e, ocr_seconds, llm_seconds,
            completions=1, output_tokens=response.output_token_count,
        )

    pairs, skipped = read_cells(spec, table)
    if skipped:
        logger.info(f"Table read skipped {skipped} rows with malformed ID cells")
    return ExtractionOutcome(
        pairs=PairSet(pairs=tuple(pairs)),
        paradigm=Paradigm.TABLE,
        ocr_seconds=ocr_seconds,
        llm_seconds=llm_seconds,
        total_seconds=ocr_seconds + llm_seconds,
        completions=1,
        output_tokens=response.output_token_count,
        dropped_records=skipped,
        detail=dropped_detail(skipped),
    )
