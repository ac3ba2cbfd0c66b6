"""Tests for placeholder replacement extraction."""

import pytest

from src.core.errors import FailureKind, RemoteFailure
from src.core.identity import compute_metrics, match_pairs
from src.docgen.corpus import render_ambiguous_document
from src.docgen.identities import generate_identities
from src.extract.direct import extract_direct
from src.extract.models import PlaceholderEntry, PlaceholderMap
from src.extract.replace import extract_replace, mask_ids, parse_name_lines
from src.ingest.models import DocumentFormat, structured
from src.ingest.parsers import parse_native

ID_A = "11010519491231002X"
ID_B = "110105194912310021"


def text_input(text: str):
    return structured(text, None, DocumentFormat.MARKDOWN)


class TestMaskIds:
    """Tests for ID masking."""

    def test_numbered_in_order(self):
        masked, placeholders = mask_ids(f"王芳 {ID_A}\n李强 {ID_B}")
        assert masked == "王芳 ⟦ID_1⟧\n李强 ⟦ID_2⟧"
        assert placeholders.tokens == ["⟦ID_1⟧", "⟦ID_2⟧"]
        assert [e.id_number for e in placeholders.entries] == [ID_A, ID_B]
        assert placeholders.entries[1].char_offset == len(f"王芳 {ID_A}\n李强 ")

    def test_runs_inside_longer_numbers_are_left_alone(self):
        masked, placeholders = mask_ids(f"编号 9{ID_A} 与 A{ID_B}")
        assert len(placeholders) == 0
        assert ID_A in masked

    def test_map_invariants(self):
        with pytest.raises(ValueError):
            PlaceholderMap(entries=[PlaceholderEntry("⟦ID_1⟧", ID_A, 5), PlaceholderEntry("⟦ID_1⟧", ID_B, 9)])
        with pytest.raises(ValueError):
            PlaceholderMap(entries=[PlaceholderEntry("⟦ID_1⟧", ID_A, 9), PlaceholderEntry("⟦ID_2⟧", ID_B, 5)])


class TestParseNameLines:
    """Tests for reading one name per line."""

    def test_prefixes_and_blank_lines(self):
        assert parse_name_lines("1. 王芳\n\n⟦ID_2⟧: 李强\n3、张伟\n") == ["王芳", "李强", "张伟"]


class TestExtractReplace:
    """Tests for extract_replace."""

    @pytest.mark.asyncio
    async def test_native_table(self, render, gateway):
        record = render(DocumentFormat.DOCX, n=30)
        outcome = await extract_replace(parse_native(record.format, record.payload_path.read_bytes()), gateway)
        assert not outcome.fatal
        assert compute_metrics(match_pairs(outcome.pairs, record.truth)).f1 == 1.0
        assert outcome.completions == 1

    @pytest.mark.asyncio
    async def test_ids_come_from_source_text(self, scripted_gateway):
        gateway = scripted_gateway("王芳\n李强")
        outcome = await extract_replace(text_input(f"王芳 {ID_A}\n李强 {ID_B}"), gateway)
        assert [(p.name, p.id_number) for p in outcome.pairs] == [("王芳", ID_A), ("李强", ID_B)]
        prompt = gateway.backend.prompts[0]
        assert ID_A not in prompt
        assert "Placeholders: ⟦ID_1⟧, ⟦ID_2⟧" in prompt

    @pytest.mark.asyncio
    async def test_unresolved_placeholder_keeps_id(self, scripted_gateway):
        outcome = await extract_replace(text_input(f"{ID_A}"), scripted_gateway("-"))
        assert [(p.name, p.id_number) for p in outcome.pairs] == [("", ID_A)]

    @pytest.mark.asyncio
    async def test_no_ids_fails_without_a_call(self, scripted_gateway):
        gateway = scripted_gateway()
        outcome = await extract_replace(text_input("没有证件号码"), gateway)
        assert outcome.fatal
        assert outcome.failure_kind is FailureKind.NO_IDS_FOUND
        assert outcome.completions == 0
        assert gateway.backend.prompts == []

    @pytest.mark.asyncio
    async def test_arity_mismatch(self, scripted_gateway):
        outcome = await extract_replace(text_input(f"王芳 {ID_A}\n李强 {ID_B}"), scripted_gateway("王芳"))
        assert outcome.fatal
        assert outcome.failure_kind is FailureKind.ARITY_MISMATCH
        assert "expected 2 names, got 1" in outcome.detail

    @pytest.mark.asyncio
    async def test_gateway_failure(self, scripted_gateway):
        outcome = await extract_replace(text_input(ID_A), scripted_gateway(error=RemoteFailure("down")))
        assert outcome.failure_kind is FailureKind.GATEWAY_FAILURE

    @pytest.mark.asyncio
    async def test_labelled_inline_roster_misleads_replace_not_direct(self, tmp_path, gateway):
        """Labels between a name and its ID pull the next entry's name closer."""
        truth = generate_identities(seed=21, n=12)
        record = render_ambiguous_document(truth, seed=21, out_dir=tmp_path, labeled_rate=1.0)
        st = parse_native(DocumentFormat.MARKDOWN, record.payload_path.read_bytes())

        replaced = await extract_replace(st, gateway)
        direct = await extract_direct(st, gateway)

        assert compute_metrics(match_pairs(direct.pairs, record.truth)).f1 == 1.0
        assert compute_metrics(match_pairs(replaced.pairs, record.truth)).f1 < 0.2
