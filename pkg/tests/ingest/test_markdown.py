"""Tests for the markdown reader."""

import pytest

from src.core.errors import MalformedInput
from src.ingest.markdown import find_pipe_table, parse_markdown, split_pipe_row
from src.ingest.models import DocumentFormat, Fidelity


class TestSplitPipeRow:
    """Tests for pipe row splitting."""

    def test_outer_pipes_and_padding(self):
        assert split_pipe_row("| 姓名 | 身份证号 |") == ["姓名", "身份证号"]

    def test_without_outer_pipes(self):
        assert split_pipe_row("a | b") == ["a", "b"]

    def test_escaped_pipe_stays_in_cell(self):
        assert split_pipe_row("| a \\| b | c |") == ["a | b", "c"]


class TestFindPipeTable:
    """Tests for pipe table location."""

    def test_first_table_only(self):
        lines = ["| a | b |", "|---|:-:|", "| 1 | 2 |", "", "| c | d |", "|---|---|", "| 3 | 4 |"]
        table = find_pipe_table(lines)
        assert table.header == ["a", "b"]
        assert table.rows == [["1", "2"]]

    def test_short_rows_padded_long_rows_cut(self):
        table = find_pipe_table(["| a | b |", "|---|---|", "| 1 |", "| 1 | 2 | 3 |"])
        assert table.rows == [["1", ""], ["1", "2"]]

    def test_no_delimiter_row(self):
        assert find_pipe_table(["| a | b |", "| 1 | 2 |"]) is None


class TestParseMarkdown:
    """Tests for parse_markdown."""

    def test_generated_document(self, render):
        record = render(DocumentFormat.MARKDOWN, n=30)
        st = parse_markdown(record.payload_path.read_bytes())
        assert st.fidelity is Fidelity.PRESERVED
        assert st.source_format is DocumentFormat.MARKDOWN
        assert st.table.header == ["序号", "姓名", "身份证号", "险种"]
        assert len(st.table.rows) == 30
        assert [(row[1], row[2]) for row in st.table.rows] == [(p.name, p.id_number) for p in record.truth]
        assert st.extract_time >= 0

    def test_prose_only_is_symbolic(self):
        st = parse_markdown("# 名单\n\n王芳 11010519491231002X\n".encode("utf-8"))
        assert st.fidelity is Fidelity.SYMBOLIC_ONLY
        assert st.table is None
        assert "11010519491231002X" in st.plain_text

    def test_single_column_table_is_not_usable(self):
        st = parse_markdown(b"| a |\n|---|\n| 1 |\n")
        assert st.fidelity is Fidelity.SYMBOLIC_ONLY

    def test_byte_order_mark_dropped(self):
        st = parse_markdown("\ufeff| a | b |\n|---|---|\n| 1 | 2 |\n".encode("utf-8"))
        assert st.table.header == ["a", "b"]

    def test_empty_document(self):
        with pytest.raises(MalformedInput, match="empty"):
            parse_markdown(b"  \n\n")

    def test_invalid_utf8(self):
        with pytest.raises(MalformedInput, match="UTF-8"):
            parse_markdown(b"\xff\xfe\xfa")
