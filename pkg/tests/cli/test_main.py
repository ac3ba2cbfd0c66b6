"""Tests for the command-line entry point."""

import json
import os
from pathlib import Path

import pytest

from src.cli.main import EXIT_CONFIG, EXIT_EXTRACTION, EXIT_IO, EXIT_OK, build_parser, config_overrides, main
from src.core.errors import IoFailure
from src.docgen.corpus import load_manifest
from src.ingest.models import DocumentFormat

pytestmark = pytest.mark.cli


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    """Run from an empty directory with no COPYHEAVY_ variables set."""
    monkeypatch.chdir(tmp_path)
    for key in list(os.environ):
        if key.startswith("COPYHEAVY_"):
            monkeypatch.delenv(key)


def run(capsys, *argv: str) -> tuple[int, dict]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else {})


def generate(capsys, out: str = "corpus", formats: str = "docx,transcript", docs: int = 2) -> dict:
    code, result = run(capsys, "generate", "--out", out, "--docs-per-format", str(docs), "--formats", formats)
    assert code == EXIT_OK
    return result


def first_of(corpus: str, fmt: DocumentFormat):
    return next(r for r in load_manifest(Path(corpus)) if r.format is fmt)


class TestParser:
    """Tests for argument parsing."""

    def test_flags_become_overrides(self):
        args = build_parser().parse_args([
            "evaluate", "--seed", "3", "--backend", "remote", "--endpoint", "http://llm.test",
            "--clock", "wall", "--workers", "2", "--out", "r",
        ])
        assert config_overrides(args) == {
            "seed": 3,
            "gateway": {"backend": "remote", "endpoint": "http://llm.test"},
            "clock": "wall",
            "workers": 2,
            "report_dir": "r",
        }

    def test_out_means_corpus_dir_for_generate(self):
        args = build_parser().parse_args(["generate", "--out", "c", "--formats", "docx, xlsx"])
        assert config_overrides(args) == {"corpus_dir": "c", "corpus": {"formats": ["docx", "xlsx"]}}

    def test_ingest_backend_is_not_a_gateway_override(self):
        args = build_parser().parse_args(["extract", "doc.docx", "--backend", "ocr_preserving"])
        assert "gateway" not in config_overrides(args)

    def test_unknown_command(self, capsys):
        assert main(["frobnicate"]) == 2


class TestValidateId:
    """Tests for the validate-id command."""

    def test_valid(self, capsys):
        code, result = run(capsys, "validate-id", "11010519491231002X")
        assert code == EXIT_OK
        assert result == {"id": "11010519491231002X", "valid": True, "expected_check_character": None}

    def test_wrong_check_character(self, capsys):
        code, result = run(capsys, "validate-id", "110105194912310020")
        assert code == EXIT_EXTRACTION
        assert result["valid"] is False
        assert result["expected_check_character"] == "X"

    def test_wrong_shape(self, capsys):
        code, result = run(capsys, "validate-id", "1234")
        assert code == EXIT_EXTRACTION
        assert result["expected_check_character"] is None


class TestGenerate:
    """Tests for the generate command."""

    def test_writes_manifest(self, capsys, tmp_path):
        result = generate(capsys)
        assert result["documents"] == 4
        assert result["pairs"] >= 4 * 10
        assert (tmp_path / "corpus" / "manifest.json").is_file()
        assert len(result["manifest_digest"]) == 64

    def test_seed_changes_corpus(self, capsys):
        a = generate(capsys, out="a")
        code, b = run(capsys, "generate", "--out", "b", "--docs-per-format", "2", "--formats", "docx,transcript",
                      "--seed", "5")
        assert code == EXIT_OK
        assert a["manifest_digest"] != b["manifest_digest"]

    def test_environment_seed(self, capsys, monkeypatch):
        a = generate(capsys, out="a")
        monkeypatch.setenv("COPYHEAVY_SEED", "5")
        b = generate(capsys, out="b")
        assert a["manifest_digest"] != b["manifest_digest"]

    def test_unknown_format_is_a_config_error(self, capsys):
        code, _ = run(capsys, "generate", "--formats", "docx,odt")
        assert code == EXIT_CONFIG

    def test_missing_config_file(self, capsys):
        code, _ = run(capsys, "generate", "--config", "absent.yaml")
        assert code == EXIT_CONFIG

    def test_write_failure_exits_three(self, capsys, mocker):
        mocker.patch("src.cli.main.generate_corpus", side_effect=IoFailure("disk full"))
        code, result = run(capsys, "generate", "--docs-per-format", "1")
        assert code == EXIT_IO
        assert result == {}


class TestExtract:
    """Tests for the extract command."""

    def test_routed_extraction(self, capsys):
        generate(capsys)
        record = first_of("corpus", DocumentFormat.DOCX)
        code, result = run(capsys, "extract", str(record.payload_path))
        assert code == EXIT_OK
        assert result["format"] == "docx"
        assert result["method"] == "native_docx+table"
        assert result["attempts"] == ["native_docx+table"]
        assert [(p["name"], p["id"]) for p in result["pairs"]] == [(p.name, p.id_number) for p in record.truth]
        assert result["timings"]["total_s"] == pytest.approx(0.49)
        assert result["dropped_records"] == 0

    def test_forced_paradigm(self, capsys):
        generate(capsys)
        record = first_of("corpus", DocumentFormat.DOCX)
        code, result = run(capsys, "extract", str(record.payload_path), "--paradigm", "direct")
        assert code == EXIT_OK
        assert result["method"] == "native_docx+direct"

    def test_forced_lane_failure_exits_one(self, capsys):
        generate(capsys)
        record = first_of("corpus", DocumentFormat.TRANSCRIPT)
        code, result = run(
            capsys, "extract", str(record.payload_path), "--backend", "ocr_destroying", "--paradigm", "table",
        )
        assert code == EXIT_EXTRACTION
        assert result["fatal"] is True
        assert result["failure_kind"] == "CoordinateUnresolvable"
        assert result["pairs"] == []

    def test_policy_file(self, capsys, tmp_path):
        generate(capsys)
        record = first_of("corpus", DocumentFormat.DOCX)
        policy = tmp_path / "policy.yaml"
        policy.write_text("docx:\n  primary: native_docx+direct\n", encoding="utf-8")
        code, result = run(capsys, "extract", str(record.payload_path), "--policy", str(policy))
        assert code == EXIT_OK
        assert result["method"] == "native_docx+direct"

    def test_invalid_policy_is_a_config_error(self, capsys, tmp_path):
        generate(capsys)
        record = first_of("corpus", DocumentFormat.DOCX)
        policy = tmp_path / "policy.yaml"
        policy.write_text("docx:\n  primary: native_xlsx+table\n", encoding="utf-8")
        code, _ = run(capsys, "extract", str(record.payload_path), "--policy", str(policy))
        assert code == EXIT_CONFIG

    def test_missing_document(self, capsys):
        code, _ = run(capsys, "extract", "nowhere.docx")
        assert code == EXIT_IO


class TestEvaluate:
    """Tests for the evaluate command."""

    def test_writes_reports(self, capsys, tmp_path):
        generate(capsys)
        code, result = run(capsys, "evaluate", "--corpus", "corpus", "--out", "report")
        assert code == EXIT_OK
        assert set(result["files"]) == {
            "heatmap_f1.csv", "heatmap_time.csv", "matrix.json", "outcomes.jsonl", "table.csv",
        }
        assert result["best"]["docx"] == "native_docx+table"
        matrix = json.loads((tmp_path / "report" / "matrix.json").read_text(encoding="utf-8"))
        assert "tag_wrapping_fixture+table" not in matrix["methods"]
        assert "ocr_destroying+direct" in matrix["methods"]

    def test_selected_methods(self, capsys, tmp_path):
        generate(capsys)
        code, _ = run(capsys, "evaluate", "--corpus", "corpus", "--out", "report", "--methods", "native_docx+table")
        assert code == EXIT_OK
        matrix = json.loads((tmp_path / "report" / "matrix.json").read_text(encoding="utf-8"))
        assert matrix["methods"] == ["native_docx+table"]

    def test_unknown_method(self, capsys):
        generate(capsys)
        code, _ = run(capsys, "evaluate", "--corpus", "corpus", "--methods", "native_docx+guess")
        assert code == EXIT_CONFIG

    def test_missing_corpus(self, capsys):
        code, _ = run(capsys, "evaluate", "--corpus", "nowhere")
        assert code == EXIT_IO


@pytest.mark.acceptance
class TestDeterminism:
    """Identical configuration and seed give byte-identical artifacts."""

    def test_generate_then_evaluate_twice(self, capsys, tmp_path):
        digests = []
        for name in ("first", "second"):
            generate(capsys, out=f"{name}/corpus", formats="docx,xlsx,pdf,transcript")
            code, result = run(capsys, "evaluate", "--corpus", f"{name}/corpus", "--out", f"{name}/report")
            assert code == EXIT_OK
            manifest = (tmp_path / name / "corpus" / "manifest.json").read_bytes()
            digests.append((manifest, result["files"]))
        assert digests[0] == digests[1]
