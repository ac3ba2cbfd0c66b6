"""Configuration for copyheavy-extract.

Sources, highest precedence first: explicit overrides (command-line flags),
environment variables prefixed ``COPYHEAVY_`` (nested with ``__``), the YAML
config file, model defaults.
"""

from contextvars import ContextVar
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Type

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator
from pydantic.fields import FieldInfo
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from src.core.errors import ConfigInvalid
from src.core.tokens import CostModel
from src.ingest.models import DocumentFormat

DEFAULT_CONFIG_PATH = "config.yaml"


class ClockMode(str, Enum):
    VIRTUAL = "virtual"
    WALL = "wall"


class CorpusSettings(BaseModel):
    """Corpus generation parameters."""
    seed: Optional[int] = None
    docs_per_format: int = Field(default=100, ge=1)
    entries_min: int = Field(default=10, ge=1)
    entries_max: int = Field(default=30, ge=1)
    formats: List[DocumentFormat] = [
        DocumentFormat.DOCX,
        DocumentFormat.XLSX,
        DocumentFormat.PDF,
        DocumentFormat.TRANSCRIPT,
    ]

    @field_validator("formats")
    @classmethod
    def _known_formats(cls, formats: List[DocumentFormat]) -> List[DocumentFormat]:
        if DocumentFormat.UNKNOWN in formats:
            raise ValueError("'unknown' is not a generatable format")
        if not formats:
            raise ValueError("at least one format is required")
        return list(dict.fromkeys(formats))

    @model_validator(mode="after")
    def _entry_bounds(self) -> "CorpusSettings":
        if self.entries_min > self.entries_max:
            raise ValueError(f"entries_min ({self.entries_min}) exceeds entries_max ({self.entries_max})")
        return self


class GatewaySettings(BaseModel):
    """LLM gateway backend selection."""
    backend: Literal["reference", "remote"] = "reference"
    endpoint: Optional[str] = None
    model: str = "qwen2.5-7b-instruct"
    timeout: float = Field(default=120.0, gt=0)
    max_in_flight: int = Field(default=8, ge=1)
    cost: CostModel = CostModel()

    @model_validator(mode="after")
    def _remote_needs_endpoint(self) -> "GatewaySettings":
        if self.backend == "remote" and not self.endpoint:
            raise ValueError("remote gateway backend requires an endpoint")
        return self


class OcrProfileSettings(BaseModel):
    char_noise_rate: float = Field(ge=0.0, le=1.0)
    simulated_ocr_seconds: float = Field(ge=0.0)


class OcrSettings(BaseModel):
    """Simulated OCR lanes and the optional remote OCR service."""
    preserving: OcrProfileSettings = OcrProfileSettings(char_noise_rate=0.0015, simulated_ocr_seconds=0.3)
    destroying: OcrProfileSettings = OcrProfileSettings(char_noise_rate=0.02, simulated_ocr_seconds=1.2)
    noise_seed: Optional[int] = None
    shuffle_window: float = Field(default=3.0, ge=0.0)
    remote_endpoint: Optional[str] = None
    remote_timeout: float = Field(default=30.0, gt=0)


DEFAULT_INGEST_COSTS = {
    "native_markdown": 0.0,
    "native_docx": 0.1,
    "native_xlsx": 0.0,
    "native_pdf": 1.3,
    "tag_wrapping_fixture": 1.5,
    "remote_ocr": 0.3,
}

_active_yaml_path: ContextVar[Optional[Path]] = ContextVar("_active_yaml_path", default=None)


def read_yaml_file(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigInvalid(f"{path}: invalid YAML: {e}") from e
    except OSError as e:
        raise ConfigInvalid(f"{path}: cannot read config: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigInvalid(f"{path}: top level must be a mapping")
    return data


class YamlConfigSettingsSource(PydanticBaseSettingsSource):
    """Settings source reading the YAML config file selected by load_config."""

    def __init__(self, settings_cls: Type[BaseSettings], yaml_path: Optional[Path]):
        super().__init__(settings_cls)
        self._data = read_yaml_file(yaml_path) if yaml_path is not None else {}

    def get_field_value(self, field: FieldInfo, field_name: str) -> Tuple[Any, str, bool]:
        return self._data.get(field_name), field_name, False

    def __call__(self) -> Dict[str, Any]:
        return {
            name: self._data[name]
            for name in self.settings_cls.model_fields
            if name in self._data
        }


class AppConfig(BaseSettings):
    """Main configuration."""
    model_config = SettingsConfigDict(
        env_prefix="COPYHEAVY_",
        env_nested_delimiter="__",
        extra="ignore",
    )

    seed: int = 20240501
    workers: int = Field(default=4, ge=1)
    clock: ClockMode = ClockMode.VIRTUAL
    corpus_dir: Path = Path("corpus")
    report_dir: Path = Path("report")
    policy_path: Optional[Path] = None
    corpus: CorpusSettings = CorpusSettings()
    gateway: GatewaySettings = GatewaySettings()
    ocr: OcrSettings = OcrSettings()
    ingest_costs: Dict[str, float] = dict(DEFAULT_INGEST_COSTS)

    @field_validator("ingest_costs")
    @classmethod
    def _fill_costs(cls, costs: Dict[str, float]) -> Dict[str, float]:
        if any(value < 0 for value in costs.values()):
            raise ValueError("ingest costs must be >= 0")
        return {**DEFAULT_INGEST_COSTS, **costs}

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        return (
            init_settings,
            env_settings,
            YamlConfigSettingsSource(settings_cls, _active_yaml_path.get()),
        )

    @property
    def corpus_seed(self) -> int:
        return self.corpus.seed if self.corpus.seed is not None else self.seed

    @property
    def noise_seed(self) -> int:
        return self.ocr.noise_seed if self.ocr.noise_seed is not None else self.seed

    def effective_yaml(self) -> str:
        """Effective configuration as YAML, for reproducibility dumps."""
        return yaml.safe_dump(self.model_dump(mode="json"), sort_keys=False, allow_unicode=True)

    def digest_payload(self) -> Dict[str, Any]:
        """Settings that change evaluation results; paths and worker counts excluded."""
        data = self.model_dump(mode="json", exclude={"workers", "corpus_dir", "report_dir", "policy_path"})
        data["gateway"].pop("timeout", None)
        data["gateway"].pop("max_in_flight", None)
        return data


def load_config(config_path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> AppConfig:
    """Load configuration from YAML, environment and explicit overrides.

    A missing default config file falls back to model defaults; a missing
    explicitly named file is a configuration error.
    """
    if config_path is None:
        path = Path(DEFAULT_CONFIG_PATH)
        yaml_path = path if path.exists() else None
    else:
        yaml_path = Path(config_path)
        if not yaml_path.exists():
            raise ConfigInvalid(f"config file not found: {yaml_path}")

    overrides = dict(overrides or {})
    if "seed" in overrides:
        # A seed given on the command line drives every seeded stage.
        overrides.setdefault("corpus", {}).setdefault("seed", overrides["seed"])
        overrides.setdefault("ocr", {}).setdefault("noise_seed", overrides["seed"])

    token = _active_yaml_path.set(yaml_path)
    try:
        return AppConfig(**overrides)
    except ValidationError as e:
        raise ConfigInvalid(_format_validation_error(e)) from e
    finally:
        _active_yaml_path.reset(token)


def _format_validation_error(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "config"
        parts.append(f"{location}: {item['msg']}")
    return "invalid configuration: " + "; ".join(parts)
