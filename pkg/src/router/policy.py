"""Routing policy: which (ingest backend, paradigm) to run per format.

A policy file maps each format to a primary method and an ordered list of
fallbacks; methods are written as ``<backend>+<paradigm>``:

    docx:
      primary: native_docx+table
      fallbacks: [native_docx+direct]
"""

from pathlib import Path
from typing import Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.errors import PolicyError, UnroutableFormat
from src.core.logger import get_logger
from src.extract.models import Paradigm
from src.ingest.models import DocumentFormat
from src.router.backends import IngestBackend, supports

logger = get_logger(__name__)

METHOD_SEPARATOR = "+"


class MethodConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    ingest_backend: IngestBackend
    paradigm: Paradigm

    @property
    def name(self) -> str:
        return f"{self.ingest_backend.value}{METHOD_SEPARATOR}{self.paradigm.value}"

    def supports(self, fmt: DocumentFormat) -> bool:
        return supports(self.ingest_backend, fmt)

    @classmethod
    def parse(cls, name: str) -> "MethodConfig":
        """Parse ``backend+paradigm``.

        Raises:
            ValueError: Unknown backend or paradigm.
        """
        backend, separator, paradigm = name.strip().partition(METHOD_SEPARATOR)
        if not separator:
            raise ValueError(f"method {name!r} is not of the form backend{METHOD_SEPARATOR}paradigm")
        try:
            return cls(ingest_backend=IngestBackend(backend), paradigm=Paradigm(paradigm))
        except ValueError:
            raise ValueError(f"unknown method {name!r}") from None

    def __str__(self) -> str:
        return self.name


def check_route(fmt: DocumentFormat, primary: MethodConfig, fallbacks: list[MethodConfig]):
    """Raises ValueError when a route breaks a policy invariant."""
    for method in [primary, *fallbacks]:
        if not method.supports(fmt):
            raise ValueError(f"{method.name} does not support {fmt.value}")
    if len(set(fallbacks)) != len(fallbacks):
        raise ValueError(f"duplicate fallback for {fmt.value}")
    if primary in fallbacks:
        raise ValueError(f"fallback chain for {fmt.value} repeats the primary {primary.name}")


class RoutingPolicy(BaseModel):
    model_config = ConfigDict(frozen=True)

    primary_choice: dict[DocumentFormat, MethodConfig]
    fallback_chain: dict[DocumentFormat, list[MethodConfig]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _consistent(self) -> "RoutingPolicy":
        if DocumentFormat.UNKNOWN in self.primary_choice:
            raise ValueError("the unknown format cannot be routed")
        for fmt in self.fallback_chain:
            if fmt not in self.primary_choice:
                raise ValueError(f"fallbacks for {fmt.value} without a primary choice")
        for fmt, primary in self.primary_choice.items():
            check_route(fmt, primary, self.fallback_chain.get(fmt, []))
        return self

    def chain(self, fmt: DocumentFormat) -> list[MethodConfig]:
        """Primary method followed by its fallbacks.

        Raises:
            UnroutableFormat: The policy has no route for fmt.
        """
        if fmt not in self.primary_choice:
            raise UnroutableFormat(f"no route for format {fmt.value}")
        return [self.primary_choice[fmt], *self.fallback_chain.get(fmt, [])]


def _method(backend: IngestBackend, paradigm: Paradigm) -> MethodConfig:
    return MethodConfig(ingest_backend=backend, paradigm=paradigm)


def default_policy(remote_ocr_configured: bool = False) -> RoutingPolicy:
    """Table paradigm on the structure-preserving backend for every format,
    falling back to direct extraction on the same backend."""
    lanes = {
        DocumentFormat.MARKDOWN: IngestBackend.NATIVE_MARKDOWN,
        DocumentFormat.DOCX: IngestBackend.NATIVE_DOCX,
        DocumentFormat.XLSX: IngestBackend.NATIVE_XLSX,
        DocumentFormat.PDF: IngestBackend.NATIVE_PDF,
        DocumentFormat.TRANSCRIPT: IngestBackend.OCR_PRESERVING,
    }
    primary = {fmt: _method(backend, Paradigm.TABLE) for fmt, backend in lanes.items()}
    fallbacks = {fmt: [_method(backend, Paradigm.DIRECT)] for fmt, backend in lanes.items()}
    if remote_ocr_configured:
        fallbacks[DocumentFormat.TRANSCRIPT].append(_method(IngestBackend.REMOTE_OCR, Paradigm.DIRECT))
    return RoutingPolicy(primary_choice=primary, fallback_chain=fallbacks)


def all_methods(remote_ocr_configured: bool = False) -> list[MethodConfig]:
    """Every backend and paradigm combination, backends in declaration order."""
    return [
        _method(backend, paradigm)
        for backend in IngestBackend
        if remote_ocr_configured or backend is not IngestBackend.REMOTE_OCR
        for paradigm in Paradigm
    ]


def _line(node: yaml.Node) -> int:
    return node.start_mark.line + 1


def _scalar(node: yaml.Node, source: str, what: str) -> str:
    if not isinstance(node, yaml.ScalarNode):
        raise PolicyError(f"{what} must be a string", source, _line(node))
    return str(node.value)


def _method_node(node: yaml.Node, source: str) -> MethodConfig:
    try:
        return MethodConfig.parse(_scalar(node, source, "method"))
    except ValueError as e:
        raise PolicyError(str(e), source, _line(node)) from None


def _route(key: yaml.Node, value: yaml.Node, source: str) -> tuple[DocumentFormat, MethodConfig, list[MethodConfig]]:
    name = _scalar(key, source, "format")
    try:
        fmt = DocumentFormat(name)
    except ValueError:
        raise PolicyError(f"unknown format {name!r}", source, _line(key)) from None
    if fmt is DocumentFormat.UNKNOWN:
        raise PolicyError("the unknown format cannot be routed", source, _line(key))
    if not isinstance(value, yaml.MappingNode):
        raise PolicyError(f"route for {name} must be a mapping", source, _line(value))

    primary: Optional[MethodConfig] = None
    fallbacks: list[MethodConfig] = []
    for field_key, field_value in value.value:
        field = _scalar(field_key, source, "route field")
        if field == "primary":
            primary = _method_node(field_value, source)
        elif field == "fallbacks":
            if not isinstance(field_value, yaml.SequenceNode):
                raise PolicyError("fallbacks must be a list", source, _line(field_value))
            fallbacks = [_method_node(item, source) for item in field_value.value]
        else:
            raise PolicyError(f"unknown route field {field!r}", source, _line(field_key))
    if primary is None:
        raise PolicyError(f"route for {name} has no primary", source, _line(key))
    try:
        check_route(fmt, primary, fallbacks)
    except ValueError as e:
        raise PolicyError(str(e), source, _line(key)) from None
    return fmt, primary, fallbacks


def parse_policy(text: str, source: str = "<policy>") -> RoutingPolicy:
    """Parse policy YAML, reporting errors with the offending line.

    Raises:
        PolicyError: Syntax or semantic error in the policy.
    """
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise PolicyError(f"invalid YAML: {e}", source, mark.line + 1 if mark else None) from e
    if root is None:
        raise PolicyError("policy is empty", source)
    if not isinstance(root, yaml.MappingNode):
        raise PolicyError("policy must map formats to routes", source, _line(root))

    primary: dict[DocumentFormat, MethodConfig] = {}
    fallbacks: dict[DocumentFormat, list[MethodConfig]] = {}
    for key, value in root.value:
        fmt, method, chain = _route(key, value, source)
        if fmt in primary:
            raise PolicyError(f"duplicate route for {fmt.value}", source, _line(key))
        primary[fmt] = method
        fallbacks[fmt] = chain
    return RoutingPolicy(primary_choice=primary, fallback_chain=fallbacks)


def load_policy(path: Path) -> RoutingPolicy:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise PolicyError(f"cannot read policy: {e}", str(path)) from e
    policy = parse_policy(text, source=str(path))
    logger.info(f"Loaded routing policy from {path}: {len(policy.primary_choice)} formats")
    return policy


def policy_to_yaml(policy: RoutingPolicy) -> str:
    data = {
        fmt.value: {
            "primary": primary.name,
            "fallbacks": [method.name for method in policy.fallback_chain.get(fmt, [])],
        }
        for fmt, primary in policy.primary_choice.items()
    }
    return yaml.safe_dump(data, sort_keys=False)
