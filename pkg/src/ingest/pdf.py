"""Reader for uncompressed PDFs with text-showing content streams.

Covers the subset the corpus writer emits: indirect objects, page resources
naming simple and Type0 (UTF-16BE) fonts, and content streams built from the
text object, positioning and showing operators.
"""

import re
import time
from dataclasses import dataclass, field
from typing import Optional, Union

from src.core.errors import MalformedInput, UnsupportedPdfFeature
from src.core.logger import get_logger
from src.ingest.layout import PositionedRun, grid_from_lines, group_lines, linearize
from src.ingest.models import DocumentFormat, StructuredText, structured

logger = get_logger(__name__)

RE_OBJECT = re.compile(rb"(\d+)\s+(\d+)\s+obj\b(.*?)\bendobj", re.S)
RE_STREAM_START = re.compile(rb"\bstream\r?\n")
RE_LENGTH = re.compile(rb"/Length\s+(\d+)(?!\d)(?!\s+\d+\s+R)")
RE_REF = re.compile(rb"(\d+)\s+\d+\s+R")
RE_FONT_ENTRY = re.compile(rb"/([^\s/<>\[\]()]+)\s+(\d+)\s+\d+\s+R")

IDENTITY = (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)
PAGE_SPAN = 100000.0

_WHITESPACE = b" \t\r\n\f\x00"
_ESCAPES = {ord("n"): b"\n", ord("r"): b"\r", ord("t"): b"\t", ord("b"): b"\b", ord("f"): b"\f"}


@dataclass
class PdfObject:
    number: int
    dictionary: bytes
    stream: Optional[bytes] = None


@dataclass
class PdfString:
    data: bytes


@dataclass
class Operator:
    name: str


Operand = Union[float, str, PdfString, list]


# Object layer

def _read_objects(payload: bytes) -> dict[int, PdfObject]:
    objects = {}
    for match in RE_OBJECT.finditer(payload):
        number = int(match.group(1))
        body = match.group(3)
        start = RE_STREAM_START.search(body)
        if start is None:
            objects[number] = PdfObject(number, body)
            continue
        dictionary = body[:start.start()]
        data_start = start.end()
        length = RE_LENGTH.search(dictionary)
        if length is not None:
            data = body[data_start:data_start + int(length.group(1))]
        else:
            end = body.rfind(b"endstream")
            data = body[data_start:end if end != -1 else len(body)].rstrip(b"\r\n")
        objects[number] = PdfObject(number, dictionary, data)
    return objects


def _balanced_dict(data: bytes, start: int) -> bytes:
    depth = 0
    index = start
    while index < len(data) - 1:
        pair = data[index:index + 2]
        if pair == b"<<":
            depth += 1
            index += 2
            continue
        if pair == b">>":
            depth -= 1
            index += 2
            if depth == 0:
                return data[start:index]
            continue
        index += 1
    return data[start:]


def _entry(dictionary: bytes, key: bytes, objects: dict[int, PdfObject]) -> Optional[bytes]:
    """Raw value for key, following one indirect reference."""
    match = re.search(rb"/" + key + rb"(?![A-Za-z0-9])\s*", dictionary)
    if match is None:
        return None
    rest = dictionary[match.end():]
    if rest.startswith(b"<<"):
        return _balanced_dict(rest, 0)
    ref = RE_REF.match(rest)
    if ref is not None:
        target = objects.get(int(ref.group(1)))
        return target.dictionary if target is not None else None
    if rest.startswith(b"["):
        return rest[:rest.find(b"]") + 1]
    token = re.match(rb"[^\s/<>\[\]]*(/[^\s/<>\[\]]+)?", rest)
    return token.group() if token else None


def _pages(objects: dict[int, PdfObject]) -> list[PdfObject]:
    pages = [
        obj for number, obj in sorted(objects.items())
        if re.search(rb"/Type\s*/Page(?![A-Za-z])", obj.dictionary)
    ]
    for obj in objects.values():
        if re.search(rb"/Type\s*/Pages(?![A-Za-z])", obj.dictionary):
            kids = re.search(rb"/Kids\s*\[([^\]]*)\]", obj.dictionary)
            if kids is None:
                continue
            order = [int(n) for n in RE_REF.findall(kids.group(1))]
            rank = {number: index for index, number in enumerate(order)}
            pages.sort(key=lambda page: rank.get(page.number, len(rank)))
            break
    return pages


def _page_fonts(page: PdfObject, objects: dict[int, PdfObject]) -> dict[str, bool]:
    """Font resource name -> whether it is a two-byte Type0 font."""
    resources = _entry(page.dictionary, b"Resources", objects)
    if resources is None:
        return {}
    fonts = _entry(resources, b"Font", objects)
    if fonts is None:
        return {}
    result = {}
    for name, number in RE_FONT_ENTRY.findall(fonts):
        font = objects.get(int(number))
        two_byte = font is not None and re.search(rb"/Subtype\s*/Type0", font.dictionary) is not None
        result[name.decode("latin-1")] = two_byte
    return result


def _page_streams(page: PdfObject, objects: dict[int, PdfObject]) -> list[bytes]:
    match = re.search(rb"/Contents\s*(\[[^\]]*\]|\d+\s+\d+\s+R)", page.dictionary)
    if match is None:
        return []
    streams = []
    for number in RE_REF.findall(match.group(1)):
        obj = objects.get(int(number))
        if obj is None or obj.stream is None:
            raise MalformedInput(f"content stream object {int(number)} missing")
        if b"/Filter" in obj.dictionary:
            raise UnsupportedPdfFeature(f"content stream {obj.number} is compressed")
        streams.append(obj.stream)
    return streams


# Content stream layer

def _literal_string(data: bytes, index: int) -> tuple[bytes, int]:
    out = bytearray()
    depth = 1
    index += 1
    while index < len(data):
        char = data[index]
        if char == ord("\\"):
            index += 1
            if index >= len(data):
                break
            escaped = data[index]
            if escaped in _ESCAPES:
                out += _ESCAPES[escaped]
            elif ord("0") <= escaped <= ord("7"):
                digits = re.match(rb"[0-7]{1,3}", data[index:index + 3]).group()
                out.append(int(digits, 8) & 0xFF)
                index += len(digits) - 1
            elif escaped == ord("\r"):
                if data[index + 1:index + 2] == b"\n":
                    index += 1
            elif escaped != ord("\n"):
                out.append(escaped)
        elif char == ord("("):
            depth += 1
            out.append(char)
        elif char == ord(")"):
            depth -= 1
            if depth == 0:
                return bytes(out), index + 1
            out.append(char)
        else:
            out.append(char)
        index += 1
    raise MalformedInput("unterminated string in content stream")


def tokenize(data: bytes) -> list[Union[Operand, Operator]]:
    """Operands and operators of a content stream, arrays nested as lists."""
    stack: list[list] = [[]]
    index = 0
    while index < len(data):
        char = data[index]
        if char in _WHITESPACE:
            index += 1
        elif char == ord("%"):
            end = data.find(b"\n", index)
            index = len(data) if end == -1 else end
        elif char == ord("("):
            value, index = _literal_string(data, index)
            stack[-1].append(PdfString(value))
        elif data[index:index + 2] == b"<<" or data[index:index + 2] == b">>":
            index += 2
        elif char == ord("<"):
            end = data.find(b">", index)
            if end == -1:
                raise MalformedInput("unterminated hex string in content stream")
            digits = re.sub(rb"\s", b"", data[index + 1:end])
            if len(digits) % 2:
                digits += b"0"
            try:
                stack[-1].append(PdfString(bytes.fromhex(digits.decode("ascii"))))
            except ValueError as e:
                raise MalformedInput(f"bad hex string: {e}") from e
            index = end + 1
        elif char == ord("["):
            stack.append([])
            index += 1
        elif char == ord("]"):
            if len(stack) == 1:
                raise MalformedInput("unbalanced array in content stream")
            array = stack.pop()
            stack[-1].append(array)
            index += 1
        elif char == ord("/"):
            match = re.match(rb"/([^\s()<>\[\]{}/%]*)", data[index:])
            stack[-1].append(match.group(1).decode("latin-1"))
            index += match.end()
        else:
            match = re.match(rb"[^\s()<>\[\]{}/%]+", data[index:])
            if match is None:
                raise MalformedInput(f"unexpected byte {chr(char)!r} in content stream")
            word = match.group()
            index += match.end()
            try:
                stack[-1].append(float(word))
            except ValueError:
                stack[-1].append(Operator(word.decode("latin-1")))
    if len(stack) != 1:
        raise MalformedInput("unbalanced array in content stream")
    return stack[0]


def _multiply(m1: tuple, m2: tuple) -> tuple:
    a1, b1, c1, d1, e1, f1 = m1
    a2, b2, c2, d2, e2, f2 = m2
    return (
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
        e1 * a2 + f1 * c2 + e2,
        e1 * b2 + f1 * d2 + f2,
    )


@dataclass
class _TextState:
    fonts: dict[str, bool]
    ctm: tuple = IDENTITY
    text_matrix: tuple = IDENTITY
    line_matrix: tuple = IDENTITY
    leading: float = 0.0
    two_byte: bool = False
    moved: bool = True
    saved: list = field(default_factory=list)
    runs: list = field(default_factory=list)

    def move(self, tx: float, ty: float):
        self.line_matrix = _multiply((1.0, 0.0, 0.0, 1.0, tx, ty), self.line_matrix)
        self.text_matrix = self.line_matrix
        self.moved = True

    def show(self, raw: bytes):
        text = raw.decode("utf-16-be", errors="replace") if self.two_byte else raw.decode("latin-1")
        if not self.moved and self.runs:
            x, y, previous = self.runs[-1]
            self.runs[-1] = (x, y, previous + text)
            return
        x, y = _multiply(self.text_matrix, self.ctm)[4:6]
        self.runs.append((x, y, text))
        self.moved = False


def _numbers(operands: list, count: int) -> list[float]:
    values = operands[-count:] if count else []
    if len(values) != count or not all(isinstance(v, float) for v in values):
        raise MalformedInput(f"expected {count} numeric operands")
    return values


def _run_stream(tokens: list, state: _TextState):
    operands: list = []
    for token in tokens:
        if not isinstance(token, Operator):
            operands.append(token)
            continue
        op = token.name
        if op == "BT":
            state.text_matrix = state.line_matrix = IDENTITY
            state.moved = True
        elif op == "q":
            state.saved.append(state.ctm)
        elif op == "Q":
            state.ctm = state.saved.pop() if state.saved else IDENTITY
        elif op == "cm":
            state.ctm = _multiply(tuple(_numbers(operands, 6)), state.ctm)
        elif op == "Tf":
            name = operands[-2] if len(operands) >= 2 and isinstance(operands[-2], str) else ""
            state.two_byte = state.fonts.get(name, False)
        elif op == "TL":
            state.leading = _numbers(operands, 1)[0]
        elif op == "Td":
            state.move(*_numbers(operands, 2))
        elif op == "TD":
            tx, ty = _numbers(operands, 2)
            state.leading = -ty
            state.move(tx, ty)
        elif op == "Tm":
            state.text_matrix = state.line_matrix = tuple(_numbers(operands, 6))
            state.moved = True
        elif op == "T*":
            state.move(0.0, -state.leading)
        elif op in ("Tj", "'", '"'):
            if op != "Tj":
                state.move(0.0, -state.leading)
            if operands and isinstance(operands[-1], PdfString):
                state.show(operands[-1].data)
        elif op == "TJ":
            if operands and isinstance(operands[-1], list):
                state.show(b"".join(item.data for item in operands[-1] if isinstance(item, PdfString)))
        operands = []


def extract_runs(payload: bytes) -> list[PositionedRun]:
    """Positioned text runs of every page, in top-down page coordinates."""
    if not payload.startswith(b"%PDF-"):
        raise MalformedInput("missing %PDF- header")
    objects = _read_objects(payload)
    pages = _pages(objects)
    if not pages:
        raise MalformedInput("no page objects found")

    runs = []
    for page_index, page in enumerate(pages):
        state = _TextState(fonts=_page_fonts(page, objects))
        for stream in _page_streams(page, objects):
            _run_stream(tokenize(stream), state)
        offset = page_index * PAGE_SPAN
        runs.extend(PositionedRun(x, offset - y, text) for x, y, text in state.runs if text.strip())
    return runs


def parse_pdf(payload: bytes) -> StructuredText:
    """Parse text runs into lines and a header-aligned table grid.

    Raises:
        MalformedInput: Structural problems or no text at all.
        UnsupportedPdfFeature: A content stream is compressed.
    """
    started = time.perf_counter()
    runs = extract_runs(payload)
    if not runs:
        raise MalformedInput("pdf has no text")
    lines = group_lines(runs)
    table = grid_from_lines(lines)
    if table is None:
        logger.debug("pdf column inference failed; returning symbolic text only")
    return structured(linearize(lines), table, DocumentFormat.PDF, time.perf_counter() - started)
