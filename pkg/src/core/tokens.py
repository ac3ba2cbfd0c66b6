"""Token count approximation and the virtual-clock cost model."""

import math
import re

from pydantic import BaseModel, Field

from src.core.lexicon import CJK_CLASS

_PIECE = re.compile(
    f"(?P<cjk>[{CJK_CLASS}])"
    f"|(?P<word>(?:(?![{CJK_CLASS}])\\w)+)"
    r"|(?P<punct>[^\s\w]+)"
)


def count_tokens(text: str) -> int:
    """Approximate output tokens.

    Each CJK ideograph is one token; every other word run and punctuation run
    costs one token per started 4 bytes of UTF-8. Whitespace is free.
    """
    total = 0
    for match in _PIECE.finditer(text):
        if match.lastgroup == "cjk":
            total += 1
        else:
            total += math.ceil(len(match.group().encode("utf-8")) / 4)
    return total


class CostModel(BaseModel):
    """Affine latency model: base + per_token * output tokens."""
    base_latency: float = Field(default=0.25, ge=0.0)
    per_token_latency: float = Field(default=0.02, ge=0.0)

    def latency(self, output_tokens: int) -> float:
        return self.base_latency + self.per_token_latency * output_tokens
