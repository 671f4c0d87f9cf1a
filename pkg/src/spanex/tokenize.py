"""Whitespace/punctuation word tokenizer with character-offset bookkeeping.

The annotation format is token-based while brat standoff files address raw
characters, so the converter needs a deterministic tokenizer that can map a
character range back onto a token range.
"""
from __future__ import annotations

import re

from .types import SpanexError

# A token is a maximal run of word characters, or a single non-space
# non-word character (so "don't" -> ["don", "'", "t"]).
_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


class OffsetError(SpanexError):
    """A character range does not line up with any token range."""


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def tokenize_with_offsets(text: str) -> tuple[list[str], list[tuple[int, int]]]:
    """Return (tokens, [(char_start, char_end), ...]) for ``text``."""
    tokens: list[str] = []
    offsets: list[tuple[int, int]] = []
    for m in _TOKEN_RE.finditer(text):
        tokens.append(m.group(0))
        offsets.append((m.start(), m.end()))
    return tokens, offsets


def char_range_to_token_range(
    offsets: list[tuple[int, int]], char_start: int, char_end: int
) -> tuple[int, int]:
    """Map a character range to the token range it covers.

    A token is covered when its character extent overlaps ``[char_start,
    char_end)``.  Raises :class:`OffsetError` when the range covers no token
    at all (e.g. it falls entirely inside whitespace).
    """
    if char_end <= char_start:
        raise OffsetError(f"empty character range [{char_start}, {char_end})")
    first = last = None
    for i, (s, e) in enumerate(offsets):
        if s < char_end and char_start < e:
            if first is None:
                first = i
            last = i
    if first is None or last is None:
        raise OffsetError(f"character range [{char_start}, {char_end}) covers no token")
    return first, last + 1


def detokenize(tokens: list[str] | tuple[str, ...]) -> str:
    """Join tokens with single spaces (the canonical rendering)."""
    return " ".join(tokens)


def token_char_offsets(tokens: list[str] | tuple[str, ...]) -> list[tuple[int, int]]:
    """Character offsets of each token in the canonical space-joined text."""
    offsets = []
    pos = 0
    for tok in tokens:
        offsets.append((pos, pos + len(tok)))
        pos += len(tok) + 1
    return offsets
