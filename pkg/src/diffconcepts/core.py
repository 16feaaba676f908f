"""Comparison symbols, transition tokens and their composition algebra.

A token is the notation an interval carries for one attribute: the sequence of
changes (``<``, ``=``, ``>``) seen across it, with runs of the same change
absorbed into a single symbol.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum

from diffconcepts.config import DEFAULT_EPS
from diffconcepts.errors import InvalidArgumentError, InvalidValueError


class Symbol(str, Enum):
    """How a value changes from one sample to the next."""

    LT = "<"
    EQ = "="
    GT = ">"

    @property
    def code(self) -> int:
        return _SYMBOL_CODES[self]

    @classmethod
    def from_code(cls, code: int) -> Symbol:
        return _CODE_SYMBOLS[code]

    def __str__(self) -> str:
        return self.value


_SYMBOL_CODES = {Symbol.LT: -1, Symbol.EQ: 0, Symbol.GT: 1}
_CODE_SYMBOLS = {code: symbol for symbol, code in _SYMBOL_CODES.items()}


@dataclass(frozen=True)
class Token:
    """A collapsed, non-empty sequence of comparison symbols."""

    symbols: tuple[Symbol, ...]

    def __post_init__(self):
        if not self.symbols:
            raise InvalidArgumentError("a token needs at least one symbol")
        for symbol in self.symbols:
            if not isinstance(symbol, Symbol):
                raise InvalidArgumentError(f"not a comparison symbol: {symbol!r}")
        for left, right in zip(self.symbols, self.symbols[1:]):
            if left is right:
                raise InvalidArgumentError(
                    f"token {self.text!r} repeats an adjacent symbol"
                )

    @property
    def text(self) -> str:
        return "".join(symbol.value for symbol in self.symbols)

    @property
    def first(self) -> Symbol:
        return self.symbols[0]

    @property
    def last(self) -> Symbol:
        return self.symbols[-1]

    def __str__(self) -> str:
        return self.text

    def __len__(self) -> int:
        return len(self.symbols)

    @classmethod
    def parse(cls, text: str) -> Token:
        """Parse the canonical rendering (e.g. ``"=>="``)."""
        try:
            symbols = tuple(Symbol(char) for char in text)
        except ValueError as exc:
            raise InvalidArgumentError(f"invalid token text: {text!r}") from exc
        return cls(symbols)


@dataclass(frozen=True)
class QualifiedToken:
    """A token tagged with the attribute it describes, rendered ``attr:token``."""

    attribute: str
    token: Token

    def __post_init__(self):
        validate_attribute_name(self.attribute)

    @property
    def text(self) -> str:
        return f"{self.attribute}:{self.token.text}"

    def sort_key(self) -> tuple[str, str]:
        return (self.attribute, self.token.text)

    def __str__(self) -> str:
        return self.text

    @classmethod
    def parse(cls, text: str) -> QualifiedToken:
        attribute, sep, token_text = text.partition(":")
        if not sep:
            raise InvalidArgumentError(f"qualified token needs ':', got {text!r}")
        return cls(attribute, Token.parse(token_text))


def validate_attribute_name(name: str) -> str:
    """Return ``name`` if it can be used as an attribute, raise otherwise."""
    if not isinstance(name, str) or not name:
        raise InvalidArgumentError("attribute names must be non-empty strings")
    if ":" in name:
        raise InvalidArgumentError(f"attribute name {name!r} must not contain ':'")
    return name


def compare_values(prev: float, next: float, eps: float = DEFAULT_EPS) -> Symbol:
    """Describe the change from ``prev`` to ``next``.

    Args:
        prev: Earlier value
        next: Later value
        eps: Absolute tolerance; differences within it count as equal
            (1e-9 unless given)

    Returns:
        GT if next exceeds prev by more than eps, LT if it falls short by more
        than eps, EQ otherwise.
    """
    for name, value in (("prev", prev), ("next", next), ("eps", eps)):
        if not math.isfinite(value):
            raise InvalidValueError(f"{name} must be finite, got {value!r}")
    if eps < 0:
        raise InvalidValueError(f"eps must be non-negative, got {eps!r}")

    if next > prev + eps:
        return Symbol.GT
    if next < prev - eps:
        return Symbol.LT
    return Symbol.EQ


def collapse(symbols: Iterable[Symbol]) -> Token:
    """Absorb every run of equal symbols into one."""
    collapsed: list[Symbol] = []
    for symbol in symbols:
        symbol = Symbol(symbol)
        if not collapsed or collapsed[-1] is not symbol:
            collapsed.append(symbol)
    if not collapsed:
        raise InvalidArgumentError("cannot collapse an empty symbol sequence")
    return Token(tuple(collapsed))


def compose_tokens(t1: Token, t2: Token) -> Token:
    """Token of the union of two contiguous intervals.

    The junction symbol is written once when both sides agree on it.
    """
    if t1.last is t2.first:
        return Token(t1.symbols + t2.symbols[1:])
    return Token(t1.symbols + t2.symbols)


_token_cache: dict[tuple[int, ...], Token] = {}


def token_of(codes: Sequence[int]) -> Token:
    """Token for an already collapsed sequence of integer codes (-1, 0, 1).

    Tokens are interned, so repeated lookups return the same object.
    """
    key = tuple(codes)
    token = _token_cache.get(key)
    if token is None:
        token = Token(tuple(Symbol.from_code(code) for code in key))
        _token_cache[key] = token
    return token
