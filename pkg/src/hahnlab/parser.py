"""
Parser for exponent and series literals.

Exponents are rational combinations of basis symbols, e.g. ``(-1/9)*pi + 2/3``
or ``-r2``. Series are sums of terms ``coef*t^(exponent)`` and named
constructions such as ``a(2)`` or ``theta`` supplied by a scenario.
"""

import logging
import re
from difflib import get_close_matches
from fractions import Fraction
from typing import Callable, Dict, List, NamedTuple, NoReturn, Optional, Tuple

from hahnlab.coefficients import FFElem, FieldSpec
from hahnlab.exponents import UNIT, BasisContext, Exponent
from hahnlab.series import HahnSeries, monomial, series_scale, series_sum, zero_series

logger = logging.getLogger(__name__)


class Recipe(NamedTuple):
    """A named series; indexed recipes are written as ``name(k)``."""

    build: Callable[..., HahnSeries]
    indexed: bool = False


Linear = Dict[str, Fraction]

_TOKEN = re.compile(r'\s*(?:(\d+)|([A-Za-z_]\w*)|(.))')


class LiteralSyntaxError(ValueError):
    """A literal failed to parse; ``position`` is the offending character offset."""

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}: {text[:position]}>>>{text[position:]}")


class Token(NamedTuple):
    kind: str
    value: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            break
        number, name, op = match.groups()
        start = match.start(match.lastindex) if match.lastindex else pos
        if number is not None:
            tokens.append(Token('num', number, start))
        elif name is not None:
            tokens.append(Token('name', name, start))
        elif op is not None:
            if op not in '+-*/^(),':
                raise LiteralSyntaxError(f"Unexpected character '{op}'", text, start)
            tokens.append(Token('op', op, start))
        pos = match.end()
    tokens.append(Token('end', '', len(text)))
    return tokens


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.i]

    def accept(self, value: str) -> bool:
        if self.current.kind == 'op' and self.current.value == value:
            self.i += 1
            return True
        return False

    def expect(self, value: str) -> None:
        if not self.accept(value):
            self.fail(f"Expected '{value}'")

    def fail(self, message: str) -> NoReturn:
        raise LiteralSyntaxError(message, self.text, self.current.position)


def _lin_add(a: Linear, b: Linear, sign: int = 1) -> Linear:
    out = dict(a)
    for s, q in b.items():
        out[s] = out.get(s, Fraction(0)) + sign * q
    return {s: q for s, q in out.items() if q}


def _as_rational(cur: _Cursor, x: Linear) -> Fraction:
    if set(x) - {UNIT}:
        cur.fail("Exponents are linear: only rational factors may multiply or divide")
    return x.get(UNIT, Fraction(0))


def _exp_expr(cur: _Cursor, context: BasisContext) -> Linear:
    sign = 1
    if cur.accept('-'):
        sign = -1
    else:
        cur.accept('+')
    total = {s: sign * q for s, q in _exp_term(cur, context).items()}
    while True:
        if cur.accept('+'):
            total = _lin_add(total, _exp_term(cur, context))
        elif cur.accept('-'):
            total = _lin_add(total, _exp_term(cur, context), -1)
        else:
            return total


def _exp_term(cur: _Cursor, context: BasisContext) -> Linear:
    value = _exp_factor(cur, context)
    while True:
        if cur.accept('*'):
            right = _exp_factor(cur, context)
            if set(value) - {UNIT}:
                q = _as_rational(cur, right)
                value = {s: c * q for s, c in value.items()}
            else:
                q = _as_rational(cur, value)
                value = {s: c * q for s, c in right.items()}
        elif cur.accept('/'):
            q = _as_rational(cur, _exp_factor(cur, context))
            if q == 0:
                cur.fail("Division by zero in exponent")
            value = {s: c / q for s, c in value.items()}
        else:
            return {s: c for s, c in value.items() if c}


def _exp_factor(cur: _Cursor, context: BasisContext) -> Linear:
    tok = cur.current
    if cur.accept('-'):
        return {s: -q for s, q in _exp_factor(cur, context).items()}
    if cur.accept('('):
        inner = _exp_expr(cur, context)
        cur.expect(')')
        return inner
    if tok.kind == 'num':
        cur.i += 1
        return {UNIT: Fraction(int(tok.value))}
    if tok.kind == 'name':
        if not context.is_symbol(tok.value):
            cur.fail(f"Unknown basis symbol '{tok.value}' (reserved: pi, r2, r3, ...)")
        cur.i += 1
        return {tok.value: Fraction(1)}
    cur.fail("Expected a number, a basis symbol or '('")


def parse_exponent(text: str, context: BasisContext) -> Exponent:
    """
    Parse an exponent such as ``(-1/9)*pi + (2/3)``.

    Raises:
        LiteralSyntaxError: With the failing position
    """
    cur = _Cursor(text)
    value = _exp_expr(cur, context)
    if cur.current.kind != 'end':
        cur.fail("Unexpected trailing input")
    return context.exponent(value)


def _field_poly(cur: _Cursor, field: FieldSpec) -> FFElem:
    """Parse a field element written as a polynomial in u, e.g. ``2*u+1``."""
    total = field.zero()
    sign = -1 if cur.accept('-') else 1
    while True:
        coeff, power = 1, 0
        tok = cur.current
        if tok.kind == 'num':
            cur.i += 1
            coeff = int(tok.value)
            if cur.accept('*'):
                tok = cur.current
            else:
                total = total + field.element(sign * coeff)
                tok = None
        if tok is not None:
            if tok.kind != 'name' or tok.value != 'u':
                cur.fail("Expected an integer or the field generator 'u'")
            cur.i += 1
            power = 1
            if cur.accept('^'):
                exp_tok = cur.current
                if exp_tok.kind != 'num':
                    cur.fail("Expected an integer power of u")
                cur.i += 1
                power = int(exp_tok.value)
            total = total + field.gen() ** power * (sign * coeff)
        if cur.accept('+'):
            sign = 1
        elif cur.accept('-'):
            sign = -1
        else:
            return total


class SeriesParser:
    """
    Recursive-descent parser for series literals over one field and basis.

    Args:
        field: Coefficient field
        context: Basis context for exponents
        names: Named recipes; a recipe takes an integer argument when written
            as ``name(k)``
    """

    def __init__(self, field: FieldSpec, context: BasisContext, names: Optional[Dict[str, Recipe]] = None):
        self.field = field
        self.context = context
        self.names = names or {}

    def parse(self, text: str) -> HahnSeries:
        cur = _Cursor(text)
        if cur.current.kind == 'end':
            cur.fail("Empty series literal")
        parts = [self._signed_term(cur, first=True)]
        while cur.current.kind != 'end':
            parts.append(self._signed_term(cur, first=False))
        parts = [p for p in parts if not (p.finite and p.label == '0')]
        if not parts:
            return zero_series(self.field, self.context)
        result = series_sum(parts, label=text.strip()) if len(parts) > 1 else parts[0]
        logger.debug("Parsed series literal %r", text)
        return result

    def _signed_term(self, cur: _Cursor, first: bool) -> HahnSeries:
        if cur.accept('-'):
            sign = -1
        elif cur.accept('+') or first:
            sign = 1
        else:
            cur.fail("Expected '+' or '-' between terms")
        coeff, series = self._term(cur)
        return series_scale(series, coeff * sign) if series is not None else monomial(
            coeff * sign, self.context.zero(), self.field)

    def _term(self, cur: _Cursor) -> Tuple[FFElem, Optional[HahnSeries]]:
        coeff = self.field.one()
        tok = cur.current
        if tok.kind == 'num' or (tok.kind == 'op' and tok.value == '('):
            coeff = self._coefficient(cur)
            if not cur.accept('*'):
                return coeff, None
        return coeff, self._atom(cur)

    def _coefficient(self, cur: _Cursor) -> FFElem:
        if cur.accept('('):
            value = _field_poly(cur, self.field)
            cur.expect(')')
            return value
        tok = cur.current
        cur.i += 1
        return self.field.element(int(tok.value))

    def _atom(self, cur: _Cursor) -> HahnSeries:
        tok = cur.current
        if tok.kind != 'name':
            cur.fail("Expected 't' or a named series")
        cur.i += 1
        if tok.value == 't':
            e = self.context.zero()
            if cur.accept('^'):
                if cur.accept('('):
                    e = self.context.exponent(_exp_expr(cur, self.context))
                    cur.expect(')')
                else:
                    e = self.context.exponent(_exp_factor(cur, self.context))
            return monomial(self.field.one(), e, self.field)
        recipe = self.names.get(tok.value)
        if recipe is None:
            hint = get_close_matches(tok.value, list(self.names), n=3, cutoff=0.5)
            message = f"Unknown series name '{tok.value}'"
            if hint:
                message += f". Did you mean: {', '.join(hint)}?"
            elif self.names:
                message += f". Available: {', '.join(sorted(self.names))}"
            raise ValueError(message)
        if not recipe.indexed:
            if cur.current.kind == 'op' and cur.current.value == '(':
                cur.fail(f"'{tok.value}' takes no index")
            return recipe.build()
        cur.expect('(')
        arg = cur.current
        if arg.kind != 'num':
            cur.fail("Expected an integer index")
        cur.i += 1
        cur.expect(')')
        return recipe.build(int(arg.value))


def parse_series_literal(
    text: str,
    field: FieldSpec,
    context: BasisContext,
    names: Optional[Dict[str, Recipe]] = None,
) -> HahnSeries:
    """
    Parse a series literal.

    Raises:
        LiteralSyntaxError: Malformed literal, with position
        ValueError: Unknown named series
    """
    return SeriesParser(field, context, names).parse(text)
