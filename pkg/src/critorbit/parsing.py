"""Polynomial expression parser and canonical printer.

Grammar (whitespace insensitive, no implicit multiplication):

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | power
    power  := atom ('^' INT)?
    atom   := INT | 'x' | '(' expr ')'

Exponents are nonnegative integer literals.  "10x" is a syntax error;
write "10*x".
"""

from __future__ import annotations

from .polys import IntPoly


class PolyParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list[tuple[str, object, int]] = []
        self._scan()
        self.idx = 0

    def _scan(self):
        t = self.text
        i = 0
        while i < len(t):
            ch = t[i]
            if ch.isspace():
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < len(t) and t[j].isdigit():
                    j += 1
                self.tokens.append(("INT", int(t[i:j]), i))
                i = j
                continue
            if ch == "x":
                self.tokens.append(("X", None, i))
                i += 1
                continue
            if ch in "+-*^()":
                kind = {"+": "PLUS", "-": "MINUS", "*": "STAR", "^": "CARET", "(": "LP", ")": "RP"}[ch]
                self.tokens.append((kind, None, i))
                i += 1
                continue
            raise PolyParseError(f"unexpected character {ch!r}", i)
        self.tokens.append(("EOF", None, len(t)))

    def peek(self):
        return self.tokens[self.idx]

    def next(self):
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise PolyParseError(f"expected {kind}, found {tok[0]}", tok[2])
        return tok


def parse_poly(text: str) -> IntPoly:
    """Parse an integer polynomial in x; raises PolyParseError with position."""
    tz = _Tokenizer(text)
    poly = _expr(tz)
    tok = tz.peek()
    if tok[0] != "EOF":
        raise PolyParseError(f"unexpected {tok[0]} after expression", tok[2])
    return poly


def _expr(tz: _Tokenizer) -> IntPoly:
    acc = _term(tz)
    while tz.peek()[0] in ("PLUS", "MINUS"):
        op = tz.next()[0]
        rhs = _term(tz)
        acc = acc + rhs if op == "PLUS" else acc - rhs
    return acc


def _term(tz: _Tokenizer) -> IntPoly:
    acc = _unary(tz)
    while tz.peek()[0] == "STAR":
        tz.next()
        acc = acc * _unary(tz)
    return acc


def _unary(tz: _Tokenizer) -> IntPoly:
    if tz.peek()[0] == "MINUS":
        tz.next()
        return -_unary(tz)
    return _power(tz)


def _power(tz: _Tokenizer) -> IntPoly:
    base = _atom(tz)
    if tz.peek()[0] == "CARET":
        tz.next()
        tok = tz.expect("INT")
        return base ** tok[1]
    return base


def _atom(tz: _Tokenizer) -> IntPoly:
    tok = tz.next()
    if tok[0] == "INT":
        return IntPoly((tok[1],))
    if tok[0] == "X":
        return IntPoly.x()
    if tok[0] == "LP":
        inner = _expr(tz)
        tz.expect("RP")
        return inner
    raise PolyParseError(f"expected integer, 'x', or '(', found {tok[0]}", tok[2])


def poly_to_string(p: IntPoly) -> str:
    """Canonical printer; parse_poly(poly_to_string(p)) == p."""
    if p.is_zero():
        return "0"
    parts = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        elif i == 1:
            body = "x" if mag == 1 else f"{mag}*x"
        else:
            body = f"x^{i}" if mag == 1 else f"{mag}*x^{i}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)
