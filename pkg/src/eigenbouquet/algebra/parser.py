"""Recursive-descent parser for the polynomial text grammar.

    expr     := ('+'|'-')? term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := base ('^' uint)?
    base     := rational | 'i' | identifier | '(' expr ')'
    rational := int ('/' uint)?

The printer in poly.Polynomial.to_string emits canonical forms that parse
back to the identical polynomial.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import Polynomial
from .scalars import Scalar
from .universe import VarUniverse


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class UnknownVariable(ParseError):
    def __init__(self, name: str, pos: int):
        super().__init__(f"unknown variable {name!r}", pos)
        self.name = name


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list[tuple[str, str, int]] = []
        self._scan()
        self.k = 0

    def _scan(self):
        text = self.text
        n = len(text)
        i = 0
        while i < n:
            c = text[i]
            if c.isspace():
                i += 1
                continue
            if c.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                self.tokens.append(("num", text[i:j], i))
                i = j
            elif c.isalpha() or c == "_":
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.tokens.append(("ident", text[i:j], i))
                i = j
            elif c in "+-*^/()":
                self.tokens.append((c, c, i))
                i += 1
            else:
                raise ParseError(f"unexpected character {c!r}", i)
        self.tokens.append(("end", "", n))

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.k]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def accept(self, kind: str):
        if self.tokens[self.k][0] == kind:
            return self.next()
        return None

    def expect(self, kind: str) -> tuple[str, str, int]:
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return tok


class _Parser:
    def __init__(self, text: str, universe: VarUniverse):
        self.lex = _Lexer(text)
        self.universe = universe

    def parse(self) -> Polynomial:
        p = self.expr()
        tok = self.lex.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected trailing input {tok[1]!r}", tok[2])
        return p

    def expr(self) -> Polynomial:
        negate = False
        if self.lex.accept("-"):
            negate = True
        else:
            self.lex.accept("+")
        total = self.term()
        if negate:
            total = -total
        while True:
            if self.lex.accept("+"):
                total = total + self.term()
            elif self.lex.accept("-"):
                total = total - self.term()
            else:
                return total

    def term(self) -> Polynomial:
        total = self.factor()
        while self.lex.accept("*"):
            total = total * self.factor()
        return total

    def factor(self) -> Polynomial:
        base = self.base()
        if self.lex.accept("^"):
            tok = self.lex.expect("num")
            base = base ** int(tok[1])
        return base

    def base(self) -> Polynomial:
        kind, text, pos = self.lex.peek()
        if kind == "num":
            self.lex.next()
            value = Fraction(int(text))
            if self.lex.accept("/"):
                den = self.lex.expect("num")
                if int(den[1]) == 0:
                    raise ParseError("zero denominator", den[2])
                value = Fraction(int(text), int(den[1]))
            return Polynomial.constant(self.universe, value)
        if kind == "ident":
            self.lex.next()
            if text == "i":
                return Polynomial.constant(self.universe, Scalar(0, 1))
            try:
                return Polynomial.variable(self.universe, text)
            except KeyError:
                raise UnknownVariable(text, pos) from None
        if kind == "(":
            self.lex.next()
            inner = self.expr()
            self.lex.expect(")")
            return inner
        raise ParseError(f"expected a value, found {text!r}" if text else "unexpected end of input", pos)


def parse_polynomial(text: str, universe: VarUniverse) -> Polynomial:
    return _Parser(text, universe).parse()
