"""
Recursive-descent parser for operator expressions

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := coeff '*' word | coeff | word
    coeff  := decimal | 'i' | decimal 'i' | '(' ['-'] decimal ('+'|'-') [decimal] 'i' ')'
    word   := factor+          factor := ('X'|'Y') ('^' uint)?

Factors written next to each other (with or without '*') multiply in written order.
"""
import re
import logging
from dataclasses import dataclass
from typing import List, Tuple

import sympy

from algebra.ncpoly import NCPolynomial, NCWord
from utils.errors import OperatorSyntaxError

logger = logging.getLogger(__name__)

TOKEN_PATTERN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|(.))")


@dataclass(frozen=True)
class Token:
    kind: str       # 'num', 'i', 'X', 'Y', '^', '*', '+', '-', '(', ')', 'end'
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = TOKEN_PATTERN.match(text, pos)
        if match is None or match.end() == pos:
            break
        number, symbol = match.group(1), match.group(2)
        start = match.start(1) if number else match.start(2)
        if number:
            tokens.append(Token('num', number, start))
        elif symbol is not None:
            if symbol not in 'iXY^*+-()':
                raise OperatorSyntaxError(f"unexpected character {symbol!r}", start, text)
            tokens.append(Token(symbol, symbol, start))
        pos = match.end()
    tokens.append(Token('end', '', len(text)))
    return tokens


class OperatorParser:
    """One-shot parser over a token list"""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def token(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        if self.token.kind != kind:
            self.fail(f"expected {what}")
        return self.advance()

    def fail(self, message: str):
        found = self.token.text or 'end of input'
        raise OperatorSyntaxError(f"{message}, found {found!r}", self.token.position, self.text)

    def parse(self) -> NCPolynomial:
        if self.token.kind == 'end':
            raise OperatorSyntaxError("empty operator expression", 0, self.text)
        terms: List[Tuple[NCWord, sympy.Expr]] = []
        sign = 1
        if self.token.kind in '+-':
            sign = -1 if self.advance().kind == '-' else 1
        terms.append(self.term(sign))
        while self.token.kind in ('+', '-'):
            sign = -1 if self.advance().kind == '-' else 1
            terms.append(self.term(sign))
        if self.token.kind != 'end':
            self.fail("expected '+', '-' or end of input")
        return NCPolynomial.from_terms(terms)

    def term(self, sign: int) -> Tuple[NCWord, sympy.Expr]:
        if self.token.kind in ('num', 'i', '('):
            coeff = self.coeff()
            if self.token.kind == '*':
                self.advance()
                return self.word(), sign * coeff
            if self.token.kind in ('X', 'Y'):
                return self.word(), sign * coeff
            return '', sign * coeff
        if self.token.kind in ('X', 'Y'):
            return self.word(), sympy.Integer(sign)
        self.fail("expected a coefficient or a word")

    def coeff(self) -> sympy.Expr:
        if self.token.kind == 'i':
            self.advance()
            return sympy.I
        if self.token.kind == 'num':
            value = self.decimal()
            if self.token.kind == 'i':
                self.advance()
                return value * sympy.I
            return value
        self.expect('(', "'('")
        real_sign = 1
        if self.token.kind == '-':
            self.advance()
            real_sign = -1
        real = real_sign * self.decimal()
        if self.token.kind not in ('+', '-'):
            self.fail("expected '+' or '-' inside complex literal")
        imag_sign = -1 if self.advance().kind == '-' else 1
        imag = self.decimal() if self.token.kind == 'num' else sympy.Integer(1)
        self.expect('i', "'i'")
        self.expect(')', "')'")
        return real + imag_sign * imag * sympy.I

    def decimal(self) -> sympy.Expr:
        tok = self.expect('num', 'a number')
        return sympy.Rational(tok.text)

    def word(self) -> NCWord:
        letters = []
        while True:
            if self.token.kind not in ('X', 'Y'):
                self.fail("expected 'X' or 'Y'")
            letter = self.advance().kind
            power = 1
            if self.token.kind == '^':
                self.advance()
                tok = self.expect('num', 'an exponent')
                if not tok.text.isdigit():
                    raise OperatorSyntaxError("exponent must be a non-negative integer",
                                              tok.position, self.text)
                power = int(tok.text)
            letters.append(letter * power)
            if self.token.kind == '*' and self.tokens[self.index + 1].kind in ('X', 'Y'):
                self.advance()
                continue
            if self.token.kind in ('X', 'Y'):
                continue
            return ''.join(letters)


def parse_operator(text: str) -> NCPolynomial:
    """Parse operator text into an NC polynomial with combined coefficients"""
    poly = OperatorParser(text).parse()
    logger.debug(f"🧩 Parsed {text!r} into {len(poly.items)} terms, degree {poly.degree}")
    return poly
