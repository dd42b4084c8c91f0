"""Polynomial expressions over named generators.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := factor ("*" factor)*
    factor := ("+" | "-") factor | atom ("^" INT)?
    atom   := NUMBER ("/" NUMBER)? | NAME | "(" expr ")"

Parsing expands everything into a list of ``(coefficient, word)`` pairs where a
word is the ordered tuple of symbols (``x^3`` becomes ``("x", "x", "x")``).
Factor order is preserved so that graded signs can be applied later.
"""
from __future__ import annotations

import re

from gmpy2 import mpq

from .errors import InputError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_']*)|(\S))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("name", name))
        else:
            if op not in "+-*/^()":
                raise InputError("unexpected character %r in expression %r" % (op, text))
            out.append(("op", op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, constants: dict | None):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.constants = constants or {}

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, op):
        tok = self.take()
        if tok != ("op", op):
            raise InputError("expected %r in expression %r" % (op, self.text))

    def parse(self):
        if not self.toks:
            raise InputError("empty expression")
        terms = self.expr()
        if self.i != len(self.toks):
            raise InputError("trailing input in expression %r" % self.text)
        return _collect(terms)

    def expr(self):
        terms = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            if op == "-":
                rhs = [(-c, w) for c, w in rhs]
            terms = terms + rhs
        return terms

    def term(self):
        terms = self.factor()
        while self.peek() == ("op", "*"):
            self.take()
            rhs = self.factor()
            terms = [(c1 * c2, w1 + w2) for c1, w1 in terms for c2, w2 in rhs]
        return terms

    def factor(self):
        if self.peek() in (("op", "-"), ("op", "+")):
            sign = -1 if self.take()[1] == "-" else 1
            return [(sign * c, w) for c, w in self.factor()]
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise InputError("exponent must be a nonnegative integer in %r" % self.text)
            out = [(mpq(1), ())]
            for _ in range(val):
                out = [(c1 * c2, w1 + w2) for c1, w1 in out for c2, w2 in base]
            return out
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            c = mpq(val)
            if self.peek() == ("op", "/"):
                self.take()
                k2, v2 = self.take()
                if k2 != "num" or v2 == 0:
                    raise InputError("bad rational literal in %r" % self.text)
                c = mpq(val, v2)
            return [(c, ())]
        if kind == "name":
            if val in self.constants:
                return [(mpq(self.constants[val]), ())]
            return [(mpq(1), (val,))]
        if (kind, val) == ("op", "("):
            inner = self.expr()
            self.expect(")")
            return inner
        raise InputError("unexpected token %r in expression %r" % (val, self.text))


def _collect(terms):
    acc: dict = {}
    for c, w in terms:
        acc[w] = acc.get(w, 0) + c
    return [(c, w) for w, c in acc.items() if c]


def parse(text: str, constants: dict | None = None) -> list[tuple[mpq, tuple]]:
    """Expand an expression into ``[(coeff, word), ...]``."""
    return _Parser(str(text), constants).parse()


def monomial_name(word_exps) -> str:
    """Render ``[(sym, exp), ...]`` as ``a*b^2`` (``1`` for the empty monomial)."""
    parts = [s if e == 1 else "%s^%d" % (s, e) for s, e in word_exps if e]
    return "*".join(parts) if parts else "1"


def normalize_word(word, degrees: dict, order: dict):
    """Sort a word into generator order with the Koszul sign.

    Returns ``(sign, [(sym, exp), ...])`` or ``(0, None)`` when an odd
    generator repeats.  Raises KeyError for unknown symbols.
    """
    syms = list(word)
    for s in syms:
        if s not in order:
            raise KeyError(s)
    sign = 1
    # insertion sort, counting transpositions of odd symbols
    for i in range(1, len(syms)):
        j = i
        while j > 0 and order[syms[j - 1]] > order[syms[j]]:
            if degrees[syms[j - 1]] % 2 and degrees[syms[j]] % 2:
                sign = -sign
            syms[j - 1], syms[j] = syms[j], syms[j - 1]
            j -= 1
    out = []
    for s in syms:
        if out and out[-1][0] == s:
            if degrees[s] % 2:
                return 0, None
            out[-1] = (s, out[-1][1] + 1)
        else:
            out.append((s, 1))
    return sign, out
