"""Concrete syntax: one tokenizer, recursive-descent parsers for terms and
formulas.

Terms:     \\x:Nat. x      R[Nat] a b n      <t, s>      fst(p)  snd(p)
           if c then t else s       S(t)       numerals        [P(0) -> P(g 0)]
Formulas:  forall v. / exists v. prefixes, ->, /\\, \\/, ~, bot, atoms P(t,...),
           indexed atoms P[i](t), built-in `t = 0`.

Predicate application is always written P(...); function application in terms
is juxtaposition (`g 0`), which keeps the two unambiguous.
"""

from __future__ import annotations

import re
from typing import Optional

from . import formulas, terms
from .formulas import (Atom, BOT, Exists, Forall, Formula, Implies, Not,
                       queryize)
from .terms import (NAT, UNIT, Arrow, Product, SimpleType, Term, UNITVAL, Var)


class ParseError(Exception):
    def __init__(self, message: str, position: int, text: str = ""):
        near = text[position:position + 12]
        super().__init__(f"{message} at position {position}" +
                         (f" (near {near!r})" if near else " (at end)"))
        self.position = position


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<and>/\\)
  | (?P<or>\\/)
  | (?P<num>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>[()\[\]<>,.:\\~*=])
""", re.VERBOSE)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("unexpected character", pos, text)
        pos = m.end()
        if m.lastgroup == "ws":
            continue
        kind = m.lastgroup
        value = m.group()
        if kind == "or":
            value = "\\/"
        tokens.append((kind, value, m.start()))
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, free_types=None, default_free=None):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.free_types = dict(free_types or {})
        self.default_free = default_free

    # -- token plumbing

    def peek(self, k: int = 0):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.i]
        if tok[0] != "eof":
            self.i += 1
        return tok

    def expect(self, value: str):
        kind, got, pos = self.peek()
        if got != value:
            raise ParseError(f"expected {value!r}, found {got!r}", pos, self.text)
        return self.next()

    def at(self, value: str, k: int = 0) -> bool:
        return self.peek(k)[1] == value

    def fail(self, message: str):
        raise ParseError(message, self.peek()[2], self.text)

    # -- types

    def parse_type(self) -> SimpleType:
        left = self.parse_prod_type()
        if self.at("->"):
            self.next()
            return Arrow(left, self.parse_type())
        return left

    def parse_prod_type(self) -> SimpleType:
        left = self.parse_atom_type()
        if self.at("*"):
            self.next()
            return Product(left, self.parse_prod_type())
        return left

    def parse_atom_type(self) -> SimpleType:
        kind, value, pos = self.peek()
        if value == "Nat":
            self.next()
            return NAT
        if value == "Unit":
            self.next()
            return UNIT
        if value == "(":
            self.next()
            ty = self.parse_type()
            self.expect(")")
            return ty
        raise ParseError("expected a type", pos, self.text)

    # -- terms

    def lookup_var(self, name: str, bound: dict) -> Term:
        if name in bound:
            return Var(name, bound[name])
        if name in self.free_types:
            return Var(name, self.free_types[name])
        if self.default_free is not None:
            return Var(name, self.default_free)
        self.fail(f"variable {name!r} has no declared type")

    def parse_term(self, bound: dict) -> Term:
        if self.at("\\"):
            self.next()
            kind, name, pos = self.next()
            if kind != "name":
                raise ParseError("expected a binder name", pos, self.text)
            self.expect(":")
            ty = self.parse_type()
            self.expect(".")
            body = self.parse_term({**bound, name: ty})
            return terms.Lambda(Var(name, ty), body)
        if self.at("if"):
            self.next()
            cond = self.parse_term(bound)
            self.expect("then")
            then_branch = self.parse_term(bound)
            self.expect("else")
            else_branch = self.parse_term(bound)
            return terms.IfThenElse(cond, then_branch, else_branch)
        return self.parse_appterm(bound)

    def parse_appterm(self, bound: dict) -> Term:
        t = self.parse_term_atom(bound)
        while self.starts_term_atom():
            t = terms.App(t, self.parse_term_atom(bound))
        return t

    def starts_term_atom(self) -> bool:
        kind, value, _ = self.peek()
        if kind == "num":
            return True
        if kind == "name":
            return value not in ("then", "else", "if", "forall", "exists", "bot")
        return value in ("(", "<", "[", "\\")

    def parse_term_atom(self, bound: dict) -> Term:
        kind, value, pos = self.peek()
        if kind == "num":
            self.next()
            return terms.numeral(int(value))
        if value == "(":
            self.next()
            if self.at(")"):
                self.next()
                return UNITVAL
            t = self.parse_term(bound)
            self.expect(")")
            return t
        if value == "<":
            self.next()
            left = self.parse_term(bound)
            self.expect(",")
            right = self.parse_term(bound)
            self.expect(">")
            return terms.Pair(left, right)
        if value == "[":
            self.next()
            test = self.parse_formula(bound)
            self.expect("]")
            return queryize(test)
        if value == "\\":
            return self.parse_term(bound)
        if kind == "name":
            if value == "R" and self.at("[", 1):
                self.next()
                self.next()
                ty = self.parse_type()
                self.expect("]")
                return terms.Rec(ty)
            if value in ("S", "fst", "snd") and self.at("(", 1):
                self.next()
                self.next()
                inner = self.parse_term(bound)
                self.expect(")")
                return {"S": terms.Succ, "fst": terms.Proj1,
                        "snd": terms.Proj2}[value](inner)
            self.next()
            return self.lookup_var(value, bound)
        raise ParseError("expected a term", pos, self.text)

    # -- formulas

    def parse_formula(self, bound: dict) -> Formula:
        if self.at("forall") or self.at("exists"):
            cls = Forall if self.peek()[1] == "forall" else Exists
            self.next()
            binders = []
            while True:
                kind, name, pos = self.next()
                if kind != "name":
                    raise ParseError("expected a quantified variable", pos, self.text)
                ty = NAT
                if self.at(":"):
                    self.next()
                    ty = self.parse_type()
                binders.append((name, ty))
                if self.at(","):
                    self.next()
                    continue
                break
            self.expect(".")
            inner_bound = dict(bound)
            inner_bound.update(binders)
            body = self.parse_formula(inner_bound)
            for name, ty in reversed(binders):
                body = cls(name, body, ty)
            return body
        return self.parse_implies(bound)

    def parse_implies(self, bound: dict) -> Formula:
        left = self.parse_disj(bound)
        if self.at("->"):
            self.next()
            right = (self.parse_formula(bound)
                     if self.at("forall") or self.at("exists")
                     else self.parse_implies(bound))
            return Implies(left, right)
        return left

    def parse_disj(self, bound: dict) -> Formula:
        left = self.parse_conj(bound)
        while self.at("\\/"):
            self.next()
            left = formulas.Or(left, self.parse_conj(bound))
        return left

    def parse_conj(self, bound: dict) -> Formula:
        left = self.parse_neg(bound)
        while self.at("/\\"):
            self.next()
            left = formulas.And(left, self.parse_neg(bound))
        return left

    def parse_neg(self, bound: dict) -> Formula:
        if self.at("~"):
            self.next()
            return Not(self.parse_neg(bound))
        return self.parse_formula_atom(bound)

    def parse_formula_atom(self, bound: dict) -> Formula:
        kind, value, pos = self.peek()
        if value == "bot":
            self.next()
            return BOT
        if kind == "name" and self.at("(", 1):
            self.next()
            self.next()
            args = []
            if not self.at(")"):
                args.append(self.parse_term(bound))
                while self.at(","):
                    self.next()
                    args.append(self.parse_term(bound))
            self.expect(")")
            return Atom(value, tuple(args))
        if kind == "name" and self.at("[", 1):
            self.next()
            self.next()
            index = self.parse_term(bound)
            self.expect("]")
            self.expect("(")
            args = [self.parse_term(bound)]
            while self.at(","):
                self.next()
                args.append(self.parse_term(bound))
            self.expect(")")
            return Atom(value, (index,) + tuple(args), indexed=True)
        # `t = 0` arithmetic atom
        mark = self.i
        try:
            t = self.parse_appterm(bound)
            self.expect("=")
            kind, value, pos = self.next()
            if kind != "num" or int(value) != 0:
                raise ParseError("only `= 0` comparisons are supported", pos, self.text)
            return formulas.eq0(t)
        except ParseError:
            self.i = mark
        if value == "(":
            self.next()
            inner = self.parse_formula(bound)
            self.expect(")")
            return inner
        raise ParseError("expected a formula", pos, self.text)


def parse_term(text: str, free_types=None,
               default_free: Optional[SimpleType] = None) -> Term:
    parser = _Parser(text, free_types, default_free)
    t = parser.parse_term({})
    if not parser.at(""):
        parser.fail("trailing input after term")
    return t


def parse_formula(text: str, free_types=None) -> Formula:
    parser = _Parser(text, free_types, default_free=NAT)
    f = parser.parse_formula({})
    if not parser.at(""):
        parser.fail("trailing input after formula")
    return f
