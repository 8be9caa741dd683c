"""First-order formulas over decidable predicates and the finite-model oracle.

Everything downstream is checked against ``oracle_eval``: brute-force
classical truth over the carrier {0, ..., domain_bound - 1}, with atom
arguments reduced mod the carrier size so term-backed counter functions
compose safely.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Union

from . import terms
from .terms import (NAT, UNIT, Arrow, Nat, Product, SimpleType, Term, Unit,
                    UnboundVariable, Var, as_int)

MAX_ORACLE_DOMAIN = 12
MAX_FUNCTION_TABLE_DOMAIN = 4

EQ_ZERO = "=0"   # built-in arithmetic atom: =0(t) holds iff t evaluates to 0


class FormulaError(Exception):
    pass


class NotQuantifierFree(FormulaError):
    pass


class DomainTooLarge(FormulaError):
    pass


# ---------------------------------------------------------------------------
# Formula AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()
    indexed: bool = False   # indexed family: first arg is the family index

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class Bot:
    def __str__(self):
        return "bot"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"
    var_type: SimpleType = NAT

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"
    var_type: SimpleType = NAT

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class RealizesBot:
    """The realizability atom 'this term witnesses absurdity'.

    Only produced by the realizability translation when bottom is configured
    to carry realizers; never evaluated by the classical oracle.
    """

    arg: Term

    def __str__(self):
        return format_formula(self)


Formula = Union[Atom, Bot, And, Or, Implies, Forall, Exists, RealizesBot]

BOT = Bot()


def Not(f: Formula) -> Formula:
    """Negation is sugar for implication into bottom."""
    return Implies(f, BOT)


def is_negation(f: Formula) -> bool:
    return isinstance(f, Implies) and isinstance(f.right, Bot)


def eq0(t: Term) -> Formula:
    return Atom(EQ_ZERO, (t,))


def _subformulas(f: Formula):
    if isinstance(f, (And, Or, Implies)):
        return (f.left, f.right)
    if isinstance(f, (Forall, Exists)):
        return (f.body,)
    return ()


def map_formula(fn, f: Formula) -> Formula:
    """Rebuild f with fn applied to immediate subformulas."""
    if isinstance(f, And):
        return And(fn(f.left), fn(f.right))
    if isinstance(f, Or):
        return Or(fn(f.left), fn(f.right))
    if isinstance(f, Implies):
        return Implies(fn(f.left), fn(f.right))
    if isinstance(f, Forall):
        return Forall(f.var, fn(f.body), f.var_type)
    if isinstance(f, Exists):
        return Exists(f.var, fn(f.body), f.var_type)
    return f


def map_atom_args(f: Formula, fn) -> Formula:
    """Rebuild f with fn applied to every atom argument term."""
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(fn(a) for a in f.args), f.indexed)
    if isinstance(f, RealizesBot):
        return RealizesBot(fn(f.arg))
    return map_formula(lambda sub: map_atom_args(sub, fn), f)


def atom_symbols(f: Formula) -> frozenset:
    out = set()

    def go(f):
        if isinstance(f, Atom) and f.pred != EQ_ZERO:
            out.add(f.pred)
        for sub in _subformulas(f):
            go(sub)

    go(f)
    return frozenset(out)


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Forall, Exists)):
        return False
    return all(is_quantifier_free(sub) for sub in _subformulas(f))


def formula_free_vars(f: Formula) -> dict:
    """Free term variables of a formula, as name -> type."""
    out: dict = {}

    def go(f, bound):
        if isinstance(f, Atom):
            for a in f.args:
                for name, ty in terms.free_vars(a).items():
                    if name not in bound:
                        out[name] = ty
        elif isinstance(f, RealizesBot):
            for name, ty in terms.free_vars(f.arg).items():
                if name not in bound:
                    out[name] = ty
        elif isinstance(f, (Forall, Exists)):
            go(f.body, bound | {f.var})
        else:
            for sub in _subformulas(f):
                go(sub, bound)

    go(f, frozenset())
    return out


def substitute_formula(f: Formula, name: str, t: Term) -> Formula:
    """Capture-avoiding substitution of a term for a free variable."""
    t_free = set(terms.free_vars(t))

    def go(f):
        if isinstance(f, Atom):
            return Atom(f.pred, tuple(terms.substitute(a, name, t) for a in f.args),
                        f.indexed)
        if isinstance(f, RealizesBot):
            return RealizesBot(terms.substitute(f.arg, name, t))
        if isinstance(f, (Forall, Exists)):
            cls = type(f)
            if f.var == name:
                return f
            if f.var in t_free:
                taken = t_free | set(formula_free_vars(f.body)) | {name}
                fresh = terms.fresh_name(f.var, taken)
                body = substitute_formula(f.body, f.var, Var(fresh, f.var_type))
                return cls(fresh, substitute_formula(body, name, t), f.var_type)
            return cls(f.var, go(f.body), f.var_type)
        return map_formula(go, f)

    return go(f)


def drinkers_formula(pred: str = "P", exists_var: str = "n",
                     forall_var: str = "m") -> Formula:
    """The prenex drinkers paradox: exists n. forall m. (P(n) -> P(m))."""
    return Exists(exists_var,
                  Forall(forall_var,
                         Implies(Atom(pred, (Var(exists_var, NAT),)),
                                 Atom(pred, (Var(forall_var, NAT),)))))


# ---------------------------------------------------------------------------
# Environments
# ---------------------------------------------------------------------------

FamilyTable = Union[Callable[[int, int], bool], frozenset]


@dataclass
class PredicateEnv:
    """Finite-domain valuation of predicate symbols.

    ``tables`` maps each symbol to the set of argument tuples on which it
    holds; lookups reduce arguments mod ``domain_bound`` so out-of-carrier
    values stay meaningful.  ``families`` interprets indexed atoms P[i](x),
    either as a set of (index, value) pairs (reduced mod the carrier) or as a
    host callable taking raw naturals.
    """

    domain_bound: int
    tables: dict = field(default_factory=dict)
    families: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.domain_bound < 1:
            raise ValueError("domain_bound must be >= 1")
        self.tables = {sym: frozenset(tuple(row) for row in rows)
                       for sym, rows in self.tables.items()}

    def holds(self, pred: str, args: tuple) -> bool:
        reduced = tuple(a % self.domain_bound for a in args)
        return reduced in self.tables.get(pred, frozenset())

    def family_holds(self, pred: str, index: int, args: tuple) -> bool:
        fam = self.families.get(pred)
        if fam is None:
            return False
        if callable(fam):
            return bool(fam(index, *args))
        d = self.domain_bound
        reduced = (index % d,) + tuple(a % d for a in args)
        return reduced in fam

    def decide(self, test: Formula, valuation: Mapping[str, int]) -> bool:
        """Environment hook used by Query reduction in the kernel."""
        return eval_qf(test, self, dict(valuation))

    def to_json(self) -> dict:
        doc = {"domain": self.domain_bound,
               "preds": {sym: sorted(list(row) for row in rows)
                         for sym, rows in sorted(self.tables.items())}}
        finite = {sym: sorted(list(row) for row in fam)
                  for sym, fam in sorted(self.families.items())
                  if not callable(fam)}
        if finite:
            doc["family"] = finite
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "PredicateEnv":
        return cls(domain_bound=int(doc["domain"]),
                   tables={sym: frozenset(tuple(row) for row in rows)
                           for sym, rows in doc.get("preds", {}).items()},
                   families={sym: frozenset(tuple(row) for row in rows)
                             for sym, rows in doc.get("family", {}).items()})

    @classmethod
    def load(cls, path) -> "PredicateEnv":
        with open(path) as handle:
            return cls.from_json(json.load(handle))


def all_unary_envs(domain_bound: int, pred: str = "P") -> Iterable[PredicateEnv]:
    """Every valuation of one unary predicate over the carrier."""
    for mask in range(2 ** domain_bound):
        rows = frozenset((i,) for i in range(domain_bound) if mask & (1 << i))
        yield PredicateEnv(domain_bound, {pred: rows})


def all_counter_tables(domain_bound: int) -> Iterable["CounterFunction"]:
    for values in itertools.product(range(domain_bound), repeat=domain_bound):
        yield CounterFunction(dict(enumerate(values)))


class CounterFunction:
    """A total Nat -> Nat challenge function: a table, a host callable, or a
    closed kernel term evaluated by normalize."""

    def __init__(self, source, env: Optional[PredicateEnv] = None):
        self.source = source
        self.env = env

    def __call__(self, n: int) -> int:
        if isinstance(self.source, dict):
            if n in self.source:
                return self.source[n]
            return self.source[n % max(len(self.source), 1)]
        if callable(self.source) and not _is_term(self.source):
            return int(self.source(n))
        return terms.normalize_to_int(
            terms.App(self.source, terms.numeral(n)), env=self.env)

    def __repr__(self):
        if isinstance(self.source, dict):
            inside = ", ".join(f"{k}:{v}" for k, v in sorted(self.source.items()))
            return f"CounterFunction({{{inside}}})"
        return f"CounterFunction({self.source!r})"

    @classmethod
    def constant(cls, value: int) -> "CounterFunction":
        return cls(lambda _n, _v=value: _v)

    @classmethod
    def from_json(cls, doc) -> "CounterFunction":
        if isinstance(doc, list):
            return cls(dict(enumerate(int(v) for v in doc)))
        return cls({int(k): int(v) for k, v in doc.items()})


def _is_term(obj) -> bool:
    return isinstance(obj, (terms.Var, terms.Zero, terms.Succ, terms.Lambda,
                            terms.App, terms.Rec, terms.Pair, terms.Proj1,
                            terms.Proj2, terms.UnitVal, terms.IfThenElse,
                            terms.Query))


# ---------------------------------------------------------------------------
# Term evaluation against an environment
# ---------------------------------------------------------------------------

def eval_term(t: Term, valuation: Optional[Mapping] = None,
              env: Optional[PredicateEnv] = None):
    """Big-step interpreter for kernel terms with host-value bindings.

    Variables may be bound to ints, tuples, () or Python callables, which is
    what lets table-backed counter functions plug directly into matrices.
    Deliberately independent of ``terms.normalize`` so the two can check each
    other.
    """
    valuation = dict(valuation or {})

    def go(t, vs):
        if isinstance(t, terms.Var):
            if t.name not in vs:
                raise UnboundVariable(f"unbound variable {t.name!r} in evaluation")
            return vs[t.name]
        if isinstance(t, terms.Zero):
            return 0
        if isinstance(t, terms.Succ):
            return go(t.arg, vs) + 1
        if isinstance(t, terms.Lambda):
            return lambda v, _t=t, _vs=vs: go(_t.body, {**_vs, _t.var.name: v})
        if isinstance(t, terms.App):
            return go(t.fun, vs)(go(t.arg, vs))
        if isinstance(t, terms.Rec):
            def base(a):
                def step(b):
                    def run(n):
                        acc = a
                        for i in range(n):
                            acc = b(i)(acc)
                        return acc
                    return run
                return step
            return base
        if isinstance(t, terms.Pair):
            return (go(t.left, vs), go(t.right, vs))
        if isinstance(t, terms.Proj1):
            return go(t.pair, vs)[0]
        if isinstance(t, terms.Proj2):
            return go(t.pair, vs)[1]
        if isinstance(t, terms.UnitVal):
            return ()
        if isinstance(t, terms.IfThenElse):
            if go(t.cond, vs) == 0:
                return go(t.then_branch, vs)
            return go(t.else_branch, vs)
        if isinstance(t, terms.Query):
            if env is None:
                raise FormulaError("query evaluation needs an environment")
            values = {p: go(a, vs) for p, a in zip(t.params, t.args)}
            return 0 if eval_qf(t.test, env, values) else 1
        raise FormulaError(f"cannot evaluate term node {type(t).__name__}")

    return go(t, valuation)


# ---------------------------------------------------------------------------
# Formula evaluation
# ---------------------------------------------------------------------------

def eval_qf(f: Formula, env: PredicateEnv,
            valuation: Optional[Mapping] = None) -> bool:
    """Classical truth of a quantifier-free formula under a valuation."""
    valuation = dict(valuation or {})

    def go(f) -> bool:
        if isinstance(f, Atom):
            values = tuple(eval_term(a, valuation, env) for a in f.args)
            if f.pred == EQ_ZERO:
                return values[0] == 0
            if f.indexed:
                return env.family_holds(f.pred, values[0], values[1:])
            return env.holds(f.pred, values)
        if isinstance(f, Bot):
            return False
        if isinstance(f, And):
            return go(f.left) and go(f.right)
        if isinstance(f, Or):
            return go(f.left) or go(f.right)
        if isinstance(f, Implies):
            return (not go(f.left)) or go(f.right)
        if isinstance(f, (Forall, Exists)):
            raise NotQuantifierFree(f"quantifier on {f.var!r} in eval_qf")
        if isinstance(f, RealizesBot):
            raise FormulaError("realizability atom has no classical value")
        raise FormulaError(f"unknown formula node {type(f).__name__}")

    return go(f)


def _quantifier_range(var_type: SimpleType, d: int):
    if isinstance(var_type, Nat):
        return range(d)
    if isinstance(var_type, Unit):
        return [()]
    if var_type == Arrow(NAT, NAT):
        if d > MAX_FUNCTION_TABLE_DOMAIN:
            raise DomainTooLarge(
                f"function-table enumeration capped at domain {MAX_FUNCTION_TABLE_DOMAIN}")
        tables = itertools.product(range(d), repeat=d)
        return [(lambda n, _t=t: _t[n % d]) for t in tables]
    if isinstance(var_type, Product):
        lefts = _quantifier_range(var_type.left, d)
        rights = _quantifier_range(var_type.right, d)
        return [(a, b) for a in lefts for b in rights]
    raise DomainTooLarge(f"cannot enumerate quantifier over {var_type}")


def oracle_eval(f: Formula, env: PredicateEnv,
                valuation: Optional[Mapping] = None) -> bool:
    """Brute-force classical truth with quantifiers over the finite carrier.

    Nat quantifiers range over the carrier; Unit over the one-point set;
    Nat -> Nat quantifiers over all function tables (small domains only).
    """
    d = env.domain_bound
    if d > MAX_ORACLE_DOMAIN:
        raise DomainTooLarge(f"oracle restricted to domains <= {MAX_ORACLE_DOMAIN}")
    valuation = dict(valuation or {})
    missing = [v for v in formula_free_vars(f) if v not in valuation]
    if missing:
        raise UnboundVariable(f"oracle_eval needs a closed formula; free: {missing}")

    def go(f, vs) -> bool:
        if isinstance(f, Forall):
            return all(go(f.body, {**vs, f.var: x})
                       for x in _quantifier_range(f.var_type, d))
        if isinstance(f, Exists):
            return any(go(f.body, {**vs, f.var: x})
                       for x in _quantifier_range(f.var_type, d))
        if isinstance(f, (And, Or, Implies)):
            left = go(f.left, vs)
            if isinstance(f, And):
                return left and go(f.right, vs)
            if isinstance(f, Or):
                return left or go(f.right, vs)
            return (not left) or go(f.right, vs)
        return eval_qf(f, env, vs)

    return go(f, valuation)


# ---------------------------------------------------------------------------
# Pretty printing
# ---------------------------------------------------------------------------

def format_formula(f: Formula, var_text: Optional[Mapping] = None) -> str:
    """Render a formula in the concrete grammar (round-trips with the parser)."""
    var_text = dict(var_text or {})

    def fmt_term(t):
        return terms.format_term(t, var_text)

    def atom(f) -> str:
        if isinstance(f, Bot):
            return "bot"
        if isinstance(f, Atom):
            if f.pred == EQ_ZERO:
                return f"{fmt_term(f.args[0])} = 0"
            if f.indexed:
                inner = ", ".join(fmt_term(a) for a in f.args[1:])
                return f"{f.pred}[{fmt_term(f.args[0])}]({inner})"
            inner = ", ".join(fmt_term(a) for a in f.args)
            return f"{f.pred}({inner})"
        if isinstance(f, RealizesBot):
            return f"realizes({fmt_term(f.arg)}, bot)"
        return f"({go(f)})"

    def neg(f) -> str:
        if is_negation(f):
            return f"~{neg(f.left)}"
        return atom(f)

    def conj(f) -> str:
        if isinstance(f, And):
            return f"{conj(f.left)} /\\ {neg(f.right)}"
        return neg(f)

    def disj(f) -> str:
        if isinstance(f, Or):
            return f"{disj(f.left)} \\/ {conj(f.right)}"
        return conj(f)

    def impl(f) -> str:
        if isinstance(f, Implies) and not is_negation(f):
            return f"{disj(f.left)} -> {impl(f.right)}"
        return disj(f)

    def go(f) -> str:
        if isinstance(f, (Forall, Exists)):
            word = "forall" if isinstance(f, Forall) else "exists"
            annot = "" if f.var_type == NAT else f":{terms.format_type(f.var_type)}"
            return f"{word} {f.var}{annot}. {go(f.body)}"
        return impl(f)

    return go(f)


def _query_formatter(q: terms.Query, var_text) -> str:
    shown = dict(var_text or {})
    for param, arg in zip(q.params, q.args):
        shown[param] = terms.format_term(arg, var_text)
    return f"[{format_formula(q.test, shown)}]"


terms._QUERY_FORMATTER = _query_formatter


def queryize(test: Formula) -> terms.Query:
    """Close a quantifier-free formula into a Query node.

    Non-numeral atom arguments become positional parameters (duplicates
    shared), so the stored test formula is canonical.
    """
    params: list = []
    args: list = []
    seen: dict = {}

    def canon_term(t: Term) -> Term:
        if as_int(t) is not None:
            return t
        if t not in seen:
            name = f"q{len(params)}"
            seen[t] = Var(name, NAT)
            params.append(name)
            args.append(t)
        return seen[t]

    def go(f: Formula) -> Formula:
        if isinstance(f, Atom):
            return Atom(f.pred, tuple(canon_term(a) for a in f.args), f.indexed)
        if isinstance(f, (Forall, Exists)):
            raise NotQuantifierFree("query tests must be quantifier-free")
        return map_formula(go, f)

    closed = go(test)
    return terms.Query(closed, tuple(params), tuple(args))
