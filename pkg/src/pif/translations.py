"""Formula-level interpretations: negative translation, double-negation
simplification, realizability translation with bottom-as-predicate, and the
quantifier-free functional translation.

Tuple discipline: witness/counter tuples are named lists.  An empty tuple is
represented by a single Unit placeholder rather than dropped; conjunction and
disjunction keep each side's placeholder so the clause structure stays
readable.  Function-forming clauses (implication, quantifiers) compose over
the non-Unit entries only, which is what makes the translated types come out
in their familiar shape instead of being littered with Unit arguments.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from . import formulas, terms
from .formulas import (And, Atom, BOT, Bot, Exists, Forall, Formula, Implies,
                       Not, Or, RealizesBot, eq0, is_negation, map_formula,
                       substitute_formula)
from .terms import (NAT, UNIT, Arrow, SimpleType, Term, Unit, Var, apply,
                    arrow)


class NegVariant(enum.Enum):
    KURODA = "kuroda"
    GOEDEL_GENTZEN = "gg"


@dataclass(frozen=True)
class BotConfig:
    """Type of realizers carried by the bottom predicate."""
    bot_type: SimpleType = NAT


@dataclass
class WitnessSignature:
    witnesses: tuple        # ((name, SimpleType), ...)
    counters: tuple         # ((name, SimpleType), ...); empty for realizability
    matrix: Formula

    def real_witnesses(self) -> tuple:
        return tuple((n, t) for n, t in self.witnesses if t != UNIT)

    def real_counters(self) -> tuple:
        return tuple((n, t) for n, t in self.counters if t != UNIT)

    def to_json(self) -> dict:
        return {
            "witnesses": [[n, terms.format_type(t)] for n, t in self.witnesses],
            "counters": [[n, terms.format_type(t)] for n, t in self.counters],
            "matrix": formulas.format_formula(self.matrix),
        }


# ---------------------------------------------------------------------------
# Negative translation
# ---------------------------------------------------------------------------

def negative_translate(f: Formula, variant: NegVariant = NegVariant.KURODA) -> Formula:
    """Double-negation embedding of classical into intuitionistic logic."""
    if variant is NegVariant.KURODA:
        return Not(Not(_kuroda(f)))
    if variant is NegVariant.GOEDEL_GENTZEN:
        return _goedel_gentzen(f)
    raise ValueError(f"unknown variant {variant!r}")


def _kuroda(f: Formula) -> Formula:
    """Insert double negation after every universal quantifier."""
    if isinstance(f, Forall):
        return Forall(f.var, Not(Not(_kuroda(f.body))), f.var_type)
    return map_formula(_kuroda, f)


def _goedel_gentzen(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return Not(Not(f))
    if isinstance(f, Bot):
        return f
    if isinstance(f, Or):
        return Not(And(Not(_goedel_gentzen(f.left)), Not(_goedel_gentzen(f.right))))
    if isinstance(f, Exists):
        return Not(Forall(f.var, Not(_goedel_gentzen(f.body)), f.var_type))
    return map_formula(_goedel_gentzen, f)


# ---------------------------------------------------------------------------
# Double-negation simplification
# ---------------------------------------------------------------------------

def _qf_over(f: Formula, decidable: frozenset) -> bool:
    return (formulas.is_quantifier_free(f)
            and formulas.atom_symbols(f) <= decidable)


def simplify_double_neg(f: Formula, decidable_atoms=frozenset()) -> Formula:
    """Remove inner double negations, preserving classical truth.

    Two rewrites run to completion, innermost first:

    * ``~~A  =>  A`` when A is quantifier-free and mentions only atoms in
      ``decidable_atoms`` (also for A = bot, which needs no decidability);
    * ``~~(A -> B)  =>  A -> ~~B`` unconditionally.

    The second rewrite holds in minimal logic, so with an empty decidable set
    the result is still realizability-safe; the first needs the atoms to be
    decidable and is the one used on quantifier-free matrices.
    """
    decidable = frozenset(decidable_atoms)

    def simp(f: Formula) -> Formula:
        f = map_formula(simp, f)
        if is_negation(f) and is_negation(f.left):
            inner = f.left.left
            if isinstance(inner, Bot):
                return BOT
            if _qf_over(inner, decidable):
                return inner
            if isinstance(inner, Implies) and not isinstance(inner.right, Bot):
                return simp(Implies(inner.left, Not(Not(inner.right))))
        return f

    return simp(f)


def simplify_classical(f: Formula) -> Formula:
    """Simplification with every predicate symbol treated as decidable."""
    return simplify_double_neg(f, formulas.atom_symbols(f))


# ---------------------------------------------------------------------------
# Shared tuple helpers
# ---------------------------------------------------------------------------

class _Names:
    def __init__(self):
        self.counters: dict = {}
        self.used = set()

    def fresh(self, base: str) -> str:
        name = base
        while name in self.used:
            i = self.counters.get(base, 0)
            self.counters[base] = i + 1
            name = f"{base}{i}"
        self.used.add(name)
        return name

    def reserve(self, name: str):
        self.used.add(name)


def _real(entries) -> tuple:
    return tuple((n, t) for n, t in entries if t != UNIT)


def _pad(entries, names: _Names) -> tuple:
    entries = tuple(entries)
    if entries:
        return entries
    return ((names.fresh("u"), UNIT),)


def _apply_vars(head_name: str, head_type: SimpleType, entries) -> Term:
    return apply(Var(head_name, head_type), *(Var(n, t) for n, t in entries))


def _fn_type(args, result: SimpleType) -> SimpleType:
    return arrow(*[t for _, t in args], result)


# ---------------------------------------------------------------------------
# Realizability translation (typed BHK with bottom-as-predicate)
# ---------------------------------------------------------------------------

def mr_translate(f: Formula, cfg: BotConfig = BotConfig()) -> WitnessSignature:
    """Witness types and realizing condition for a formula.

    Prime formulas carry a Unit placeholder and realize themselves; bottom
    carries a realizer of the configured type, which is what makes the
    translation sensitive to negative translations.
    """
    names = _Names()

    def go(f: Formula):
        if isinstance(f, Atom):
            return _pad((), names), f
        if isinstance(f, Bot):
            w = names.fresh("w")
            return ((w, cfg.bot_type),), RealizesBot(Var(w, cfg.bot_type))
        if isinstance(f, RealizesBot):
            raise ValueError("realizability atom cannot be translated again")
        if isinstance(f, And):
            wl, ml = go(f.left)
            wr, mr_ = go(f.right)
            return wl + wr, And(ml, mr_)
        if isinstance(f, Or):
            wl, ml = go(f.left)
            wr, mr_ = go(f.right)
            flag = names.fresh("b")
            b = Var(flag, NAT)
            return (((flag, NAT),) + wl + wr,
                    And(Implies(eq0(b), ml), Implies(Not(eq0(b)), mr_)))
        if isinstance(f, Implies):
            wl, ml = go(f.left)
            wr, mr_ = go(f.right)
            real_l = _real(wl)
            new_entries = []
            for name, ty in wr:
                if ty == UNIT:
                    new_entries.append((names.fresh("u"), UNIT))
                    continue
                if not real_l:
                    new_entries.append((name, ty))
                    continue
                fn = names.fresh(name)
                fn_ty = _fn_type(real_l, ty)
                new_entries.append((fn, fn_ty))
                mr_ = substitute_formula(mr_, name, _apply_vars(fn, fn_ty, real_l))
            matrix = Implies(ml, mr_)
            for name, ty in reversed(real_l):
                matrix = Forall(name, matrix, ty)
            return tuple(new_entries), matrix
        if isinstance(f, Exists):
            wb, mb = go(f.body)
            witness = names.fresh(f.var)
            if witness != f.var:
                mb = substitute_formula(mb, f.var, Var(witness, f.var_type))
            return ((witness, f.var_type),) + wb, mb
        if isinstance(f, Forall):
            names.reserve(f.var)
            wb, mb = go(f.body)
            new_entries = []
            for name, ty in wb:
                if ty == UNIT:
                    new_entries.append((name, ty))
                    continue
                fn = names.fresh(name)
                fn_ty = Arrow(f.var_type, ty)
                new_entries.append((fn, fn_ty))
                mb = substitute_formula(
                    mb, name, terms.App(Var(fn, fn_ty), Var(f.var, f.var_type)))
            return tuple(new_entries), Forall(f.var, mb, f.var_type)
        raise ValueError(f"cannot translate {type(f).__name__}")

    witnesses, matrix = go(f)
    return WitnessSignature(_pad(witnesses, names), (), matrix)


# ---------------------------------------------------------------------------
# Quantifier-free functional translation
# ---------------------------------------------------------------------------

def dialectica_translate(f: Formula) -> WitnessSignature:
    """Skolemize into witness tuple, counter tuple and quantifier-free matrix.

    Bottom is a prime formula here.  The implication clause challenges the
    premise's witnesses with functions of the conclusion's data, which is the
    step that makes classical content extractable after a negative
    translation.  The final matrix is cleaned of double negations (all
    declared predicates are decidable).
    """
    names = _Names()

    def go(f: Formula):
        if isinstance(f, (Atom, Bot)):
            return _pad((), names), _pad((), names), f
        if isinstance(f, And):
            xl, yl, ml = go(f.left)
            xr, yr, mr_ = go(f.right)
            return xl + xr, yl + yr, And(ml, mr_)
        if isinstance(f, Or):
            xl, yl, ml = go(f.left)
            xr, yr, mr_ = go(f.right)
            flag = names.fresh("b")
            b = Var(flag, NAT)
            return (((flag, NAT),) + xl + xr, yl + yr,
                    And(Implies(eq0(b), ml), Implies(Not(eq0(b)), mr_)))
        if isinstance(f, Implies):
            xl, yl, ml = go(f.left)
            xr, yr, mr_ = go(f.right)
            real_xl, real_yl = _real(xl), _real(yl)
            real_xr, real_yr = _real(xr), _real(yr)
            fs = []
            for name, ty in real_xr:
                if not real_xl:
                    fs.append((name, ty))
                    continue
                fn = names.fresh(name)
                fn_ty = _fn_type(real_xl, ty)
                fs.append((fn, fn_ty))
                mr_ = substitute_formula(mr_, name, _apply_vars(fn, fn_ty, real_xl))
            gs = []
            g_args = real_xl + real_yr
            for name, ty in real_yl:
                if not g_args:
                    gs.append((name, ty))
                    continue
                fn = names.fresh(name)
                fn_ty = _fn_type(g_args, ty)
                gs.append((fn, fn_ty))
                ml = substitute_formula(ml, name, _apply_vars(fn, fn_ty, g_args))
            return (_pad(tuple(fs) + tuple(gs), names),
                    _pad(g_args, names),
                    Implies(ml, mr_))
        if isinstance(f, Exists):
            xb, yb, mb = go(f.body)
            witness = names.fresh(f.var)
            if witness != f.var:
                mb = substitute_formula(mb, f.var, Var(witness, f.var_type))
            return ((witness, f.var_type),) + xb, yb, mb
        if isinstance(f, Forall):
            names.reserve(f.var)
            xb, yb, mb = go(f.body)
            new_x = []
            for name, ty in xb:
                if ty == UNIT:
                    new_x.append((name, ty))
                    continue
                fn = names.fresh(name)
                fn_ty = Arrow(f.var_type, ty)
                new_x.append((fn, fn_ty))
                mb = substitute_formula(
                    mb, name, terms.App(Var(fn, fn_ty), Var(f.var, f.var_type)))
            return (tuple(new_x), ((f.var, f.var_type),) + yb, mb)
        raise ValueError(f"cannot translate {type(f).__name__}")

    x, y, matrix = go(f)
    matrix = simplify_classical(matrix)
    sig = WitnessSignature(_pad(x, names), _pad(y, names), matrix)
    assert formulas.is_quantifier_free(sig.matrix)
    return sig


def expand_signature(sig: WitnessSignature) -> Formula:
    """Re-quantify a functional signature: exists witnesses, forall counters."""
    f = sig.matrix
    for name, ty in reversed(sig.real_counters()):
        f = Forall(name, f, ty)
    for name, ty in reversed(sig.real_witnesses()):
        f = Exists(name, f, ty)
    return f
