"""System T kernel: simple types, terms, typing, substitution, normalization.

Terms are immutable trees.  Booleans are naturals with 0 = true.  The only
impure-looking construct is ``Query``, a decidable-test primitive that blocks
until ``normalize`` is given an environment able to decide it; this is how
extracted programs talk to the mathematical environment without baking a
predicate table into the term.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

DEFAULT_FUEL = 1_000_000


class KernelError(Exception):
    """Base class for kernel failures."""


class UnboundVariable(KernelError):
    pass


class TypeMismatch(KernelError):
    def __init__(self, message: str, path: tuple = ()):
        location = "/".join(path) if path else "root"
        super().__init__(f"{message} [at {location}]")
        self.path = tuple(path)


class FuelExhausted(KernelError):
    pass


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Nat:
    def __str__(self):
        return "Nat"


@dataclass(frozen=True)
class Unit:
    def __str__(self):
        return "Unit"


@dataclass(frozen=True)
class Arrow:
    domain: "SimpleType"
    codomain: "SimpleType"

    def __str__(self):
        return format_type(self)


@dataclass(frozen=True)
class Product:
    left: "SimpleType"
    right: "SimpleType"

    def __str__(self):
        return format_type(self)


SimpleType = Union[Nat, Unit, Arrow, Product]

NAT = Nat()
UNIT = Unit()


def arrow(*types: SimpleType) -> SimpleType:
    """Right-fold ``types`` into a function type: arrow(a, b, c) = a -> b -> c."""
    if not types:
        raise ValueError("arrow() needs at least one type")
    result = types[-1]
    for ty in reversed(types[:-1]):
        result = Arrow(ty, result)
    return result


def format_type(ty: SimpleType) -> str:
    if isinstance(ty, Nat):
        return "Nat"
    if isinstance(ty, Unit):
        return "Unit"
    if isinstance(ty, Arrow):
        dom = format_type(ty.domain)
        if isinstance(ty.domain, Arrow):
            dom = f"({dom})"
        return f"{dom} -> {format_type(ty.codomain)}"
    if isinstance(ty, Product):
        parts = []
        for side in (ty.left, ty.right):
            text = format_type(side)
            if isinstance(side, (Arrow, Product)):
                text = f"({text})"
            parts.append(text)
        return f"{parts[0]} * {parts[1]}"
    raise TypeError(f"not a type: {ty!r}")


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    type: SimpleType

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class Zero:
    def __str__(self):
        return "0"


@dataclass(frozen=True)
class Succ:
    arg: "Term"

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class Lambda:
    var: Var
    body: "Term"

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class Rec:
    type: SimpleType

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class Proj1:
    pair: "Term"

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class Proj2:
    pair: "Term"

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class UnitVal:
    def __str__(self):
        return "()"


@dataclass(frozen=True)
class IfThenElse:
    cond: "Term"          # Nat read as boolean, 0 = true
    then_branch: "Term"
    else_branch: "Term"

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class Query:
    """Decidable test compiled against the environment interface.

    ``test`` is a quantifier-free formula whose free variables are exactly
    ``params``; ``args`` supplies one Nat-typed term per parameter.  The node
    reduces to a numeral (0 = true) once all args are numerals and an
    environment is supplied to ``normalize``.
    """

    test: object
    params: tuple
    args: tuple

    def __str__(self):
        return format_term(self)


Term = Union[Var, Zero, Succ, Lambda, App, Rec, Pair, Proj1, Proj2,
             UnitVal, IfThenElse, Query]

TypingContext = dict


ZERO = Zero()
UNITVAL = UnitVal()
TRUE = Zero()            # booleans: 0 = true
FALSE = Succ(Zero())


def numeral(n: int) -> Term:
    if n < 0:
        raise ValueError("numerals are naturals")
    t: Term = ZERO
    for _ in range(n):
        t = Succ(t)
    return t


def as_int(t: Term) -> Optional[int]:
    """Return n if t is the numeral n, else None."""
    n = 0
    while isinstance(t, Succ):
        t = t.arg
        n += 1
    return n if isinstance(t, Zero) else None


def is_numeral(t: Term) -> bool:
    return as_int(t) is not None


def apply(fun: Term, *args: Term) -> Term:
    for a in args:
        fun = App(fun, a)
    return fun


def lam(*binders_and_body) -> Term:
    """lam(x, y, body) nests Lambda(x, Lambda(y, body))."""
    *binders, body = binders_and_body
    for v in reversed(binders):
        body = Lambda(v, body)
    return body


def _children(t: Term):
    if isinstance(t, Succ):
        return (("arg", t.arg),)
    if isinstance(t, Lambda):
        return (("body", t.body),)
    if isinstance(t, App):
        return (("fun", t.fun), ("arg", t.arg))
    if isinstance(t, Pair):
        return (("left", t.left), ("right", t.right))
    if isinstance(t, (Proj1, Proj2)):
        return (("pair", t.pair),)
    if isinstance(t, IfThenElse):
        return (("cond", t.cond), ("then", t.then_branch), ("else", t.else_branch))
    if isinstance(t, Query):
        return tuple((f"arg{i}", a) for i, a in enumerate(t.args))
    return ()


def free_vars(t: Term) -> dict:
    """Free variables of t as a name -> type dict."""
    out: dict = {}

    def go(t, bound):
        if isinstance(t, Var):
            if t.name not in bound:
                out[t.name] = t.type
        elif isinstance(t, Lambda):
            go(t.body, bound | {t.var.name})
        else:
            for _, c in _children(t):
                go(c, bound)

    go(t, frozenset())
    return out


def fresh_name(base: str, taken) -> str:
    if base not in taken:
        return base
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"


def substitute(t: Term, name: str, s: Term) -> Term:
    """Capture-avoiding substitution t[name := s]."""
    s_free = set(free_vars(s))

    def go(t):
        if isinstance(t, Var):
            return s if t.name == name else t
        if isinstance(t, Lambda):
            if t.var.name == name:
                return t
            if t.var.name in s_free:
                taken = s_free | set(free_vars(t.body)) | {name}
                nv = Var(fresh_name(t.var.name, taken), t.var.type)
                body = substitute(t.body, t.var.name, nv)
                return Lambda(nv, go(body))
            return Lambda(t.var, go(t.body))
        if isinstance(t, Succ):
            return Succ(go(t.arg))
        if isinstance(t, App):
            return App(go(t.fun), go(t.arg))
        if isinstance(t, Pair):
            return Pair(go(t.left), go(t.right))
        if isinstance(t, Proj1):
            return Proj1(go(t.pair))
        if isinstance(t, Proj2):
            return Proj2(go(t.pair))
        if isinstance(t, IfThenElse):
            return IfThenElse(go(t.cond), go(t.then_branch), go(t.else_branch))
        if isinstance(t, Query):
            return Query(t.test, t.params, tuple(go(a) for a in t.args))
        return t

    return go(t)


def substitute_many(t: Term, mapping: dict) -> Term:
    for name, s in mapping.items():
        t = substitute(t, name, s)
    return t


# ---------------------------------------------------------------------------
# Typechecking
# ---------------------------------------------------------------------------

def rec_type(ty: SimpleType) -> SimpleType:
    """Signature of the recursor at result type ty."""
    return arrow(ty, arrow(NAT, ty, ty), NAT, ty)


def typecheck(t: Term, ctx: Optional[TypingContext] = None) -> SimpleType:
    """Syntax-directed typing; raises UnboundVariable or TypeMismatch."""
    return _tc(t, dict(ctx or {}), ())


def _tc(t: Term, ctx: dict, path: tuple) -> SimpleType:
    if isinstance(t, Var):
        if t.name not in ctx:
            raise UnboundVariable(f"unbound variable {t.name!r}")
        if ctx[t.name] != t.type:
            raise TypeMismatch(
                f"variable {t.name!r} annotated {format_type(t.type)} but bound at "
                f"{format_type(ctx[t.name])}", path)
        return t.type
    if isinstance(t, Zero):
        return NAT
    if isinstance(t, Succ):
        inner = _tc(t.arg, ctx, path + ("arg",))
        if inner != NAT:
            raise TypeMismatch("successor applied to non-Nat", path)
        return NAT
    if isinstance(t, Lambda):
        body_ctx = dict(ctx)
        body_ctx[t.var.name] = t.var.type
        return Arrow(t.var.type, _tc(t.body, body_ctx, path + ("body",)))
    if isinstance(t, App):
        fun_ty = _tc(t.fun, ctx, path + ("fun",))
        arg_ty = _tc(t.arg, ctx, path + ("arg",))
        if not isinstance(fun_ty, Arrow):
            raise TypeMismatch(
                f"application of non-function of type {format_type(fun_ty)}", path)
        if fun_ty.domain != arg_ty:
            raise TypeMismatch(
                f"argument type {format_type(arg_ty)} does not match domain "
                f"{format_type(fun_ty.domain)}", path)
        return fun_ty.codomain
    if isinstance(t, Rec):
        return rec_type(t.type)
    if isinstance(t, Pair):
        return Product(_tc(t.left, ctx, path + ("left",)),
                       _tc(t.right, ctx, path + ("right",)))
    if isinstance(t, Proj1):
        ty = _tc(t.pair, ctx, path + ("pair",))
        if not isinstance(ty, Product):
            raise TypeMismatch("first projection of non-pair", path)
        return ty.left
    if isinstance(t, Proj2):
        ty = _tc(t.pair, ctx, path + ("pair",))
        if not isinstance(ty, Product):
            raise TypeMismatch("second projection of non-pair", path)
        return ty.right
    if isinstance(t, UnitVal):
        return UNIT
    if isinstance(t, IfThenElse):
        cond_ty = _tc(t.cond, ctx, path + ("cond",))
        if cond_ty != NAT:
            raise TypeMismatch("if-condition must be Nat (0 = true)", path)
        then_ty = _tc(t.then_branch, ctx, path + ("then",))
        else_ty = _tc(t.else_branch, ctx, path + ("else",))
        if then_ty != else_ty:
            raise TypeMismatch(
                f"branches disagree: {format_type(then_ty)} vs {format_type(else_ty)}",
                path)
        return then_ty
    if isinstance(t, Query):
        if len(t.params) != len(t.args):
            raise TypeMismatch("query arity mismatch", path)
        for i, a in enumerate(t.args):
            if _tc(a, ctx, path + (f"arg{i}",)) != NAT:
                raise TypeMismatch("query arguments must be Nat", path + (f"arg{i}",))
        return NAT
    raise TypeMismatch(f"unknown term node {type(t).__name__}", path)


# ---------------------------------------------------------------------------
# Normalization (normal-order / leftmost-outermost)
# ---------------------------------------------------------------------------

def _root_redex(t: Term, env) -> Optional[Term]:
    if isinstance(t, App):
        if isinstance(t.fun, Lambda):
            return substitute(t.fun.body, t.fun.var.name, t.arg)
        # recursor spine: R a b n with n a numeral
        if (isinstance(t.fun, App) and isinstance(t.fun.fun, App)
                and isinstance(t.fun.fun.fun, Rec)):
            n = as_int(t.arg)
            if n is not None:
                a = t.fun.fun.arg
                b = t.fun.arg
                if n == 0:
                    return a
                prev = App(t.fun, numeral(n - 1))
                return App(App(b, numeral(n - 1)), prev)
    if isinstance(t, Proj1) and isinstance(t.pair, Pair):
        return t.pair.left
    if isinstance(t, Proj2) and isinstance(t.pair, Pair):
        return t.pair.right
    if isinstance(t, IfThenElse):
        n = as_int(t.cond)
        if n is not None:
            return t.then_branch if n == 0 else t.else_branch
    if isinstance(t, Query) and env is not None:
        values = [as_int(a) for a in t.args]
        if all(v is not None for v in values):
            valuation = dict(zip(t.params, values))
            return ZERO if env.decide(t.test, valuation) else Succ(ZERO)
    return None


def _rebuild(t: Term, key: str, new: Term) -> Term:
    if isinstance(t, Succ):
        return Succ(new)
    if isinstance(t, Lambda):
        return Lambda(t.var, new)
    if isinstance(t, App):
        return App(new, t.arg) if key == "fun" else App(t.fun, new)
    if isinstance(t, Pair):
        return Pair(new, t.right) if key == "left" else Pair(t.left, new)
    if isinstance(t, Proj1):
        return Proj1(new)
    if isinstance(t, Proj2):
        return Proj2(new)
    if isinstance(t, IfThenElse):
        if key == "cond":
            return IfThenElse(new, t.then_branch, t.else_branch)
        if key == "then":
            return IfThenElse(t.cond, new, t.else_branch)
        return IfThenElse(t.cond, t.then_branch, new)
    if isinstance(t, Query):
        i = int(key[3:])
        args = list(t.args)
        args[i] = new
        return Query(t.test, t.params, tuple(args))
    raise TypeError(f"cannot rebuild {type(t).__name__}")


def _step(t: Term, env) -> Optional[Term]:
    red = _root_redex(t, env)
    if red is not None:
        return red
    for key, child in _children(t):
        r = _step(child, env)
        if r is not None:
            return _rebuild(t, key, r)
    return None


def normalize(t: Term, fuel: int = DEFAULT_FUEL, env=None) -> Term:
    """Reduce to beta/recursor/projection/if normal form.

    Normal order: the leftmost-outermost redex fires first, so branches of a
    conditional are never evaluated before the condition selects one.  ``env``
    (anything with a ``decide(test, valuation) -> bool`` method) enables Query
    reduction; without it queries stay symbolic.
    """
    steps = 0
    while True:
        nxt = _step(t, env)
        if nxt is None:
            return t
        t = nxt
        steps += 1
        if steps > fuel:
            raise FuelExhausted(f"no normal form within {fuel} steps")


def normalize_to_int(t: Term, fuel: int = DEFAULT_FUEL, env=None) -> int:
    value = as_int(normalize(t, fuel, env))
    if value is None:
        raise KernelError("normal form is not a numeral")
    return value


# ---------------------------------------------------------------------------
# Alpha equivalence
# ---------------------------------------------------------------------------

def alpha_canonical(t: Term) -> Term:
    """Rename bound variables to a canonical numbering for comparison."""
    counter = [0]

    def go(t, ren):
        if isinstance(t, Var):
            return Var(ren.get(t.name, t.name), t.type)
        if isinstance(t, Lambda):
            fresh = f"_b{counter[0]}"
            counter[0] += 1
            inner = dict(ren)
            inner[t.var.name] = fresh
            return Lambda(Var(fresh, t.var.type), go(t.body, inner))
        if isinstance(t, Succ):
            return Succ(go(t.arg, ren))
        if isinstance(t, App):
            return App(go(t.fun, ren), go(t.arg, ren))
        if isinstance(t, Pair):
            return Pair(go(t.left, ren), go(t.right, ren))
        if isinstance(t, Proj1):
            return Proj1(go(t.pair, ren))
        if isinstance(t, Proj2):
            return Proj2(go(t.pair, ren))
        if isinstance(t, IfThenElse):
            return IfThenElse(go(t.cond, ren), go(t.then_branch, ren),
                              go(t.else_branch, ren))
        if isinstance(t, Query):
            return Query(t.test, t.params, tuple(go(a, ren) for a in t.args))
        return t

    return go(t, {})


def alpha_eq(s: Term, t: Term) -> bool:
    return alpha_canonical(s) == alpha_canonical(t)


# ---------------------------------------------------------------------------
# Pretty printing
# ---------------------------------------------------------------------------

# Set by the formulas module so Query payloads print through the formula
# pretty-printer without a circular import.
_QUERY_FORMATTER: Optional[Callable] = None


def _format_query(q: Query, var_text) -> str:
    if _QUERY_FORMATTER is not None:
        return _QUERY_FORMATTER(q, var_text)
    inner = ", ".join(format_term(a, var_text) for a in q.args)
    return f"[{q.test}]({inner})" if q.args else f"[{q.test}]"


def format_term(t: Term, var_text=None) -> str:
    """Render a term in the concrete syntax understood by the parser."""
    var_text = var_text or {}

    def atom(t) -> str:
        if is_numeral(t):
            return str(as_int(t))
        if isinstance(t, Var):
            return var_text.get(t.name, t.name)
        if isinstance(t, UnitVal):
            return "()"
        if isinstance(t, Succ):
            return f"S({go(t.arg)})"
        if isinstance(t, Rec):
            return f"R[{format_type(t.type)}]"
        if isinstance(t, Pair):
            return f"<{go(t.left)}, {go(t.right)}>"
        if isinstance(t, Proj1):
            return f"fst({go(t.pair)})"
        if isinstance(t, Proj2):
            return f"snd({go(t.pair)})"
        if isinstance(t, Query):
            return _format_query(t, var_text)
        return f"({go(t)})"

    def appterm(t) -> str:
        if isinstance(t, App):
            return f"{appterm(t.fun)} {atom(t.arg)}"
        return atom(t)

    def go(t) -> str:
        if isinstance(t, Lambda):
            return f"\\{t.var.name}:{format_type(t.var.type)}. {go(t.body)}"
        if isinstance(t, IfThenElse):
            return (f"if {go(t.cond)} then {go(t.then_branch)} "
                    f"else {go(t.else_branch)}")
        return appterm(t)

    return go(t)
