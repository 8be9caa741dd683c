"""Learning procedures and stateful realizers.

A learning algorithm is a triple (Q, xi, oplus): a goodness test, a
building-block producer, and a combinator.  It drives the iteration
x(i+1) = x(i) when Q(x(i)) holds, else x(i) (+) xi(x(i)); the first good
approximation is the limit.  The sequential drinkers-paradox solver applies
this to finite approximations of a choice function, with the functionals
constrained to continuity structurally: they only see the approximation
through a logged lookup interface.

Stateful realizers thread a query log through the computation so a witness
comes back with the reason it works; the memoizing variant answers repeated
tests from the log first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from . import formulas, terms
from .formulas import CounterFunction, PredicateEnv, eval_term
from .terms import Term


class InconsistentState(Exception):
    pass


# ---------------------------------------------------------------------------
# Generic learning procedures
# ---------------------------------------------------------------------------

def _as_predicate(q, env):
    """Accept host callables or closed Nat-valued terms (0 = true)."""
    if callable(q):
        return lambda x: bool(q(x))
    fn = eval_term(q, {}, env)
    return lambda x: fn(x) == 0


def _as_function(f, env):
    if callable(f):
        return f
    return eval_term(f, {}, env)


def _as_binary(f, env):
    if callable(f):
        return f
    curried = eval_term(f, {}, env)
    return lambda x, y: curried(x)(y)


@dataclass
class LearningAlgorithm:
    q: Union[Callable, Term]            # goodness test on approximations
    xi: Union[Callable, Term]           # produces the next building block
    oplus: Union[Callable, Term]        # combines approximation and block
    approx_type: Optional[object] = None
    block_type: Optional[object] = None


@dataclass
class LearningStep:
    approximation: object
    good: bool
    block: object = None                 # the update applied, if any


@dataclass
class LearningTrace:
    steps: list
    limit: object
    terminated: bool


def run_learning(alg: LearningAlgorithm, x0, fuel: int,
                 env: Optional[PredicateEnv] = None) -> LearningTrace:
    """Run the learning iteration for at most ``fuel`` goodness checks.

    Each step records the approximation examined, the verdict, and the block
    used to update it (None when the verdict was good).  Running out of fuel
    returns a trace with ``terminated`` False rather than raising.
    """
    if fuel < 1:
        raise ValueError("fuel must be at least 1")
    good = _as_predicate(alg.q, env)
    xi = _as_function(alg.xi, env)
    oplus = _as_binary(alg.oplus, env)

    steps = []
    x = x0
    for _ in range(fuel):
        if good(x):
            steps.append(LearningStep(x, True))
            return LearningTrace(steps, x, True)
        block = xi(x)
        steps.append(LearningStep(x, False, block))
        x = oplus(x, block)
    return LearningTrace(steps, x, False)


def validate_learning_trace(alg: LearningAlgorithm, trace: LearningTrace, x0,
                            env: Optional[PredicateEnv] = None) -> bool:
    """Independently replay the recursion against a recorded trace."""
    good = _as_predicate(alg.q, env)
    xi = _as_function(alg.xi, env)
    oplus = _as_binary(alg.oplus, env)
    x = x0
    for i, step in enumerate(trace.steps):
        if step.approximation != x or step.good != good(x):
            return False
        if step.good:
            return i == len(trace.steps) - 1 and trace.terminated \
                and trace.limit == x
        if step.block != xi(x):
            return False
        x = oplus(x, step.block)
    return (not trace.terminated) and trace.limit == x


def dp_learning_algorithm(g, env: PredicateEnv,
                          pred: str = "P") -> LearningAlgorithm:
    """The two-step drinkers-paradox instance: a witness x is good when
    P(x) -> P(g x); a failure hands the challenge value over as the update."""
    counter = g if callable(g) else CounterFunction(g)

    def good(x):
        return (not env.holds(pred, (x,))) or env.holds(pred, (counter(x),))

    return LearningAlgorithm(q=good, xi=lambda x: counter(x),
                             oplus=lambda x, y: y)


def dp_learning_limit(g, env: PredicateEnv, pred: str = "P",
                      fuel: int = 8) -> LearningTrace:
    return run_learning(dp_learning_algorithm(g, env, pred), 0, fuel)


# ---------------------------------------------------------------------------
# Finite choice-function approximations
# ---------------------------------------------------------------------------

class FiniteFunction:
    """Everywhere-defined function given by finitely many overrides over a
    default value, with an append-only log of looked-up arguments."""

    def __init__(self, default: int = 0, overrides: Optional[dict] = None):
        self.default = default
        self.overrides = dict(overrides or {})
        self.log: list = []

    def __call__(self, n: int) -> int:
        self.log.append(n)
        return self.overrides.get(n, self.default)

    def peek(self, n: int) -> int:
        """Lookup without logging (inspection only)."""
        return self.overrides.get(n, self.default)

    def update(self, n: int, value: int) -> "FiniteFunction":
        new = dict(self.overrides)
        new[n] = value
        return FiniteFunction(self.default, new)

    def __eq__(self, other):
        return (isinstance(other, FiniteFunction)
                and self.default == other.default
                and self.overrides == other.overrides)

    def __repr__(self):
        inside = ", ".join(f"{k}->{v}" for k, v in sorted(self.overrides.items()))
        return f"FiniteFunction(default={self.default}, {{{inside}}})"

    def snapshot(self) -> dict:
        return dict(self.overrides)


def dp_omega_solve(omega, phi, family, fuel: int = 1000,
                   env: Optional[PredicateEnv] = None):
    """Solve the sequential drinkers paradox for functionals omega and phi.

    ``family(n, m)`` decides the n-th predicate at m.  The functionals may be
    host callables or closed terms of type (Nat -> Nat) -> Nat; either way
    they see the approximation only through its logged lookup interface, so
    continuity is enforced structurally rather than assumed.  Returns the
    final approximation together with the learning trace, whose blocks are
    the (position, value) pairs written.
    """
    omega_fn = _as_function(omega, env)
    phi_fn = _as_function(phi, env)

    def good(f: FiniteFunction) -> bool:
        n = omega_fn(f)
        return (not family(n, f(n))) or family(n, phi_fn(f))

    def block(f: FiniteFunction):
        return (omega_fn(f), phi_fn(f))

    alg = LearningAlgorithm(q=good, xi=block,
                            oplus=lambda f, ny: f.update(ny[0], ny[1]))
    trace = run_learning(alg, FiniteFunction(0), fuel)
    return trace.limit, trace


# ---------------------------------------------------------------------------
# Stateful realizers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    pred: str
    args: tuple
    positive: bool

    def __str__(self):
        inside = ", ".join(str(a) for a in self.args)
        sign = "" if self.positive else "~"
        return f"{sign}{self.pred}({inside})"


@dataclass(frozen=True)
class QueryState:
    literals: tuple = ()

    def extend(self, *items: Literal) -> "QueryState":
        return QueryState(self.literals + tuple(items))

    def lookup(self, pred: str, args: tuple) -> Optional[bool]:
        for lit in self.literals:
            if lit.pred == pred and lit.args == args:
                return lit.positive
        return None

    def truthful(self, env: PredicateEnv) -> bool:
        return all(env.holds(lit.pred, lit.args) == lit.positive
                   for lit in self.literals)

    def __str__(self):
        return "[" + ", ".join(str(l) for l in self.literals) + "]"


class _CountingEnv:
    def __init__(self, env: PredicateEnv):
        self.env = env
        self.calls = 0

    def holds(self, pred, args):
        self.calls += 1
        return self.env.holds(pred, args)


def stateful_dp_realizer(g, env: PredicateEnv, state: QueryState,
                         pred: str = "P"):
    """Drinkers-paradox witness with its supporting evidence appended.

    Tests run in order: first the default witness's premise, then the
    challenged value; the returned state extends the input by exactly the
    literals tested, so the caller learns why the witness works.
    """
    counter = g if callable(g) else CounterFunction(g)
    if not env.holds(pred, (0,)):
        return 0, state.extend(Literal(pred, (0,), False))
    challenged = counter(0)
    if env.holds(pred, (challenged,)):
        return 0, state.extend(Literal(pred, (0,), True),
                               Literal(pred, (challenged,), True))
    return challenged, state.extend(Literal(pred, (0,), True),
                                    Literal(pred, (challenged,), False))


def stateful_dp_realizer_memo(g, env: PredicateEnv, state: QueryState,
                              pred: str = "P"):
    """Like ``stateful_dp_realizer`` but answering from the state first.

    The input state is audited against the environment up front (those audit
    lookups are not counted); a literal contradicting the environment raises
    InconsistentState rather than being trusted.  ``oracle_calls`` counts
    only the fresh lookups needed to answer tests, and already-known literals
    are not appended again.
    """
    counter = g if callable(g) else CounterFunction(g)
    for lit in state.literals:
        if env.holds(lit.pred, lit.args) != lit.positive:
            raise InconsistentState(f"state literal {lit} contradicts environment")

    counting = _CountingEnv(env)
    new_literals = []

    def test(args: tuple) -> bool:
        known = state.lookup(pred, args)
        if known is not None:
            return known
        value = counting.holds(pred, args)
        lit = Literal(pred, args, value)
        if lit not in new_literals:
            new_literals.append(lit)
        return value

    if not test((0,)):
        witness = 0
    else:
        challenged = counter(0)
        witness = 0 if test((challenged,)) else challenged
    return witness, state.extend(*new_literals), counting.calls
