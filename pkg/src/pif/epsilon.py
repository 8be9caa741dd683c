"""Epsilonization of derivations and the substitution solver.

Quantifiers are compiled away into choice terms: an existential quantifier
becomes a term standing for "some witness, if one exists", a universal one
becomes a challenge function supplied by the caller.  Quantifier axioms leave
behind critical axioms; the solver starts from the all-zero assignment and
repairs the first failing axiom with its instance term until everything
holds, recording a full trace.

Choice terms are embedded as ordinary kernel variables (applied to their
index arguments when the term is a family), so critical axioms are plain
formulas and evaluation reuses the standard machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Union

from . import formulas, terms
from .formulas import (Atom, Formula, Implies, Not, PredicateEnv, eval_qf,
                       eval_term, formula_free_vars, is_quantifier_free,
                       map_atom_args, substitute_formula)
from .proofs import Axiom, DerivationError, Rule, UnsupportedNode
from .terms import NAT, Arrow, Term, Var, apply, arrow, numeral


class EvaluationCycle(Exception):
    pass


class SolveFuelExhausted(Exception):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


EXISTENTIAL = "existential"
UNIVERSAL = "universal"


@dataclass(frozen=True)
class EpsilonTerm:
    id: str
    bound_var: str
    matrix: Formula
    role: str
    parameters: tuple = ()       # formal parameter names for families

    def term_type(self):
        return arrow(*([NAT] * len(self.parameters)), NAT) if self.parameters else NAT

    def instance(self, args=()):
        head = Var(self.id, self.term_type())
        return apply(head, *args)


@dataclass(frozen=True)
class CriticalAxiom:
    id: str
    instance_term: Term
    target: EpsilonTerm
    formula: Formula


@dataclass
class EpsilonProblem:
    epsilon_terms: list
    axioms: list
    conclusion: Formula

    def existentials(self):
        return [e for e in self.epsilon_terms if e.role == EXISTENTIAL]

    def universals(self):
        return [e for e in self.epsilon_terms if e.role == UNIVERSAL]


@dataclass
class SolveStep:
    kind: str                    # init | query | repair | end
    axiom: Optional[str] = None
    value: Optional[bool] = None
    target: Optional[str] = None
    assignment: dict = field(default_factory=dict)
    symbolic: dict = field(default_factory=dict)


@dataclass
class SolveTrace:
    steps: list

    def repairs(self):
        return [s for s in self.steps if s.kind == "repair"]

    def queries(self):
        return [s for s in self.steps if s.kind == "query"]


# ---------------------------------------------------------------------------
# Choice-term registry
# ---------------------------------------------------------------------------

def _canonical_matrix(matrix: Formula, bound_var: str) -> Formula:
    return substitute_formula(matrix, bound_var, Var("_x", NAT))


def _match_formula(pattern: Formula, slots: set, target: Formula,
                   binding: dict) -> bool:
    if isinstance(pattern, Atom) and isinstance(target, Atom):
        if pattern.pred != target.pred or len(pattern.args) != len(target.args) \
                or pattern.indexed != target.indexed:
            return False
        return all(_match_term(p, slots, t, binding)
                   for p, t in zip(pattern.args, target.args))
    if type(pattern) is not type(target):
        return False
    if isinstance(pattern, (formulas.And, formulas.Or, formulas.Implies)):
        return (_match_formula(pattern.left, slots, target.left, binding)
                and _match_formula(pattern.right, slots, target.right, binding))
    if isinstance(pattern, (formulas.Forall, formulas.Exists)):
        return (pattern.var == target.var
                and _match_formula(pattern.body, slots, target.body, binding))
    return pattern == target


def _match_term(pattern: Term, slots: set, target: Term, binding: dict) -> bool:
    if isinstance(pattern, Var) and pattern.name in slots:
        if pattern.name in binding:
            return binding[pattern.name] == target
        binding[pattern.name] = target
        return True
    if type(pattern) is not type(target):
        return False
    if isinstance(pattern, Var):
        return pattern.name == target.name
    if isinstance(pattern, terms.App):
        return (_match_term(pattern.fun, slots, target.fun, binding)
                and _match_term(pattern.arg, slots, target.arg, binding))
    if isinstance(pattern, terms.Succ):
        return _match_term(pattern.arg, slots, target.arg, binding)
    return pattern == target


class _Registry:
    def __init__(self):
        self.templates: list = []
        self._used_ids = set()

    def _fresh_id(self, base: str) -> str:
        name = f"eps_{base}"
        i = 1
        while name in self._used_ids:
            name = f"eps_{base}{i}"
            i += 1
        self._used_ids.add(name)
        return name

    def existential(self, var: str, matrix: Formula) -> EpsilonTerm:
        canon = _canonical_matrix(matrix, var)
        for t in self.templates:
            if t.role == EXISTENTIAL and _canonical_matrix(t.matrix, t.bound_var) == canon:
                return t
        t = EpsilonTerm(self._fresh_id(var), var, matrix, EXISTENTIAL)
        self.templates.append(t)
        return t

    def universal_instance(self, var: str, matrix: Formula) -> Term:
        """Return the choice-term instance for a universal challenge.

        Matching is first-created-wins: a later matrix that is an instance of
        an existing family reuses it; otherwise a new template is created with
        the matrix's free variables as formal parameters.  A parameterless
        request that coincides with an existing assignable term reuses that
        term (the same choice term can interpret a quantifier on both sides).
        """
        canon = _canonical_matrix(matrix, var)
        for t in self.templates:
            if t.role != UNIVERSAL:
                continue
            binding: dict = {}
            pattern = _canonical_matrix(t.matrix, t.bound_var)
            if _match_formula(pattern, set(t.parameters), canon, binding):
                args = tuple(binding[p] for p in t.parameters)
                return t.instance(args)
        for t in self.templates:
            if t.role == EXISTENTIAL and \
                    _canonical_matrix(t.matrix, t.bound_var) == canon:
                return t.instance()
        params = tuple(n for n in formula_free_vars(matrix) if n != var)
        t = EpsilonTerm(self._fresh_id(var), var, matrix, UNIVERSAL, params)
        self.templates.append(t)
        return t.instance(tuple(Var(p, NAT) for p in params))


# ---------------------------------------------------------------------------
# Epsilonization
# ---------------------------------------------------------------------------

def _etrans(f: Formula, registry: _Registry) -> Formula:
    if isinstance(f, formulas.Exists):
        body = _etrans(f.body, registry)
        eps = registry.existential(f.var, body)
        return substitute_formula(body, f.var, eps.instance())
    if isinstance(f, formulas.Forall):
        body = _etrans(f.body, registry)
        inst = registry.universal_instance(f.var, Not(body))
        return substitute_formula(body, f.var, inst)
    return formulas.map_formula(lambda sub: _etrans(sub, registry), f)


def epsilonize(d) -> EpsilonProblem:
    """Translate a derivation: choice terms, critical axioms, conclusion."""
    registry = _Registry()
    axioms: list = []
    origins: list = []

    def subst_everywhere(name: str, t: Term):
        for i, ax in enumerate(axioms):
            axioms[i] = CriticalAxiom(
                ax.id,
                terms.substitute(ax.instance_term, name, t),
                ax.target,
                substitute_formula(ax.formula, name, t))

    def add_axiom(origin: str, instance: Term, target: EpsilonTerm,
                  formula: Formula):
        axioms.append(CriticalAxiom("?", instance, target, formula))
        origins.append(origin)

    def walk(d) -> Formula:
        if isinstance(d, Axiom):
            if d.kind == "PropTautology":
                return d.formula
            if d.kind == "LEMDecidable":
                return _etrans(d.formula, registry)
            raise UnsupportedNode(
                f"axiom {d.kind} is only interpreted through modus ponens")
        if not isinstance(d, Rule):
            raise UnsupportedNode(f"unknown node {type(d).__name__}")

        if d.kind == "ForallR":
            premise = walk(d.premises[0])
            var = d.info("var")
            inst = registry.universal_instance(var, Not(premise.right))
            subst_everywhere(var, inst)
            return Implies(premise.left,
                           substitute_formula(premise.right, var, inst))
        if d.kind == "ExistsR":
            premise = walk(d.premises[0])
            var = d.info("var")
            eps = registry.existential(var, premise.left)
            subst_everywhere(var, eps.instance())
            return Implies(substitute_formula(premise.left, var, eps.instance()),
                           premise.right)
        if d.kind == "Contraction":
            premise = walk(d.premises[0])
            return premise.left
        if d.kind == "OrCombine":
            left = walk(d.premises[0])
            right = walk(d.premises[1])
            return Implies(formulas.Or(left.left, right.left),
                           formulas.Or(left.right, right.right))
        if d.kind == "ModusPonens":
            imp, ant = d.premises
            if isinstance(imp, Axiom) and imp.kind == "ExistsAx":
                premise = walk(ant)
                body = _etrans(imp.info("body"), registry)
                var = imp.info("var")
                instance = imp.info("instance")
                eps = registry.existential(var, body)
                instantiated = substitute_formula(body, var, instance)
                ideal = substitute_formula(body, var, eps.instance())
                add_axiom("ExistsAx", instance, eps, Implies(instantiated, ideal))
                return Implies(premise.left, ideal)
            if isinstance(imp, Axiom) and imp.kind == "ForallAx":
                premise = walk(ant)
                body = _etrans(imp.info("body"), registry)
                var = imp.info("var")
                instance = imp.info("instance")
                eps = registry.existential(var, Not(body))
                at_eps = substitute_formula(body, var, eps.instance())
                at_instance = substitute_formula(body, var, instance)
                add_axiom("ForallAx", instance, eps, Implies(at_eps, at_instance))
                return Implies(at_eps, premise.right)
            imp_t = walk(imp)
            walk(ant)
            if not isinstance(imp_t, Implies):
                raise UnsupportedNode("modus ponens over a non-implication")
            return imp_t.right
        raise UnsupportedNode(f"rule {d.kind}")

    conclusion = walk(d)
    # Universal-axiom instances are listed (and examined) before existential
    # ones, which reproduces the usual numbering on the two-branch derivation.
    ordered = ([ax for ax, o in zip(axioms, origins) if o == "ForallAx"]
               + [ax for ax, o in zip(axioms, origins) if o == "ExistsAx"])
    numbered = [CriticalAxiom(f"C{i + 1}", ax.instance_term, ax.target, ax.formula)
                for i, ax in enumerate(ordered)]
    return EpsilonProblem(list(registry.templates), numbered, conclusion)


def dp_epsilon_problem() -> EpsilonProblem:
    from .proofs import dp_derivation
    return epsilonize(dp_derivation())


# ---------------------------------------------------------------------------
# Substitution solver
# ---------------------------------------------------------------------------

def _symbolic_text(term: Term, depth: int = 0) -> str:
    if depth > 64:
        raise EvaluationCycle("choice-term display exceeds nesting bound")
    return terms.format_term(term)


def default_fuel(axiom_count: int) -> int:
    return axiom_count ** 2 + 8


def substitution_solve(problem: EpsilonProblem, env: PredicateEnv,
                       universal_interp: Mapping[str, Callable],
                       fuel: Optional[int] = None):
    """Assign-query-repair loop over the critical axioms.

    Examination is in fixed list order, restarting from the head after every
    repair; a repair overwrites the failing axiom's target with the value of
    its instance term, so previously repaired axioms are re-checked.  Returns
    the final assignment and a full trace (every examination is a query step).
    """
    if fuel is None:
        fuel = default_fuel(len(problem.axioms))
    assignment = {e.id: 0 for e in problem.existentials()}
    symbolic = {e.id: "0" for e in problem.existentials()}
    missing = [e.id for e in problem.universals() if e.id not in universal_interp]
    if missing:
        raise DerivationError(f"no interpretation for challenge terms {missing}")

    def valuation() -> dict:
        vals: dict = dict(assignment)
        for e in problem.universals():
            vals[e.id] = universal_interp[e.id]
        return vals

    steps = [SolveStep("init", assignment=dict(assignment),
                       symbolic=dict(symbolic))]
    repairs = 0
    while True:
        failing = None
        for ax in problem.axioms:
            value = bool(eval_qf(ax.formula, env, valuation()))
            steps.append(SolveStep("query", axiom=ax.id, value=value,
                                   assignment=dict(assignment)))
            if not value:
                failing = ax
                break
        if failing is None:
            steps.append(SolveStep("end", assignment=dict(assignment),
                                   symbolic=dict(symbolic)))
            return assignment, SolveTrace(steps)
        if repairs >= fuel:
            raise SolveFuelExhausted(
                f"no fixed point within {fuel} repairs", SolveTrace(steps))
        new_value = eval_term(failing.instance_term, valuation(), env)
        assignment[failing.target.id] = int(new_value)
        symbolic[failing.target.id] = _symbolic_text(failing.instance_term)
        repairs += 1
        steps.append(SolveStep("repair", axiom=failing.id,
                               target=failing.target.id,
                               assignment=dict(assignment),
                               symbolic=dict(symbolic)))


def check_solution(problem: EpsilonProblem, env: PredicateEnv,
                   universal_interp: Mapping[str, Callable],
                   assignment: Mapping[str, int]) -> bool:
    """Independent re-evaluation of every critical axiom under an assignment."""
    vals = dict(assignment)
    for e in problem.universals():
        vals[e.id] = universal_interp[e.id]
    return all(eval_qf(ax.formula, env, vals) for ax in problem.axioms)


def conclusion_witness(problem: EpsilonProblem, assignment: Mapping[str, int],
                       existential_var: str = "n") -> int:
    """Read the drinker witness off the assignment: the value of the choice
    term that interprets the outer existential quantifier."""
    for e in problem.existentials():
        if e.bound_var == existential_var:
            return assignment[e.id]
    raise KeyError(f"no existential choice term for {existential_var!r}")
