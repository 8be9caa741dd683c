"""Mini Hilbert calculus, program extraction, and realizer verification.

The calculus covers exactly the inference shapes used in the two-branch
excluded-middle derivation of the drinkers paradox: propositional tautology
leaves, quantifier axioms applied through modus ponens, the two quantifier
rules, a branch combiner, decidable excluded middle, and contraction.

Extraction is structurally recursive over the derivation.  Each node carries
a list of witness bodies over positional challenge parameters c0, c1, ...
aligned with the real counters of the functional translation of its
conclusion; quantifier axioms instantiate, quantifier rules abstract, the
combiner merges the two branches at the challenge point supplied by the
universal branch, and contraction emits a single case split on the decidable
matrix.  Extracted case terms query the environment through Query nodes, so
the same term can later be run against any predicate table (or a stateful
wrapper that logs the queries).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import formulas, terms, translations
from .formulas import (And, Atom, BOT, CounterFunction, Exists, Forall,
                       Formula, Implies, Not, Or, PredicateEnv, eq0, eval_qf,
                       eval_term, formula_free_vars, is_quantifier_free,
                       map_atom_args, queryize, substitute_formula)
from .terms import (NAT, UNIT, Arrow, IfThenElse, Lambda, Pair, SimpleType,
                    Term, UNITVAL, Var, alpha_eq, apply, arrow, numeral)
from .translations import (NegVariant, WitnessSignature, dialectica_translate,
                           negative_translate, simplify_classical,
                           simplify_double_neg)


class DerivationError(Exception):
    pass


class UnsupportedNode(Exception):
    pass


class ContractionNotDecidable(Exception):
    pass


class CounterTypeNotEnumerable(Exception):
    pass


# ---------------------------------------------------------------------------
# Derivations
# ---------------------------------------------------------------------------

AXIOM_KINDS = ("ExistsAx", "ForallAx", "LEMDecidable", "PropTautology")
RULE_KINDS = ("ExistsR", "ForallR", "ModusPonens", "Contraction", "OrCombine")


@dataclass(frozen=True)
class Axiom:
    formula: Formula
    kind: str
    meta: tuple = ()          # sorted key/value pairs, kept hashable

    @property
    def conclusion(self) -> Formula:
        return self.formula

    @property
    def premises(self):
        return ()

    def info(self, key):
        return dict(self.meta)[key]


@dataclass(frozen=True)
class Rule:
    kind: str
    premises: tuple
    conclusion: Formula
    meta: tuple = ()

    def info(self, key):
        return dict(self.meta)[key]


Derivation = object


def _decidable_qf(f: Formula) -> bool:
    return is_quantifier_free(f)


def prop_tautology(f: Formula) -> Axiom:
    """Leaf axiom: a quantifier-free propositional tautology."""
    if not is_quantifier_free(f):
        raise DerivationError("tautology axioms must be quantifier-free")
    if not _is_tautology(f):
        raise DerivationError(f"not a propositional tautology: {f}")
    return Axiom(f, "PropTautology")


def _is_tautology(f: Formula) -> bool:
    atoms = []

    def collect(f):
        if isinstance(f, Atom) and f not in atoms:
            atoms.append(f)
        for sub in (f.left, f.right) if isinstance(f, (And, Or, Implies)) else ():
            collect(sub)

    collect(f)

    def value(f, assignment) -> bool:
        if isinstance(f, Atom):
            return assignment[f]
        if isinstance(f, formulas.Bot):
            return False
        if isinstance(f, And):
            return value(f.left, assignment) and value(f.right, assignment)
        if isinstance(f, Or):
            return value(f.left, assignment) or value(f.right, assignment)
        if isinstance(f, Implies):
            return (not value(f.left, assignment)) or value(f.right, assignment)
        raise DerivationError(f"non-propositional node {type(f).__name__}")

    for bits in itertools.product((False, True), repeat=len(atoms)):
        if not value(f, dict(zip(atoms, bits))):
            return False
    return True


def exists_axiom(hyp: Formula, body: Formula, var: str, instance: Term) -> Axiom:
    """(hyp -> A(t)) -> (hyp -> exists v. A): the existence axiom weakened
    under a fixed hypothesis, which is how it composes by modus ponens."""
    instantiated = substitute_formula(body, var, instance)
    formula = Implies(Implies(hyp, instantiated),
                      Implies(hyp, Exists(var, body)))
    meta = (("hyp", hyp), ("body", body), ("var", var), ("instance", instance))
    return Axiom(formula, "ExistsAx", meta)


def forall_axiom(body: Formula, var: str, instance: Term,
                 consequent: Formula) -> Axiom:
    """(A(t) -> B) -> (forall v. A -> B): the universal axiom in the composed
    form used for strengthening a hypothesis."""
    instantiated = substitute_formula(body, var, instance)
    formula = Implies(Implies(instantiated, consequent),
                      Implies(Forall(var, body), consequent))
    meta = (("body", body), ("var", var), ("instance", instance),
            ("consequent", consequent))
    return Axiom(formula, "ForallAx", meta)


def lem_axiom(f: Formula) -> Axiom:
    """Excluded middle, restricted to decidable content.

    Accepted shapes: a quantifier-free `A \\/ ~A` (or `~A \\/ A`), and the
    prenex split `exists x. ~Q \\/ forall x. Q` with Q quantifier-free, whose
    instances become decidable once the challenge point is known.
    """
    if isinstance(f, Or):
        left, right = f.left, f.right
        if _decidable_qf(f):
            if right == Not(left) or left == Not(right):
                return Axiom(f, "LEMDecidable")
        if (isinstance(left, Exists) and isinstance(right, Forall)
                and left.var == right.var
                and left.body == Not(right.body)
                and _decidable_qf(right.body)):
            return Axiom(f, "LEMDecidable", (("var", right.var),
                                             ("matrix", right.body)))
    raise DerivationError(f"not a supported excluded-middle instance: {f}")


def rule_forall_r(premise, var: str) -> Rule:
    concl = premise.conclusion
    if not isinstance(concl, Implies):
        raise DerivationError("universal rule needs an implication premise")
    if var in formula_free_vars(concl.left):
        raise DerivationError(f"variable {var!r} occurs free in the hypothesis")
    conclusion = Implies(concl.left, Forall(var, concl.right))
    return Rule("ForallR", (premise,), conclusion, (("var", var),))


def rule_exists_r(premise, var: str) -> Rule:
    concl = premise.conclusion
    if not isinstance(concl, Implies):
        raise DerivationError("existential rule needs an implication premise")
    if var in formula_free_vars(concl.right):
        raise DerivationError(f"variable {var!r} occurs free in the conclusion")
    conclusion = Implies(Exists(var, concl.left), concl.right)
    return Rule("ExistsR", (premise,), conclusion, (("var", var),))


def rule_mp(implication, antecedent) -> Rule:
    imp = implication.conclusion
    if not isinstance(imp, Implies):
        raise DerivationError("modus ponens needs an implication")
    if imp.left != antecedent.conclusion:
        raise DerivationError("modus ponens premises do not match")
    return Rule("ModusPonens", (implication, antecedent), imp.right)


def rule_or_combine(left, right) -> Rule:
    lc, rc = left.conclusion, right.conclusion
    if not (isinstance(lc, Implies) and isinstance(rc, Implies)):
        raise DerivationError("branch combiner needs two implications")
    conclusion = Implies(Or(lc.left, rc.left), Or(lc.right, rc.right))
    return Rule("OrCombine", (left, right), conclusion)


def rule_contraction(premise) -> Rule:
    concl = premise.conclusion
    if not (isinstance(concl, Or) and concl.left == concl.right):
        raise DerivationError("contraction needs a duplicated disjunction")
    return Rule("Contraction", (premise,), concl.left)


def count_nodes(d, kind: str) -> int:
    total = 0
    if (isinstance(d, Rule) and d.kind == kind) or \
       (isinstance(d, Axiom) and d.kind == kind):
        total += 1
    for p in getattr(d, "premises", ()):
        total += count_nodes(p, kind)
    return total


# ---------------------------------------------------------------------------
# Built-in derivations
# ---------------------------------------------------------------------------

def _p(t: Term) -> Formula:
    return Atom("P", (t,))


def dp_derivation() -> Rule:
    """Two-branch derivation of the drinkers paradox, joined by decidable
    excluded middle and one contraction."""
    k = Var("k", NAT)
    m = Var("m", NAT)
    dp_body = Forall("m", Implies(_p(Var("n", NAT)), _p(m)))

    # counterexample branch: exists k. ~P(k)  ->  DP
    left_leaf = prop_tautology(Implies(Not(_p(k)), Implies(_p(k), _p(m))))
    left_all = rule_forall_r(left_leaf, "m")
    left_ex = rule_mp(exists_axiom(Not(_p(k)), dp_body, "n", k), left_all)
    left = rule_exists_r(left_ex, "k")

    # everybody branch: forall k. P(k)  ->  DP
    right_leaf = prop_tautology(Implies(_p(m), Implies(_p(numeral(0)), _p(m))))
    right_hyp = rule_mp(
        forall_axiom(_p(k), "k", m, Implies(_p(numeral(0)), _p(m))), right_leaf)
    right_all = rule_forall_r(right_hyp, "m")
    right = rule_mp(exists_axiom(Forall("k", _p(k)), dp_body, "n", numeral(0)),
                    right_all)

    combined = rule_or_combine(left, right)
    lem = lem_axiom(Or(Exists("k", Not(_p(k))), Forall("k", _p(k))))
    both = rule_mp(combined, lem)
    return rule_contraction(both)


def dp_omega_formula(pred: str = "P") -> Formula:
    """Sequential form: exists f. forall n, m. (P[n](f n) -> P[n](m))."""
    f = Var("f", Arrow(NAT, NAT))
    n = Var("n", NAT)
    m = Var("m", NAT)
    return Exists(
        "f",
        Forall("n", Forall("m",
                           Implies(Atom(pred, (n, terms.App(f, n)), indexed=True),
                                   Atom(pred, (n, m), indexed=True)))),
        Arrow(NAT, NAT))


def builtin_derivations() -> dict:
    return {"DP": dp_derivation(), "DP_omega": dp_omega_formula()}


# ---------------------------------------------------------------------------
# Interpretation of conclusions
# ---------------------------------------------------------------------------

def classical_signature(f: Formula) -> WitnessSignature:
    """Functional signature of the negative translation, fully simplified."""
    translated = negative_translate(f, NegVariant.KURODA)
    return dialectica_translate(
        simplify_double_neg(translated, formulas.atom_symbols(f)))


def _param(i: int, ty: SimpleType) -> Var:
    return Var(f"c{i}", ty)


# ---------------------------------------------------------------------------
# Extraction
# ---------------------------------------------------------------------------

@dataclass
class _State:
    counter_types: list        # positional challenge parameter types
    bodies: list               # witness bodies over c0, c1, ...
    provenance: list


@dataclass
class _CombineState:
    counter_types: list
    left: list                 # instantiated counterexample-branch bodies
    right: list                # everybody-branch bodies (without challenge entry)
    challenge: Term            # the point where the universal hypothesis is tested
    lem_var: str
    lem_matrix: Formula
    conclusion_each: Formula
    provenance: list


@dataclass
class Realizer:
    term: Term
    signature: WitnessSignature
    provenance: tuple = ()
    free_vars: dict = field(default_factory=dict)


@dataclass
class VerificationReport:
    passed: bool
    checked: int
    counterexample: Optional[dict] = None


def _shift_params(body: Term, types, start: int, delta: int) -> Term:
    indices = range(len(types) - 1, start - 1, -1) if delta > 0 else \
        range(start, len(types))
    for i in indices:
        body = terms.substitute(body, f"c{i}",
                                Var(f"c{i + delta}", types[i]))
    return body


def _insertion_index(old, new, inserted_type) -> int:
    if len(new) != len(old) + 1:
        raise UnsupportedNode("challenge tuple changed by more than one entry")
    for p in range(len(new)):
        if new == old[:p] + [inserted_type] + old[p:]:
            return p
    raise UnsupportedNode("cannot align challenge tuples")


def _extract(d) -> object:
    if isinstance(d, Axiom):
        if d.kind == "PropTautology":
            sig = classical_signature(d.formula)
            if sig.real_witnesses():
                raise UnsupportedNode(
                    "tautology axioms with disjunctive witness content")
            return _State([t for _, t in sig.real_counters()], [],
                          [f"tautology leaf: {d.formula}"])
        raise UnsupportedNode(
            f"axiom {d.kind} is only interpreted through modus ponens")

    if not isinstance(d, Rule):
        raise UnsupportedNode(f"unknown node {type(d).__name__}")

    if d.kind == "ForallR":
        return _extract_quantifier_rule(d, exists_side=False)
    if d.kind == "ExistsR":
        return _extract_quantifier_rule(d, exists_side=True)
    if d.kind == "ModusPonens":
        return _extract_mp(d)
    if d.kind == "Contraction":
        return _extract_contraction(d)
    if d.kind == "OrCombine":
        raise UnsupportedNode(
            "branch combiner is interpreted jointly with excluded middle")
    raise UnsupportedNode(f"rule {d.kind}")


def _extract_quantifier_rule(d: Rule, exists_side: bool) -> _State:
    state = _extract(d.premises[0])
    if isinstance(state, _CombineState):
        raise UnsupportedNode("quantifier rule over an uncontracted combination")
    var = d.info("var")
    old = state.counter_types
    new_sig = classical_signature(d.conclusion)
    new = [t for _, t in new_sig.real_counters()]
    var_type = NAT
    p = _insertion_index(old, new, var_type)
    bodies = []
    for body in state.bodies:
        body = _shift_params(body, old, p, +1)
        body = terms.substitute(body, var, _param(p, var_type))
        bodies.append(body)
    label = "existential" if exists_side else "universal"
    state.provenance.append(f"{label} rule abstracts {var!r} as challenge {p}")
    return _State(new, bodies, state.provenance)


def _extract_mp(d: Rule) -> object:
    imp, ant = d.premises
    if isinstance(imp, Axiom) and imp.kind == "ExistsAx":
        return _extract_exists_step(d, imp, ant)
    if isinstance(imp, Axiom) and imp.kind == "ForallAx":
        return _extract_forall_step(d, imp, ant)
    if isinstance(imp, Rule) and imp.kind == "OrCombine" and \
            isinstance(ant, Axiom) and ant.kind == "LEMDecidable":
        return _extract_combine(d, imp, ant)
    # plain propositional composition: nothing to witness
    imp_state = _extract(imp)
    ant_state = _extract(ant)
    if isinstance(imp_state, _State) and isinstance(ant_state, _State) and \
            not imp_state.bodies and not ant_state.bodies:
        sig = classical_signature(d.conclusion)
        if not sig.real_witnesses():
            return _State([t for _, t in sig.real_counters()], [],
                          imp_state.provenance + ant_state.provenance)
    raise UnsupportedNode("modus ponens outside the supported patterns")


def _extract_exists_step(d: Rule, axiom: Axiom, ant) -> _State:
    state = _extract(ant)
    if isinstance(state, _CombineState):
        raise UnsupportedNode("existence axiom over an uncontracted combination")
    body_formula = axiom.info("body")
    instance = axiom.info("instance")
    old = state.counter_types
    new_sig = classical_signature(d.conclusion)
    new = [t for _, t in new_sig.real_counters()]

    if isinstance(body_formula, Forall) and is_quantifier_free(body_formula.body):
        # witness feeds the inner universal challenge through the new counter
        if old == new:
            raise UnsupportedNode("challenge tuple did not change as expected")
        diff = [i for i in range(len(old)) if i >= len(new) or old[i] != new[i]]
        if len(old) != len(new) or len(diff) != 1:
            raise UnsupportedNode("cannot align challenge tuples")
        j = diff[0]
        if old[j] != NAT or new[j] != Arrow(NAT, NAT):
            raise UnsupportedNode("unexpected challenge retyping")
        bodies = []
        for body in state.bodies:
            bodies.append(terms.substitute(
                body, f"c{j}",
                terms.App(_param(j, Arrow(NAT, NAT)), instance)))
        bodies = [instance] + bodies
    elif is_quantifier_free(body_formula):
        if old != new:
            raise UnsupportedNode("challenge tuple changed unexpectedly")
        bodies = [instance] + list(state.bodies)
    else:
        raise UnsupportedNode("existence axiom over nested quantifier shapes")

    expected = len(new_sig.real_witnesses())
    if len(bodies) != expected:
        raise UnsupportedNode("witness tuple misaligned after existence axiom")
    state.provenance.append(
        f"existence axiom instantiates witness with {terms.format_term(instance)}")
    return _State(new, bodies, state.provenance)


def _extract_forall_step(d: Rule, axiom: Axiom, ant) -> _State:
    state = _extract(ant)
    if isinstance(state, _CombineState):
        raise UnsupportedNode("universal axiom over an uncontracted combination")
    if not is_quantifier_free(axiom.info("body")):
        raise UnsupportedNode("universal axiom with a quantified matrix")
    instance = axiom.info("instance")
    old = state.counter_types
    new_sig = classical_signature(d.conclusion)
    new = [t for _, t in new_sig.real_counters()]
    if old != new:
        raise UnsupportedNode("challenge tuple changed unexpectedly")
    bodies = list(state.bodies) + [instance]
    if len(bodies) != len(new_sig.real_witnesses()):
        raise UnsupportedNode("witness tuple misaligned after universal axiom")
    state.provenance.append(
        f"universal axiom challenges hypothesis at {terms.format_term(instance)}")
    return _State(new, bodies, state.provenance)


def _extract_combine(d: Rule, orc: Rule, lem: Axiom) -> _CombineState:
    left_d, right_d = orc.premises
    lc, rc = left_d.conclusion, right_d.conclusion
    if lc.right != rc.right:
        raise UnsupportedNode("combined branches prove different conclusions")
    lem_f = lem.formula
    if not (isinstance(lem_f, Or) and lem_f.left == lc.left
            and lem_f.right == rc.left):
        raise UnsupportedNode("excluded middle does not match the branches")
    meta = dict(lem.meta)
    if "var" not in meta:
        raise UnsupportedNode("only the prenex excluded-middle shape is supported")

    left = _extract(left_d)
    right = _extract(right_d)
    if isinstance(left, _CombineState) or isinstance(right, _CombineState):
        raise UnsupportedNode("nested combinations")

    shared = right.counter_types
    if left.counter_types != [NAT] + shared:
        raise UnsupportedNode("branch challenge tuples do not align")
    n_wits = len(classical_signature(lc.right).real_witnesses())
    if len(right.bodies) != n_wits + 1 or len(left.bodies) != n_wits:
        raise UnsupportedNode("branch witness tuples do not align")

    challenge = right.bodies[-1]
    left_inst = []
    for body in left.bodies:
        body = terms.substitute(body, "c0", Var("_k", NAT))
        body = _shift_params(body, left.counter_types, 1, -1)
        body = terms.substitute(body, "_k", challenge)
        left_inst.append(body)

    provenance = left.provenance + right.provenance
    provenance.append(
        "excluded middle tested at challenge point "
        f"{terms.format_term(challenge)}")
    return _CombineState(shared, left_inst, right.bodies[:n_wits], challenge,
                         meta["var"], meta["matrix"], lc.right, provenance)


def _extract_contraction(d: Rule) -> _State:
    state = _extract(d.premises[0])
    if not isinstance(state, _CombineState):
        raise UnsupportedNode(
            "contraction is only supported over a combined excluded middle")
    sig = classical_signature(d.conclusion)
    if not is_quantifier_free(sig.matrix):
        raise ContractionNotDecidable("contraction matrix is not quantifier-free")

    matrix = sig.matrix
    for i, (name, ty) in enumerate(sig.real_counters()):
        matrix = substitute_formula(matrix, name, _param(i, ty))
    for (name, _ty), body in zip(sig.real_witnesses(), state.right):
        closure = body
        for i in reversed(range(len(state.counter_types))):
            closure = Lambda(_param(i, state.counter_types[i]), closure)
        matrix = substitute_formula(matrix, name, closure)
    matrix = map_atom_args(matrix, lambda t: terms.normalize(t))
    query = queryize(matrix)

    bodies = [IfThenElse(query, right, left)
              for right, left in zip(state.right, state.left)]
    state.provenance.append(
        f"contraction decides between branches by testing {query}")
    return _State(state.counter_types, bodies, state.provenance)


def _materialize(state, conclusion: Formula) -> Realizer:
    if isinstance(state, _CombineState):
        return _materialize_combine(state, conclusion)
    sig = classical_signature(conclusion)
    real = sig.real_witnesses()
    counter_types = state.counter_types
    wit_terms = []
    for (name, wtype), body in zip(real, state.bodies):
        expected = wtype
        for ct in counter_types:
            if not isinstance(expected, Arrow) or expected.domain != ct:
                raise UnsupportedNode(
                    f"witness {name} is not a function of the challenge tuple")
            expected = expected.codomain
        term = body
        for i in reversed(range(len(counter_types))):
            term = Lambda(_param(i, counter_types[i]), term)
        wit_terms.append(term)

    if not wit_terms:
        term: Term = UNITVAL
    else:
        term = wit_terms[-1]
        for t in reversed(wit_terms[:-1]):
            term = Pair(t, term)

    free = terms.free_vars(term)
    ctx = dict(free)
    terms.typecheck(term, ctx)
    return Realizer(term, sig, tuple(state.provenance), free)


def _materialize_combine(state: _CombineState, conclusion: Formula) -> Realizer:
    """Combined-but-uncontracted conclusions share one challenge tuple across
    both copies of the disjunction; the selector entry tests the excluded
    middle at the challenge point (this selector case split is extra to the
    one-per-contraction count)."""
    base = classical_signature(state.conclusion_each)
    real = base.real_witnesses()
    counters = tuple((f"c{i}", t) for i, t in enumerate(state.counter_types))

    def renamed_matrix(suffix):
        matrix = base.matrix
        for i, (name, ty) in enumerate(base.real_counters()):
            matrix = substitute_formula(matrix, name, _param(i, ty))
        for name, wty in real:
            matrix = substitute_formula(
                matrix, name, Var(f"{name}_{suffix}", wty))
        return matrix

    flag_test = substitute_formula(state.lem_matrix, state.lem_var,
                                   state.challenge)
    flag_test = map_atom_args(flag_test, lambda t: terms.normalize(t))
    flag_body = IfThenElse(queryize(flag_test), numeral(1), numeral(0))

    selector = _apply_counters("b", arrow(*[t for t in state.counter_types], NAT)
                               if state.counter_types else NAT, counters)
    matrix = And(Implies(eq0(selector), renamed_matrix("l")),
                 Implies(Not(eq0(selector)), renamed_matrix("r")))
    witnesses = ((("b", arrow(*[t for t in state.counter_types], NAT)
                   if state.counter_types else NAT),)
                 + tuple((f"{n}_l", t) for n, t in real)
                 + tuple((f"{n}_r", t) for n, t in real))
    sig = WitnessSignature(witnesses, counters, matrix)

    wit_terms = []
    for body in [flag_body] + list(state.left) + list(state.right):
        term = body
        for i in reversed(range(len(state.counter_types))):
            term = Lambda(_param(i, state.counter_types[i]), term)
        wit_terms.append(term)
    term = wit_terms[-1]
    for t in reversed(wit_terms[:-1]):
        term = Pair(t, term)

    free = terms.free_vars(term)
    terms.typecheck(term, dict(free))
    prov = tuple(state.provenance) + ("materialized shared-challenge disjunction",)
    return Realizer(term, sig, prov, free)


def _apply_counters(name: str, ty: SimpleType, counters) -> Term:
    return apply(Var(name, ty), *(Var(n, t) for n, t in counters))


def extract_dialectica(d) -> Realizer:
    """Extract a verified witness term from a derivation."""
    state = _extract(d)
    return _materialize(state, d.conclusion)


# ---------------------------------------------------------------------------
# Built-in realizers
# ---------------------------------------------------------------------------

def builtin_dp_realizer() -> Realizer:
    return extract_dialectica(dp_derivation())


def builtin_mr_realizer(cfg: translations.BotConfig = translations.BotConfig()
                        ) -> Realizer:
    """The backtracking realizer for the negative translation of the drinkers
    paradox: apply the refutation argument to the default witness 0, and if
    the environment refutes it at m, replay the argument at m, where it can
    no longer fail."""
    tau = cfg.bot_type
    sigma = arrow(NAT, arrow(NAT, tau, tau), tau)
    p = Var("p", sigma)
    m = Var("m", NAT)
    a = Var("a", tau)
    n = Var("n", NAT)
    b = Var("b", tau)
    test = queryize(Implies(_p(numeral(0)), _p(m)))
    inner = IfThenElse(test, a, apply(p, m, Lambda(n, Lambda(b, b))))
    handler = Lambda(m, Lambda(a, inner))
    term = Lambda(p, apply(p, numeral(0), handler))

    translated = simplify_double_neg(
        negative_translate(formulas.drinkers_formula(), NegVariant.KURODA))
    sig = translations.mr_translate(translated, cfg)
    assert terms.typecheck(term) == Arrow(sigma, tau)
    return Realizer(term, sig, ("hand-rolled realizer for the negative "
                                "translation of the drinkers paradox",))


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

def _flatten_value(value, count: int):
    if count == 0:
        return []
    out = []
    for _ in range(count - 1):
        out.append(value[0])
        value = value[1]
    out.append(value)
    return out


def verify_realizer(r: Realizer, env: PredicateEnv,
                    counters: Optional[Iterable] = None) -> VerificationReport:
    """Brute-force check of a realizer against its signature matrix.

    Nat challenges range over the carrier, Nat -> Nat challenges over all
    function tables (or a caller-supplied enumeration); anything higher needs
    the caller to provide the test set.
    """
    sig = r.signature
    d = env.domain_bound
    real_wits = sig.real_witnesses()
    real_cnts = sig.real_counters()
    extra = sorted(set(formula_free_vars(sig.matrix))
                   - {n for n, _ in real_wits} - {n for n, _ in real_cnts})
    free_names = sorted(r.free_vars) if r.free_vars else []
    supplied = list(counters) if counters is not None else None

    def slot_values(ty):
        if ty == NAT:
            return list(range(d))
        if ty == Arrow(NAT, NAT):
            if supplied is not None:
                return supplied
            return list(formulas.all_counter_tables(d))
        raise CounterTypeNotEnumerable(
            f"cannot enumerate challenges of type {terms.format_type(ty)}")

    checked = 0
    free_space = [list(range(d)) for _ in free_names]
    for free_vals in itertools.product(*free_space):
        free_binding = dict(zip(free_names, free_vals))
        closed = terms.substitute_many(
            r.term, {n: numeral(v) for n, v in free_binding.items()})
        value = eval_term(closed, {}, env)
        wit_values = _flatten_value(value, len(real_wits))
        base = dict(zip((n for n, _ in real_wits), wit_values))
        base.update(free_binding)
        spaces = [slot_values(ty) for _, ty in real_cnts]
        spaces += [list(range(d)) for _ in extra]
        names = [n for n, _ in real_cnts] + extra
        for combo in itertools.product(*spaces):
            valuation = dict(base)
            valuation.update(zip(names, combo))
            checked += 1
            if not eval_qf(sig.matrix, env, valuation):
                shown = {n: (v if isinstance(v, int) else repr(v))
                         for n, v in zip(names, combo)}
                return VerificationReport(False, checked, {
                    "challenges": shown,
                    "matrix": formulas.format_formula(sig.matrix),
                })
    return VerificationReport(True, checked, None)
