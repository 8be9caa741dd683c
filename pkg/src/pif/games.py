"""Quantifier game for prenex exists/forall matrices.

The proposer tries to establish `exists n. forall m. matrix` by naming a
witness; the opponent challenges it.  The proposer may backtrack.  The game
is made finite and decidable by a round bound: the opponent must falsify the
standing witness within the bound, otherwise the proposer wins with it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

from . import formulas, terms
from .formulas import (CounterFunction, Formula, PredicateEnv, eval_qf,
                       eval_term, formula_free_vars)
from .terms import NAT, Arrow


class StrategyOutOfDomain(Exception):
    pass


class ShapeMismatch(Exception):
    pass


ELOISE = "eloise"
ABELARD = "abelard"
UNDECIDED = "undecided"


@dataclass
class GameInstance:
    matrix: Formula
    env: PredicateEnv
    max_rounds: Optional[int] = None
    eloise_var: str = "n"
    abelard_var: str = "m"

    def __post_init__(self):
        if self.max_rounds is None:
            self.max_rounds = self.env.domain_bound + 1
        free = set(formula_free_vars(self.matrix))
        if free != {self.eloise_var, self.abelard_var}:
            raise ShapeMismatch(
                f"matrix must have free variables exactly "
                f"{{{self.eloise_var}, {self.abelard_var}}}, got {sorted(free)}")


@dataclass
class Round:
    eloise: int
    abelard: int
    matrix_value: bool


@dataclass
class Transcript:
    rounds: List[Round]
    winner: str

    def to_json(self) -> dict:
        return {"rounds": [[r.eloise, r.abelard, r.matrix_value]
                           for r in self.rounds],
                "winner": self.winner}


# Strategies are callables (game, history, current) -> move, where history
# holds the completed rounds and current is the proposer's standing move
# (None when the proposer itself is to move).

def constant_strategy(value: int):
    return lambda game, history, current=None: value


def scripted_strategy(moves, repeat_last: bool = True):
    moves = list(moves)

    def strat(game, history, current=None):
        i = len(history)
        if i < len(moves):
            return moves[i]
        if repeat_last and moves:
            return moves[-1]
        return 0

    return strat


def sweep_strategy():
    """Challenge every carrier value in order."""
    return lambda game, history, current=None: len(history) % game.env.domain_bound


def backtracking_eloise():
    """Open with 0; after a refuted claim, adopt the refuting challenge."""

    def strat(game, history, current=None):
        witness = 0
        for rnd in history:
            if not rnd.matrix_value:
                witness = rnd.abelard
        return witness

    return strat


def counter_abelard(g):
    """Challenge with g applied to the proposer's current move."""
    fn = g if callable(g) else CounterFunction(g)

    def strat(game, history, current=None):
        base = current if current is not None else 0
        return fn(base) % game.env.domain_bound

    return strat


def play(game: GameInstance, eloise, abelard) -> Transcript:
    """Run the bounded game and decide a winner.

    The proposer moves first each round; a true matrix value means the
    standing witness survived the challenge.  The proposer wins when the
    final round's claim stands (by then every challenge within the bound has
    had its chance), otherwise the opponent does.
    """
    rounds: List[Round] = []
    for _ in range(game.max_rounds):
        e = eloise(game, rounds)
        if not 0 <= e < game.env.domain_bound:
            raise StrategyOutOfDomain(f"proposer move {e} outside the carrier")
        a = abelard(game, rounds, e)
        if not 0 <= a < game.env.domain_bound:
            raise StrategyOutOfDomain(f"opponent move {a} outside the carrier")
        value = eval_qf(game.matrix, game.env,
                        {game.eloise_var: e, game.abelard_var: a})
        rounds.append(Round(e, a, value))
    if not rounds:
        return Transcript(rounds, UNDECIDED)
    winner = ELOISE if rounds[-1].matrix_value else ABELARD
    return Transcript(rounds, winner)


def first_winning_move(transcript: Transcript) -> Optional[int]:
    """The earliest witness the proposer held through the end of the game."""
    if transcript.winner != ELOISE:
        return None
    move = transcript.rounds[-1].eloise
    for rnd in reversed(transcript.rounds):
        if rnd.eloise != move or not rnd.matrix_value:
            break
        move = rnd.eloise
    return move


def strategy_from_realizer(realizer, env: PredicateEnv):
    """Turn an extracted witness term into a proposer strategy.

    The challenge function shown to the term is the table of the opponent's
    best-known challenges, initially constant 0 and updated at each
    challenged point; the strategy replays the term against it every round.
    """
    sig = realizer.signature
    wits = sig.real_witnesses()
    cnts = sig.real_counters()
    if len(wits) != 1 or len(cnts) != 1 or cnts[0][1] != Arrow(NAT, NAT):
        raise ShapeMismatch(
            "strategy extraction needs one witness against one Nat -> Nat challenge")
    if wits[0][1] != Arrow(Arrow(NAT, NAT), NAT):
        raise ShapeMismatch("witness must map a challenge function to a value")

    def strat(game, history, current=None):
        table = {}
        for rnd in history:
            table[rnd.eloise] = rnd.abelard
        counter = lambda x: table.get(x, 0)
        value = eval_term(realizer.term, {}, env)(counter)
        return value % game.env.domain_bound

    return strat


def replay(game: GameInstance, eloise, transcript: Transcript) -> Transcript:
    """Re-run a game with the opponent's recorded moves as a script."""
    moves = [r.abelard for r in transcript.rounds]
    return play(game, eloise, scripted_strategy(moves))
