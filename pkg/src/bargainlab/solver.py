"""Subgame-perfect equilibrium of the finite-round majority bargaining game.

The solver runs backward induction over information states.  In every state
the proposer offers the cheaper non-proposer exactly that player's expected
continuation payoff, keeps the remainder of the current budget, and offers
zero to the third player.  Voters accept any share at least as large as their
own continuation value (indifference resolves to accept), so every
equilibrium proposal passes.  When both potential partners are exactly
equally cheap, the policy is a 50/50 mixture over the two minimal-winning
offers and continuation values use the mixture expectation.

All interior arithmetic is exact rational arithmetic; floats appear only in
display helpers, so predicted values such as 55/72 are reproduced exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .game import (
    PLAYERS,
    Disclosure,
    DisclosureKind,
    GameSpec,
    InfoProtocol,
    InfoState,
    RecognitionModel,
    _disclosure_distribution,
    as_fraction,
    enumerate_info_states,
    validate_spec,
)

Offer = tuple[Fraction, Fraction, Fraction]
Vector = tuple[Fraction, Fraction, Fraction]


class SolverError(ValueError):
    pass


class SpecInvalidError(SolverError):
    pass


class UnknownStateError(SolverError):
    pass


class PlayerIsProposerError(SolverError):
    pass


class ConditionNotApplicableError(SolverError):
    pass


class PartnerClass(Enum):
    WEAK = "weak"
    STRONG = "strong"
    NA = "na"


class Condition(Enum):
    """Whether the current proposer might also propose next round (INCL) or is
    ruled out of proposing next round (EXCL)."""

    INCL = "incl"
    EXCL = "excl"
    UNCONDITIONAL = "unconditional"


@dataclass(frozen=True)
class EquilibriumSolution:
    """Backward-induction output for one treatment.

    ``continuation`` maps each state to the expected payoff vector (fractions
    of the round-1 prize) conditional on the current proposal being rejected;
    ``policy`` maps each state to one or two (offer, probability) pairs with
    offers expressed as shares of the current budget; ``values`` holds the
    expected equilibrium payoff vector of the subgame starting at each state.
    """

    spec: GameSpec
    continuation: dict[InfoState, Vector]
    policy: dict[InfoState, tuple[tuple[Offer, Fraction], ...]]
    partner_class: dict[InfoState, dict[int, PartnerClass]]
    values: dict[InfoState, Vector]
    state_probs: dict[InfoState, Fraction]
    first_share: Fraction

    def states(self, round_index: int | None = None) -> list[InfoState]:
        out = [s for s in self.state_probs if round_index is None or s.round == round_index]
        return sorted(out, key=lambda s: (s.round, s.proposer, s.disclosure.kind.value,
                                          -1 if s.disclosure.player is None else s.disclosure.player))


def _next_state_distribution(spec: GameSpec, state: InfoState) -> dict[InfoState, Fraction]:
    """Distribution of next-round information states conditional on the
    current state's disclosure (recognition draws are independent across
    rounds, so only the disclosure matters)."""
    next_round = state.round + 1
    mu = spec.recognition.round_distribution(next_round)
    d = state.disclosure
    if d.kind is DisclosureKind.KNOWN_NEXT:
        proposer_probs = {d.player: Fraction(1)}
    elif d.kind is DisclosureKind.EXCLUDED_NEXT:
        mass = sum(mu[q] for q in PLAYERS if q != d.player)
        proposer_probs = {
            q: mu[q] / mass for q in PLAYERS if q != d.player and mu[q] > 0
        }
    else:
        proposer_probs = {q: mu[q] for q in PLAYERS if mu[q] > 0}
    disclosure_dist = _disclosure_distribution(spec, next_round)
    budget = spec.budget_fraction(next_round)
    out: dict[InfoState, Fraction] = {}
    for q, pq in proposer_probs.items():
        for disc, pd in disclosure_dist.items():
            out[InfoState(next_round, q, disc, budget)] = pq * pd
    return out


def _continuation_vector(
    spec: GameSpec, state: InfoState, values: Mapping[InfoState, Vector]
) -> Vector:
    if state.round == spec.num_rounds:
        # Defaults are paid only after the final round fails, out of the
        # final round's (possibly shrunk) budget.
        scale = spec.budget_fraction(spec.num_rounds)
        return tuple(v * scale for v in spec.defaults)
    vec = [Fraction(0)] * 3
    for nxt, p in _next_state_distribution(spec, state).items():
        nxt_value = values[nxt]
        for i in PLAYERS:
            vec[i] += p * nxt_value[i]
    return tuple(vec)


def _equilibrium_offers(state: InfoState, continuation: Vector) -> tuple[tuple[Offer, Fraction], ...]:
    """The proposer's optimal offer(s): pay the cheaper partner their
    continuation value, keep the rest, zero to everyone else."""
    p = state.proposer
    budget = state.budget_fraction
    others = [i for i in PLAYERS if i != p]
    cheap = min(continuation[i] for i in others)
    targets = [i for i in others if continuation[i] == cheap]
    weight = Fraction(1, len(targets))
    offers = []
    for target in targets:
        shares = [Fraction(0)] * 3
        shares[target] = continuation[target] / budget
        shares[p] = 1 - shares[target]
        offers.append((tuple(shares), weight))
    return tuple(offers)


def _classify(state: InfoState, continuation: Vector) -> dict[int, PartnerClass]:
    a, b = (i for i in PLAYERS if i != state.proposer)
    if continuation[a] == continuation[b]:
        return {a: PartnerClass.NA, b: PartnerClass.NA}
    if continuation[a] < continuation[b]:
        return {a: PartnerClass.WEAK, b: PartnerClass.STRONG}
    return {a: PartnerClass.STRONG, b: PartnerClass.WEAK}


def solve(spec: GameSpec) -> EquilibriumSolution:
    """Backward induction from the final round over all information states."""
    try:
        validate_spec(spec)
    except ValueError as exc:
        raise SpecInvalidError(str(exc)) from exc
    values: dict[InfoState, Vector] = {}
    continuation: dict[InfoState, Vector] = {}
    policy: dict[InfoState, tuple[tuple[Offer, Fraction], ...]] = {}
    partner: dict[InfoState, dict[int, PartnerClass]] = {}
    probs: dict[InfoState, Fraction] = {}
    for t in range(spec.num_rounds, 0, -1):
        for state, p_state in enumerate_info_states(spec, t).items():
            probs[state] = p_state
            cont = _continuation_vector(spec, state, values)
            continuation[state] = cont
            offers = _equilibrium_offers(state, cont)
            policy[state] = offers
            value = [Fraction(0)] * 3
            for shares, weight in offers:
                for i in PLAYERS:
                    value[i] += weight * shares[i] * state.budget_fraction
            values[state] = tuple(value)
            partner[state] = _classify(state, cont)
    first = Fraction(0)
    for state, p_state in enumerate_info_states(spec, 1).items():
        first += p_state * values[state][state.proposer]
    return EquilibriumSolution(
        spec=spec,
        continuation=continuation,
        policy=policy,
        partner_class=partner,
        values=values,
        state_probs=probs,
        first_share=first,
    )


def continuation_values(solution: EquilibriumSolution, state: InfoState) -> Vector:
    try:
        return solution.continuation[state]
    except KeyError:
        raise UnknownStateError(f"state {state!r} is not reachable under this spec") from None


def classify_partner(solution: EquilibriumSolution, state: InfoState, player: int) -> PartnerClass:
    if player == state.proposer:
        raise PlayerIsProposerError(f"player {player} proposes in state {state.label()}")
    if state not in solution.partner_class:
        raise UnknownStateError(f"state {state!r} is not reachable under this spec")
    return solution.partner_class[state][player]


def state_condition(state: InfoState) -> Condition | None:
    """INCL/EXCL label of a state, or None when no disclosure was made."""
    d = state.disclosure
    if d.kind is DisclosureKind.KNOWN_NEXT:
        return Condition.INCL if d.player == state.proposer else Condition.EXCL
    if d.kind is DisclosureKind.EXCLUDED_NEXT:
        return Condition.EXCL if d.player == state.proposer else Condition.INCL
    return None


def predicted_first_share(
    solution: EquilibriumSolution, condition: Condition = Condition.UNCONDITIONAL
) -> Fraction:
    """Expected round-1 proposer payoff conditional on the disclosure condition."""
    total = Fraction(0)
    mass = Fraction(0)
    for state in solution.states(1):
        if condition is not Condition.UNCONDITIONAL and state_condition(state) != condition:
            continue
        p = solution.state_probs[state]
        total += p * solution.values[state][state.proposer]
        mass += p
    if mass == 0:
        raise ConditionNotApplicableError(
            f"no round-1 state matches condition {condition.value!r}"
        )
    return total / mass


@dataclass(frozen=True)
class PredictedShareRow:
    round: int
    condition: Condition | None
    share: Fraction  # proposer's own share of the current budget


def predicted_share_table(solution: EquilibriumSolution) -> list[PredictedShareRow]:
    """Per-round proposer shares (of the current budget) by disclosure
    condition, i.e. the headline equilibrium predictions for a treatment."""
    rows: list[PredictedShareRow] = []
    for t in range(1, solution.spec.num_rounds + 1):
        groups: dict[Condition | None, tuple[Fraction, Fraction]] = {}
        for state in solution.states(t):
            cond = state_condition(state)
            p = solution.state_probs[state]
            self_share = sum(
                w * shares[state.proposer] for shares, w in solution.policy[state]
            )
            total, mass = groups.get(cond, (Fraction(0), Fraction(0)))
            groups[cond] = (total + p * self_share, mass + p)
        for cond in (Condition.INCL, Condition.EXCL, None):
            if cond in groups:
                total, mass = groups[cond]
                rows.append(PredictedShareRow(t, cond, total / mass))
    return rows


# --------------------------------------------------------------------------
# Known-order check with pure tie-break enumeration


@dataclass(frozen=True)
class WorkedExampleReport:
    """Outcome of the three-round known-order game (proposers A then B then C)
    for configurable default payoffs.

    ``proposals_by_round`` follows the canonical selection (ties target the
    lowest-indexed player).  Because ties admit several pure equilibria, the
    check also enumerates every deterministic tie-break selection:
    ``knife_edge`` is set when some selection leaves the first proposer short
    of the full prize, and ``round1_tied_offers`` lists the first-round offers
    that tie in the selection attaining ``first_share_min``.
    """

    defaults: tuple[Fraction, Fraction, Fraction]
    proposals_by_round: tuple[Offer, Offer, Offer]
    first_share_min: Fraction
    first_share_max: Fraction
    knife_edge: bool
    round1_tied_offers: tuple[Offer, ...]


def _solve_fixed_order_selection(
    defaults: Sequence[Fraction], order: Sequence[int], selection: Sequence[int]
) -> tuple[list[Offer], Fraction, tuple[Offer, ...]]:
    """Backward induction with a deterministic tie-break per round.

    ``selection[t]`` picks which of the (sorted) tied partners the round-t
    proposer targets.  Returns per-round proposals, the first proposer's
    share, and the set of optimal first-round offers (length 2 on a tie).
    """
    T = len(order)
    cont = list(defaults)
    proposals: list[Offer] = [None] * T  # type: ignore[list-item]
    round1_offers: tuple[Offer, ...] = ()
    for t in range(T, 0, -1):
        p = order[t - 1]
        others = [i for i in PLAYERS if i != p]
        cheap = min(cont[i] for i in others)
        tied = [i for i in others if cont[i] == cheap]
        candidates = []
        for target in tied:
            shares = [Fraction(0)] * 3
            shares[target] = cont[target]
            shares[p] = 1 - cont[target]
            candidates.append(tuple(shares))
        chosen = candidates[selection[t - 1] % len(candidates)]
        proposals[t - 1] = chosen
        if t == 1:
            round1_offers = tuple(candidates)
        cont = list(chosen)
    return proposals, proposals[0][order[0]], round1_offers


def worked_example_check(
    defaults: Sequence = (Fraction(1, 10), Fraction(3, 10), Fraction(3, 5)),
) -> WorkedExampleReport:
    """Solve the known-order game A-then-B-then-C for the given defaults and
    report whether full first-proposer extraction survives every pure
    tie-break selection."""
    vals = tuple(as_fraction(v) for v in defaults)
    if any(v < 0 for v in vals) or sum(vals) > 1:
        raise SpecInvalidError(f"defaults must be non-negative and sum to at most 1: {vals}")
    order = (0, 1, 2)
    canonical, _, _ = _solve_fixed_order_selection(vals, order, (0, 0, 0))
    shares = []
    worst: tuple[Fraction, tuple[Offer, ...]] | None = None
    for selection in product((0, 1), repeat=3):
        _, share, ties = _solve_fixed_order_selection(vals, order, selection)
        shares.append(share)
        if worst is None or share < worst[0]:
            worst = (share, ties)
    lo, hi = min(shares), max(shares)
    return WorkedExampleReport(
        defaults=vals,
        proposals_by_round=tuple(canonical),
        first_share_min=lo,
        first_share_max=hi,
        knife_edge=lo < 1,
        round1_tied_offers=worst[1] if len(worst[1]) > 1 else (),
    )


def intro_game_spec(defaults: Sequence = (0.1, 0.3, 0.6)) -> GameSpec:
    """The known-order three-round game as a GameSpec (for cross-checks)."""
    return GameSpec(
        num_rounds=3,
        protocol=InfoProtocol.PERFECT,
        defaults=tuple(as_fraction(v) for v in defaults),
        recognition=RecognitionModel.fixed_order((0, 1, 2)),
        spec_id="intro-fixed-order",
    )
