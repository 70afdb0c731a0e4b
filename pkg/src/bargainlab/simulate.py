"""Seeded Monte Carlo simulation of bargaining matches with pluggable agents.

All randomness in a match derives from a single ``numpy`` generator seeded by
the caller, with a fixed draw order (recognition realization, disclosure
picks, per-player threshold draws, then per-round agent randomness), so
identical configurations and seeds reproduce match logs byte for byte.

Match logs store experiment-style player ids 1..3 where id 1 is the realized
first proposer; the shipped treatments use exchangeable or identity-ordered
recognition, so id k can be read back as player k when replaying logs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.special import expit

from .beliefs import ThresholdBelief, sample_thresholds, validate_belief
from .game import (
    PLAYERS,
    Allocation,
    Disclosure,
    DisclosureKind,
    GameSpec,
    InfoProtocol,
    InfoState,
    MatchLog,
    RoundRecord,
    TerminalKind,
    allocation_gini,
    validate_spec,
)
from .solver import EquilibriumSolution, PartnerClass

_VOTE_TOL = 1e-12


class AgentOfferInvalidError(ValueError):
    pass


class AgentConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# Voting model


@dataclass(frozen=True)
class LogitModel:
    """Acceptance model: logistic in (constant, strong-partner flag, own share,
    offer Gini).  Shares enter as fractions of the prize in [0, 1]."""

    constant: float
    strong_partner: float
    own_share: float
    gini: float
    share_units: str = "fraction-of-prize"

    def coefficients(self) -> tuple[float, float, float, float]:
        return (self.constant, self.strong_partner, self.own_share, self.gini)


def logit_accept_prob(model: LogitModel, own_share, strong, gini):
    """Acceptance probability logistic(b0 + b1*strong + b2*share + b3*gini)."""
    own_share = np.asarray(own_share, dtype=float)
    gini = np.asarray(gini, dtype=float)
    if np.any(own_share < -1e-9) or np.any(own_share > 1 + 1e-9):
        raise ValueError("own_share must lie in [0, 1]")
    if np.any(gini < -1e-9) or np.any(gini > 2.0 / 3.0 + 1e-9):
        raise ValueError("gini must lie in [0, 2/3]")
    index = (
        model.constant
        + model.strong_partner * np.asarray(strong, dtype=float)
        + model.own_share * own_share
        + model.gini * gini
    )
    out = expit(index)
    if out.ndim == 0:
        return float(out)
    return out


# --------------------------------------------------------------------------
# Agents


class EquilibriumProposer:
    """Plays the solved policy, sampling when the policy mixes two offers."""

    def __init__(self, solution: EquilibriumSolution):
        self.solution = solution

    def propose(self, state: InfoState, rng: np.random.Generator):
        try:
            offers = self.solution.policy[state]
        except KeyError:
            raise AgentConfigError(f"solution does not cover state {state.label()}") from None
        if len(offers) == 1:
            shares = offers[0][0]
        else:
            u = rng.random()
            acc = 0.0
            shares = offers[-1][0]
            for cand, weight in offers:
                acc += float(weight)
                if u < acc:
                    shares = cand
                    break
        return tuple(float(s) for s in shares)


class BeliefOptProposer:
    """Plays the grid-optimal offer for a threshold belief (computed once).

    The optimizer's two partner shares go to the non-proposers in player-index
    order (larger first share to the lower-indexed non-proposer).
    """

    def __init__(self, belief: ThresholdBelief, step: float = 0.005, refine_depth: int = 3):
        from .beliefs import optimize_offer

        self.optimum = optimize_offer(belief, step=step, refine_depth=refine_depth)

    def propose(self, state: InfoState, rng: np.random.Generator):
        s_a, s_b, s_c = self.optimum.offer
        others = [i for i in PLAYERS if i != state.proposer]
        shares = [0.0, 0.0, 0.0]
        shares[state.proposer] = s_a
        shares[others[0]] = s_b
        shares[others[1]] = s_c
        return tuple(shares)


class FixedOfferProposer:
    """Constant offer in role coordinates (self, lower-index other,
    higher-index other)."""

    def __init__(self, offer: Sequence[float]):
        self.offer = Allocation(tuple(float(v) for v in offer)).shares

    def propose(self, state: InfoState, rng: np.random.Generator):
        s_self, s_first, s_second = self.offer
        others = [i for i in PLAYERS if i != state.proposer]
        shares = [0.0, 0.0, 0.0]
        shares[state.proposer] = s_self
        shares[others[0]] = s_first
        shares[others[1]] = s_second
        return tuple(shares)


class EmpiricalOptProposer:
    """Plays a payoff-surface optimum, routing the weak-slot share to the
    player the theory classifies as weak (lower-indexed non-proposer when the
    classification is NA)."""

    def __init__(self, surface, solution: EquilibriumSolution):
        self.surface = surface
        self.solution = solution

    def propose(self, state: InfoState, rng: np.random.Generator):
        s_a, s_weak, s_strong = self.surface.optimum.offer
        classes = self.solution.partner_class.get(state)
        if classes is None:
            raise AgentConfigError(f"solution does not cover state {state.label()}")
        others = [i for i in PLAYERS if i != state.proposer]
        weak = next((i for i in others if classes[i] is PartnerClass.WEAK), others[0])
        strong = next(i for i in others if i != weak)
        shares = [0.0, 0.0, 0.0]
        shares[state.proposer] = s_a
        shares[weak] = s_weak
        shares[strong] = s_strong
        return tuple(shares)


class EquilibriumVoter:
    """Accepts any share worth at least the voter's own continuation value."""

    redraw_each_round = False

    def __init__(self, solution: EquilibriumSolution):
        self.solution = solution

    def draw_threshold(self, rng: np.random.Generator):
        return None

    def vote(self, player, state, offer, own_share, threshold, rng) -> bool:
        try:
            cont = self.solution.continuation[state][player]
        except KeyError:
            raise AgentConfigError(f"solution does not cover state {state.label()}") from None
        return own_share * float(state.budget_fraction) >= float(cont) - _VOTE_TOL


class ThresholdVoter:
    """Accepts iff the offered share meets a threshold drawn from a belief
    marginal, once per match by default (per-round redraws are opt-in).
    Draws are recorded in the match log for replay audits."""

    def __init__(self, belief: ThresholdBelief, marginal: str = "b", redraw_each_round: bool = False):
        validate_belief(belief)
        if marginal not in ("b", "c"):
            raise AgentConfigError("marginal must be 'b' or 'c'")
        self.belief = belief
        self.marginal = marginal
        self.redraw_each_round = redraw_each_round

    def draw_threshold(self, rng: np.random.Generator):
        pair = sample_thresholds(self.belief.family, rng, 1)[0]
        return float(pair[0 if self.marginal == "b" else 1])

    def vote(self, player, state, offer, own_share, threshold, rng) -> bool:
        return own_share >= threshold - _VOTE_TOL


class LogitVoter:
    """Accepts with the probability given by a LogitModel; the strong-partner
    flag comes from the equilibrium classification at the current state."""

    redraw_each_round = False

    def __init__(self, model: LogitModel, solution: EquilibriumSolution):
        self.model = model
        self.solution = solution

    def draw_threshold(self, rng: np.random.Generator):
        return None

    def vote(self, player, state, offer, own_share, threshold, rng) -> bool:
        classes = self.solution.partner_class.get(state)
        if classes is None:
            raise AgentConfigError(f"solution does not cover state {state.label()}")
        strong = 1 if classes[player] is PartnerClass.STRONG else 0
        gini = allocation_gini(offer)
        own_prize_units = own_share * float(state.budget_fraction)
        prob = logit_accept_prob(self.model, own_prize_units, strong, gini)
        return bool(rng.random() < prob)


def _per_player(agents, label: str) -> tuple:
    if isinstance(agents, Mapping):
        try:
            return tuple(agents[p] for p in PLAYERS)
        except KeyError as exc:
            raise AgentConfigError(f"{label} missing for player {exc}") from None
    agents = tuple(agents)
    if len(agents) != 3:
        raise AgentConfigError(f"{label} must be configured for all 3 players")
    return agents


# --------------------------------------------------------------------------
# Match mechanics


def _draw_from_distribution(dist, rng: np.random.Generator) -> int:
    u = rng.random()
    acc = 0.0
    for player, p in enumerate(dist):
        acc += float(p)
        if u < acc:
            return player
    return max(i for i, p in enumerate(dist) if p > 0)


def _validate_offer(offer) -> tuple[float, float, float]:
    offer = tuple(float(v) for v in offer)
    if len(offer) != 3:
        raise AgentOfferInvalidError("an offer must have exactly three shares")
    if any(v < -1e-9 or v > 1 + 1e-9 for v in offer):
        raise AgentOfferInvalidError(f"offer shares must lie in [0, 1], got {offer}")
    if abs(sum(offer) - 1.0) > 1e-9:
        raise AgentOfferInvalidError(f"offer must exhaust the current budget, got {offer}")
    return offer


def run_match(
    spec: GameSpec,
    proposer_agents,
    voter_agents,
    seed: int,
    record_thresholds: bool = True,
) -> MatchLog:
    """Simulate one match; every random draw derives from ``seed``."""
    validate_spec(spec)
    proposers = _per_player(proposer_agents, "proposer agents")
    voters = _per_player(voter_agents, "voter agents")
    rng = np.random.default_rng(seed)
    T = spec.num_rounds

    recognition = [
        _draw_from_distribution(spec.recognition.round_distribution(t), rng)
        for t in range(1, T + 1)
    ]
    disclosures: list[Disclosure] = []
    for t in range(1, T + 1):
        if t == T:
            disclosures.append(Disclosure(DisclosureKind.NO_INFO))
        elif spec.protocol is InfoProtocol.PERFECT:
            disclosures.append(Disclosure.known_next(recognition[t]))
        elif spec.protocol is InfoProtocol.PARTIAL:
            candidates = [p for p in PLAYERS if p != recognition[t]]
            disclosures.append(Disclosure.excluded_next(candidates[int(rng.integers(0, 2))]))
        else:
            disclosures.append(Disclosure(DisclosureKind.NO_INFO))

    thresholds = [voters[p].draw_threshold(rng) for p in PLAYERS]

    rounds: list[tuple[InfoState, tuple, tuple, bool]] = []
    final_alloc: tuple[float, float, float] | None = None
    terminal: TerminalKind | None = None
    for t in range(1, T + 1):
        proposer = recognition[t - 1]
        state = InfoState(t, proposer, disclosures[t - 1], spec.budget_fraction(t))
        if t > 1:
            for p in PLAYERS:
                if getattr(voters[p], "redraw_each_round", False):
                    thresholds[p] = voters[p].draw_threshold(rng)
        offer = _validate_offer(proposers[proposer].propose(state, rng))
        votes = []
        for p in PLAYERS:
            if p == proposer:
                votes.append(True)
            else:
                votes.append(
                    bool(voters[p].vote(p, state, offer, offer[p], thresholds[p], rng))
                )
        passed = sum(votes) >= 2
        rounds.append((state, offer, tuple(votes), passed))
        if passed:
            budget = float(state.budget_fraction)
            final_alloc = tuple(offer[i] * budget for i in PLAYERS)
            terminal = TerminalKind.passed_round(t)
            break
    if final_alloc is None:
        scale = float(spec.budget_fraction(T))
        final_alloc = tuple(float(d) * scale for d in spec.defaults)
        terminal = TerminalKind.defaulted()

    return _build_log(spec, seed, rounds, final_alloc, terminal, thresholds, record_thresholds)


def _build_log(spec, seed, rounds, final_alloc, terminal, thresholds, record_thresholds) -> MatchLog:
    # Experiment ids: the realized first proposer becomes id 1, the remaining
    # players keep their relative order as ids 2 and 3.
    first = rounds[0][0].proposer
    permutation = [first] + [p for p in PLAYERS if p != first]
    id_of = {player: idx for idx, player in enumerate(permutation)}

    records = []
    for state, offer, votes, passed in rounds:
        disclosure = state.disclosure
        if disclosure.player is not None:
            disclosure = Disclosure(disclosure.kind, id_of[disclosure.player])
        reordered_offer = tuple(offer[permutation[i]] for i in range(3))
        reordered_votes = tuple(votes[permutation[i]] for i in range(3))
        records.append(
            RoundRecord(
                round=state.round,
                proposer=id_of[state.proposer] + 1,
                disclosure=disclosure,
                offer=reordered_offer,
                votes=reordered_votes,
                passed=passed,
            )
        )
    reordered_final = tuple(final_alloc[permutation[i]] for i in range(3))
    reordered_thresholds = tuple(thresholds[permutation[i]] for i in range(3))
    keep_thresholds = record_thresholds and any(t is not None for t in reordered_thresholds)
    return MatchLog(
        spec_id=spec.spec_id or "custom",
        seed=seed,
        rounds=tuple(records),
        final_alloc=reordered_final,
        terminal_kind=terminal,
        thresholds=reordered_thresholds if keep_thresholds else None,
    )


@dataclass(frozen=True)
class BatchSummary:
    n_matches: int
    first_round_rejection_rate: float
    mean_first_proposer_payoff: float
    pass_round_counts: dict
    defaulted_count: int

    def to_obj(self) -> dict:
        return {
            "n_matches": self.n_matches,
            "first_round_rejection_rate": self.first_round_rejection_rate,
            "mean_first_proposer_payoff": self.mean_first_proposer_payoff,
            "pass_round_counts": {str(k): v for k, v in sorted(self.pass_round_counts.items())},
            "defaulted_count": self.defaulted_count,
        }


def summarize_batch(logs: Sequence[MatchLog]) -> BatchSummary:
    n = len(logs)
    rejected_first = sum(1 for log in logs if not log.rounds[0].passed)
    mean_first = sum(log.final_alloc[0] for log in logs) / n if n else 0.0
    counts: dict[int, int] = {}
    defaulted = 0
    for log in logs:
        if log.terminal_kind.kind == "defaulted":
            defaulted += 1
        else:
            t = log.terminal_kind.round
            counts[t] = counts.get(t, 0) + 1
    return BatchSummary(
        n_matches=n,
        first_round_rejection_rate=rejected_first / n if n else 0.0,
        mean_first_proposer_payoff=mean_first,
        pass_round_counts=counts,
        defaulted_count=defaulted,
    )


def run_batch(
    spec: GameSpec,
    proposer_agents,
    voter_agents,
    n_matches: int,
    seed: int,
    record_thresholds: bool = True,
) -> tuple[list[MatchLog], BatchSummary]:
    """Run ``n_matches`` independent matches with per-match seeds
    ``seed + index``; the returned collection is ordered by match index."""
    if n_matches < 1:
        raise AgentConfigError("n_matches must be at least 1")
    logs = [
        run_match(spec, proposer_agents, voter_agents, seed + i, record_thresholds)
        for i in range(n_matches)
    ]
    return logs, summarize_batch(logs)
