"""Match simulation: agents, protocol mechanics, determinism, and replay."""

import math

import numpy as np
import pytest
from scipy.special import expit

from bargainlab import beliefs as bl
from bargainlab.game import DisclosureKind, allocation_gini, match_log_to_json
from bargainlab.presets import REFERENCE_LOGIT_MODELS, THEORY_TREATMENTS, treatment
from bargainlab.simulate import (
    AgentConfigError,
    AgentOfferInvalidError,
    BeliefOptProposer,
    EquilibriumProposer,
    EquilibriumVoter,
    FixedOfferProposer,
    LogitModel,
    LogitVoter,
    ThresholdVoter,
    logit_accept_prob,
    run_batch,
    run_match,
)
from bargainlab.solver import PartnerClass

DEGENERATE_ONE = bl.ThresholdBelief(bl.DiscreteThresholds(((1.0, 1.0),), (1.0,)))


def equilibrium_agents(solution):
    return [EquilibriumProposer(solution)] * 3, [EquilibriumVoter(solution)] * 3


class TestLogitAcceptProb:
    def test_reference_evaluation(self):
        model = REFERENCE_LOGIT_MODELS["caltech-3perfect-excl"]
        p = logit_accept_prob(model, own_share=0.5, strong=0, gini=1 / 3)
        index = -2.428 + 10.851 * 0.5 - 4.519 / 3
        assert index == pytest.approx(1.4912, abs=1e-4)
        assert p == pytest.approx(float(expit(index)), abs=1e-12)
        assert p == pytest.approx(0.816, abs=1e-3)

    def test_zero_index_gives_half(self):
        model = LogitModel(0.0, 0.0, 0.0, 0.0)
        assert logit_accept_prob(model, 0.37, 1, 0.2) == 0.5

    def test_increasing_in_own_share(self):
        model = REFERENCE_LOGIT_MODELS["uci-2perfect"]
        shares = np.linspace(0.0, 1.0, 21)
        probs = logit_accept_prob(model, shares, 0, 0.3)
        assert np.all(np.diff(probs) > 0)

    def test_domain_validation(self):
        model = LogitModel(0.0, 0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            logit_accept_prob(model, 1.2, 0, 0.1)
        with pytest.raises(ValueError):
            logit_accept_prob(model, 0.5, 0, 0.8)


class TestRunMatch:
    def test_one_round_equilibrium_outcome(self, solutions):
        spec = treatment("1-perfect")
        proposers, voters = equilibrium_agents(solutions["1-perfect"])
        log = run_match(spec, proposers, voters, seed=3)
        assert log.terminal_kind.kind == "passed_round"
        assert log.rounds[0].passed
        assert sorted(log.final_alloc, reverse=True) == pytest.approx([0.95, 0.05, 0.0])

    def test_unreachable_thresholds_lead_to_defaults(self, solutions):
        spec = treatment("1-perfect")
        proposers, _ = equilibrium_agents(solutions["1-perfect"])
        voters = [ThresholdVoter(DEGENERATE_ONE)] * 3
        log = run_match(spec, proposers, voters, seed=9)
        assert log.terminal_kind.kind == "defaulted"
        assert not any(rec.passed for rec in log.rounds)
        assert log.final_alloc == pytest.approx((0.05, 0.05, 0.9))
        assert log.thresholds == (1.0, 1.0, 1.0)

    def test_identical_seeds_identical_logs(self, solutions):
        spec = treatment("3-partial")
        proposers, voters = equilibrium_agents(solutions["3-partial"])
        a = run_match(spec, proposers, voters, seed=123)
        b = run_match(spec, proposers, voters, seed=123)
        assert match_log_to_json(a) == match_log_to_json(b)

    def test_first_proposer_is_id_one(self, solutions):
        spec = treatment("3-none")
        proposers, voters = equilibrium_agents(solutions["3-none"])
        for seed in range(20):
            log = run_match(spec, proposers, voters, seed=seed)
            assert log.rounds[0].proposer == 1

    def test_invalid_agent_offer_rejected(self, solutions):
        class Broken:
            def propose(self, state, rng):
                return (0.7, 0.7, -0.4)

        spec = treatment("1-perfect")
        _, voters = equilibrium_agents(solutions["1-perfect"])
        with pytest.raises(AgentOfferInvalidError):
            run_match(spec, [Broken()] * 3, voters, seed=1)

    def test_missing_agent_configuration(self, solutions):
        spec = treatment("1-perfect")
        proposers, voters = equilibrium_agents(solutions["1-perfect"])
        with pytest.raises(AgentConfigError):
            run_match(spec, proposers[:2], voters, seed=1)

    def test_mixed_policy_offers_sampled_from_tie(self, solutions):
        spec = treatment("3-none")
        proposers, voters = equilibrium_agents(solutions["3-none"])
        seen = set()
        for seed in range(40):
            log = run_match(spec, proposers, voters, seed=seed)
            offer = log.rounds[0].offer
            assert offer[0] == pytest.approx(2 / 3)
            seen.add(offer.index(max(offer[1:], default=0.0), 1))
        assert seen == {1, 2}  # both tied partners get picked across seeds


class TestBudgetAndDisclosures:
    @pytest.mark.parametrize("name", ["3-partial", "3-partial-delta95"])
    def test_budget_conservation(self, name):
        from bargainlab.solver import solve

        spec = treatment(name)
        solution = solve(spec)
        proposers = [EquilibriumProposer(solution)] * 3
        voters = [ThresholdVoter(bl.ThresholdBelief(bl.IndependentUniform(1.0)))] * 3
        for seed in range(50):
            log = run_match(spec, proposers, voters, seed=seed)
            for rec in log.rounds:
                assert sum(rec.offer) == pytest.approx(1.0, abs=1e-9)
            if log.terminal_kind.kind == "passed_round":
                budget = float(spec.budget_fraction(log.terminal_kind.round))
            else:
                budget = float(spec.budget_fraction(spec.num_rounds)) * float(
                    sum(spec.defaults)
                )
            assert sum(log.final_alloc) == pytest.approx(budget, abs=1e-9)

    def test_partial_disclosure_never_contradicted(self, solutions):
        spec = treatment("3-partial")
        proposers, _ = equilibrium_agents(solutions["3-partial"])
        voters = [ThresholdVoter(DEGENERATE_ONE)] * 3  # force all rounds to play out
        for seed in range(200):
            log = run_match(spec, proposers, voters, seed=seed)
            assert len(log.rounds) == 3
            for rec, nxt in zip(log.rounds, log.rounds[1:]):
                assert rec.disclosure.kind is DisclosureKind.EXCLUDED_NEXT
                assert rec.disclosure.player != nxt.proposer - 1

    def test_perfect_disclosure_names_next_proposer(self, solutions):
        spec = treatment("3-perfect")
        proposers, _ = equilibrium_agents(solutions["3-perfect"])
        voters = [ThresholdVoter(DEGENERATE_ONE)] * 3
        for seed in range(100):
            log = run_match(spec, proposers, voters, seed=seed)
            for rec, nxt in zip(log.rounds, log.rounds[1:]):
                assert rec.disclosure.kind is DisclosureKind.KNOWN_NEXT
                assert rec.disclosure.player == nxt.proposer - 1


class TestReplay:
    def test_threshold_votes_reproducible_from_recorded_draws(self, solutions):
        spec = treatment("3-partial")
        proposers, _ = equilibrium_agents(solutions["3-partial"])
        voters = [ThresholdVoter(bl.ThresholdBelief(bl.IndependentUniform(1.0)))] * 3
        for seed in range(50):
            log = run_match(spec, proposers, voters, seed=seed)
            for rec in log.rounds:
                for voter in range(3):
                    if voter + 1 == rec.proposer:
                        assert rec.votes[voter]
                        continue
                    expected = rec.offer[voter] >= log.thresholds[voter] - 1e-12
                    assert rec.votes[voter] == expected

    def test_equilibrium_votes_reproducible_from_continuations(self, solutions):
        from bargainlab.empirics import state_from_round_record

        spec = treatment("3-none")
        solution = solutions["3-none"]
        proposers = [EquilibriumProposer(solution)] * 3
        voters = [EquilibriumVoter(solution)] * 3
        for seed in range(50):
            log = run_match(spec, proposers, voters, seed=seed)
            for rec in log.rounds:
                state = state_from_round_record(spec, rec)
                cont = solution.continuation[state]
                budget = float(state.budget_fraction)
                for voter in range(3):
                    if voter + 1 == rec.proposer:
                        continue
                    expected = rec.offer[voter] * budget >= float(cont[voter]) - 1e-12
                    assert rec.votes[voter] == expected


class TestRunBatch:
    @pytest.mark.parametrize("name", THEORY_TREATMENTS)
    def test_equilibrium_agents_never_rejected(self, solutions, name):
        spec = treatment(name)
        proposers, voters = equilibrium_agents(solutions[name])
        _, summary = run_batch(spec, proposers, voters, 100, seed=0)
        assert summary.first_round_rejection_rate == 0.0
        assert summary.pass_round_counts == {1: 100}

    def test_single_match_batch_equals_run_match(self, solutions):
        spec = treatment("2-perfect")
        proposers, voters = equilibrium_agents(solutions["2-perfect"])
        logs, _ = run_batch(spec, proposers, voters, 1, seed=555)
        assert logs[0] == run_match(spec, proposers, voters, seed=555)

    def test_logit_voters_match_analytic_pass_rate(self, solutions):
        # Fixed MWC offer to the weak partner under the 3-perfect-excl
        # acceptance model; the batch pass rate must sit within 3 s.e. of the
        # two-logistic union probability.
        spec = treatment("2-perfect")
        solution = solutions["2-perfect"]
        model = REFERENCE_LOGIT_MODELS["caltech-3perfect-excl"]
        proposers = [FixedOfferProposer((0.5, 0.0, 0.5))] * 3  # weak partner is player C
        voters = [LogitVoter(model, solution)] * 3
        n = 10_000
        _, summary = run_batch(spec, proposers, voters, n, seed=77)
        gini = allocation_gini((0.5, 0.0, 0.5))
        p_weak = float(expit(-2.428 + 10.851 * 0.5 - 4.519 * gini))
        p_strong = float(expit(-2.428 - 1.358 - 4.519 * gini))
        analytic = 1 - (1 - p_weak) * (1 - p_strong)
        observed = 1 - summary.first_round_rejection_rate
        se = math.sqrt(analytic * (1 - analytic) / n)
        assert abs(observed - analytic) <= 3 * se

    def test_belief_opt_proposer_plays_precomputed_optimum(self, solutions):
        spec = treatment("1-perfect")
        belief = bl.ThresholdBelief(bl.IndependentUniform(1.0), d=0.0)
        proposer = BeliefOptProposer(belief, step=0.01, refine_depth=1)
        voters = [ThresholdVoter(bl.ThresholdBelief(bl.IndependentUniform(1.0)))] * 3
        log = run_match(spec, [proposer] * 3, voters, seed=4)
        assert log.rounds[0].offer[0] == pytest.approx(0.5, abs=1e-3)

    def test_batch_requires_at_least_one_match(self, solutions):
        spec = treatment("1-perfect")
        proposers, voters = equilibrium_agents(solutions["1-perfect"])
        with pytest.raises(AgentConfigError):
            run_batch(spec, proposers, voters, 0, seed=1)
