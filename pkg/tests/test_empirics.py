"""Analysis pipeline: taxonomy, inequality, logit estimation, rejection
payoffs, surfaces, optimization rates, and distribution statistics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import expit

from bargainlab import empirics as emp
from bargainlab.presets import REFERENCE_LOGIT_MODELS, reference_mrp, treatment
from bargainlab.simulate import (
    EquilibriumProposer,
    EquilibriumVoter,
    FixedOfferProposer,
    LogitModel,
    LogitVoter,
    run_batch,
)
from bargainlab.solver import PartnerClass

WEAK_STRONG = {1: PartnerClass.WEAK, 2: PartnerClass.STRONG}


class TestGini:
    def test_anchor_values_exact(self):
        assert emp.gini((1 / 3, 1 / 3, 1 / 3)) == 0.0
        assert emp.gini((0.0, 0.5, 0.5)) == 1 / 3
        assert emp.gini((0.0, 0.0, 1.0)) == 2 / 3

    def test_scale_invariance(self):
        assert emp.gini((0.1, 0.2, 0.3)) == pytest.approx(emp.gini((0.2, 0.4, 0.6)))


class TestClassifyCoalition:
    def test_egalitarian_mwc_to_weak(self):
        cls = emp.classify_coalition((0.5, 0.5, 0.0), 0, WEAK_STRONG)
        assert (cls.kind, cls.target_class) == ("mwc", PartnerClass.WEAK)
        assert cls.egalitarian and not cls.hybrid_egalitarian
        assert cls.label() == "mwc_weak"

    def test_dictatorial(self):
        cls = emp.classify_coalition((0.96, 0.02, 0.02), 0, WEAK_STRONG)
        assert cls.kind == "dictatorial"
        assert cls.target_class is None and not cls.egalitarian

    def test_grand_coalition_egalitarian(self):
        cls = emp.classify_coalition((0.34, 0.33, 0.33), 0, WEAK_STRONG)
        assert cls.kind == "grand_coalition" and cls.egalitarian

    def test_hybrid_egalitarian(self):
        cls = emp.classify_coalition((0.45, 0.45, 0.10), 0, WEAK_STRONG)
        assert cls.kind == "grand_coalition"
        assert not cls.egalitarian and cls.hybrid_egalitarian

    def test_mwc_to_strong_partner(self):
        cls = emp.classify_coalition((0.6, 0.02, 0.38), 0, WEAK_STRONG)
        assert cls.label() == "mwc_strong"

    def test_without_classes_targets_are_na(self):
        cls = emp.classify_coalition((0.5, 0.5, 0.0), 0, None)
        assert cls.label() == "mwc_na"

    @pytest.mark.parametrize("threshold", [0.0, 1 / 3, 0.4])
    def test_threshold_domain(self, threshold):
        with pytest.raises(emp.BadThresholdError):
            emp.classify_coalition((0.5, 0.5, 0.0), 0, None, threshold=threshold)

    @given(
        st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=3, max_size=3).filter(
            lambda v: sum(v) > 0.1
        ),
        st.floats(min_value=0.01, max_value=0.15),
        st.floats(min_value=0.01, max_value=0.15),
    )
    @settings(max_examples=150)
    def test_raising_threshold_never_skips_from_dictatorial_upward(self, raw, t1, t2):
        total = sum(raw)
        offer = tuple(v / total for v in raw)
        lo, hi = min(t1, t2), max(t1, t2)
        rank = {"dictatorial": 0, "mwc": 1, "grand_coalition": 2}
        low = emp.classify_coalition(offer, 0, None, threshold=lo)
        high = emp.classify_coalition(offer, 0, None, threshold=hi)
        assert rank[high.kind] <= rank[low.kind]


class TestFitLogit:
    def test_round_trip_recovery(self):
        from bargainlab.acceptance import simulate_vote_records

        model = REFERENCE_LOGIT_MODELS["uci-2perfect"]
        truth = np.array(model.coefficients())
        for rep in range(3):
            rng = np.random.default_rng(31_000 + rep)
            fit = emp.fit_logit(simulate_vote_records(model, 20_000, rng))
            estimate = np.array(fit.model.coefficients())
            assert np.all(np.abs(estimate - truth) <= 0.10 * np.abs(truth))
            assert fit.converged and fit.pseudo_r2 > 0

    def test_three_sigma_coverage_with_log_style_regressors(self):
        # Regressor rows resampled from simulated play; a fresh coefficient
        # vector generates the votes and the fit must cover the truth within
        # 3 reported standard errors in at least 95 of 100 replications.
        spec = treatment("2-perfect")
        from bargainlab.solver import solve

        solution = solve(spec)
        base_model = REFERENCE_LOGIT_MODELS["uci-2perfect"]
        rows = []
        for i, offer in enumerate(
            ((0.55, 0.05, 0.40), (0.34, 0.33, 0.33), (0.70, 0.25, 0.05), (0.92, 0.04, 0.04))
        ):
            logs, _ = run_batch(
                spec,
                [FixedOfferProposer(offer)] * 3,
                [LogitVoter(base_model, solution)] * 3,
                150,
                seed=6 + i,
            )
            rows.extend(emp.vote_records_from_logs(logs, spec, solution))
        pool = np.array([[r.strong_flag, r.own_share, r.gini] for r in rows])
        # jitter shares so the pooled design has continuous variation
        truth = np.array([-2.0, -1.2, 9.0, -2.5])
        covered = 0
        for rep in range(100):
            rng = np.random.default_rng(52_000 + rep)
            picks = pool[rng.integers(0, len(pool), 20_000)].copy()
            picks[:, 1] = np.clip(picks[:, 1] + rng.uniform(-0.05, 0.35, 20_000), 0, 1)
            index = truth[0] + picks @ truth[1:]
            votes = rng.random(20_000) < expit(index)
            records = [
                emp.VoteRecord(
                    voter=2,
                    own_share=float(picks[i, 1]),
                    strong_flag=int(picks[i, 0]),
                    gini=float(picks[i, 2]),
                    vote=bool(votes[i]),
                )
                for i in range(20_000)
            ]
            fit = emp.fit_logit(records)
            estimate = np.array(fit.model.coefficients())
            ses = np.array(fit.std_errors)
            if np.all(np.abs(estimate - truth) <= 3 * ses):
                covered += 1
        assert covered >= 95

    def test_one_class_sample_raises_separation(self):
        records = [
            emp.VoteRecord(voter=2, own_share=0.5, strong_flag=0, gini=0.3, vote=True)
            for _ in range(50)
        ]
        with pytest.raises(emp.SeparationError):
            emp.fit_logit(records)

    def test_perfectly_separated_share_raises_separation(self):
        rng = np.random.default_rng(0)
        records = []
        for i in range(400):
            share = float(rng.uniform(0, 1))
            records.append(
                emp.VoteRecord(
                    voter=2,
                    own_share=share,
                    strong_flag=int(rng.integers(0, 2)),
                    gini=float(rng.uniform(0, 0.6)),
                    vote=share > 0.5,
                )
            )
        with pytest.raises(emp.SeparationError):
            emp.fit_logit(records)

    def test_constant_zero_regressor_reported_unidentified(self):
        rng = np.random.default_rng(1)
        records = []
        for i in range(2000):
            share = float(rng.uniform(0, 1))
            gini = float(rng.uniform(0, 0.6))
            p = float(expit(-1.0 + 4.0 * share - 1.0 * gini))
            records.append(
                emp.VoteRecord(
                    voter=2,
                    own_share=share,
                    strong_flag=0,
                    gini=gini,
                    vote=bool(rng.random() < p),
                )
            )
        fit = emp.fit_logit(records)
        assert fit.unidentified == ("strong_partner",)
        assert fit.model.strong_partner == 0.0
        assert np.isnan(fit.std_errors[1])

    def test_collinear_regressors_raise(self):
        rng = np.random.default_rng(2)
        records = []
        for i in range(500):
            share = float(rng.uniform(0, 0.6))
            records.append(
                emp.VoteRecord(
                    voter=2,
                    own_share=share,
                    strong_flag=int(rng.integers(0, 2)),
                    gini=share,  # exactly duplicates the share column
                    vote=bool(rng.random() < 0.4 + 0.4 * share),
                )
            )
        with pytest.raises(emp.CollinearError):
            emp.fit_logit(records)


class TestMeanRejectionPayoff:
    def make_logs(self, finals_and_passed):
        from bargainlab.game import Disclosure, DisclosureKind, MatchLog, RoundRecord, TerminalKind

        logs = []
        for final, passed in finals_and_passed:
            rec = RoundRecord(
                round=1,
                proposer=1,
                disclosure=Disclosure(DisclosureKind.NO_INFO),
                offer=(0.6, 0.4, 0.0),
                votes=(True, passed, False),
                passed=passed,
            )
            logs.append(
                MatchLog(
                    spec_id="x",
                    seed=0,
                    rounds=(rec,),
                    final_alloc=(final, 1 - final, 0.0),
                    terminal_kind=TerminalKind.passed_round(1)
                    if passed
                    else TerminalKind.defaulted(),
                )
            )
        return logs

    def test_no_rejections_means_absent_mrp(self):
        result = emp.mean_rejection_payoff(self.make_logs([(0.6, True)] * 5))
        assert result.mrp is None and result.rejection_rate == 0.0

    def test_mean_over_rejected_matches(self):
        logs = self.make_logs([(0.6, True), (0.10, False), (0.12, False)])
        result = emp.mean_rejection_payoff(logs)
        assert result.mrp == pytest.approx(0.11)
        assert result.rejection_rate == pytest.approx(2 / 3)

    def test_equilibrium_play_has_zero_rejection_rate(self, solutions):
        spec = treatment("3-none")
        solution = solutions["3-none"]
        logs, _ = run_batch(
            spec, [EquilibriumProposer(solution)] * 3, [EquilibriumVoter(solution)] * 3,
            200, seed=10,
        )
        assert emp.mean_rejection_payoff(logs).rejection_rate == 0.0


class TestPayoffSurface:
    def test_cell_identity_holds_everywhere(self):
        surface = emp.payoff_surface(
            REFERENCE_LOGIT_MODELS["caltech-1perfect"], 0.05, step=0.02
        )
        recomputed = surface.s_a * surface.pass_prob + surface.mrp * (1 - surface.pass_prob)
        assert np.array_equal(recomputed, surface.expected)

    @pytest.mark.parametrize(
        "model_name,mrp_name,retain,value",
        [
            ("caltech-1perfect", "caltech-1perfect", 0.76, 0.64),
            ("caltech-3perfect-excl", "caltech-3perfect-excl", 0.53, 0.46),
            ("uci-2perfect", "uci-2perfect", 0.59, 0.49),
        ],
    )
    def test_reference_optima(self, model_name, mrp_name, retain, value):
        surface = emp.payoff_surface(
            REFERENCE_LOGIT_MODELS[model_name], reference_mrp(mrp_name), strong_flags=(0, 1)
        )
        opt = surface.optimum
        assert opt.offer[0] == pytest.approx(retain, abs=0.02)
        assert opt.expected_payoff == pytest.approx(value, abs=0.02)
        assert opt.is_mwc and opt.offer[1] >= 0.05

    def test_always_rejected_offers_inherit_mrp(self):
        never = LogitModel(-60.0, 0.0, 0.0, 0.0)
        surface = emp.payoff_surface(never, 1.0, step=0.05)
        assert np.all(surface.pass_prob < 1e-20)
        assert surface.optimum.expected_payoff == pytest.approx(1.0)

    def test_flat_model_optimum_is_maximal_proposer_share(self):
        surface = emp.payoff_surface(LogitModel(0.0, 0.0, 0.0, 0.0), 0.0, step=0.05)
        assert np.allclose(surface.pass_prob, 0.75)
        assert surface.optimum.offer == (1.0, 0.0, 0.0)


class TestOptimizationRates:
    def equilibrium_logs(self, solutions, name="2-perfect", n=40):
        spec = treatment(name)
        solution = solutions[name]
        logs, _ = run_batch(
            spec, [EquilibriumProposer(solution)] * 3, [EquilibriumVoter(solution)] * 3,
            n, seed=3,
        )
        return spec, solution, logs

    def test_offers_at_the_optimum_rate_one_hundred(self, solutions):
        spec = treatment("2-perfect")
        solution = solutions["2-perfect"]
        surface = emp.payoff_surface(
            REFERENCE_LOGIT_MODELS["caltech-1perfect"], 0.05, strong_flags=(0, 1), step=0.01
        )
        opt = surface.optimum.offer
        # play exactly the surface optimum (weak slot is player C in round 1)
        proposers = [FixedOfferProposer((opt[0], opt[2], opt[1]))] * 3
        logs, _ = run_batch(spec, proposers, [EquilibriumVoter(solution)] * 3, 10, seed=9)
        rates = emp.optimization_rates(logs, surface, spec, solution, measure="one")
        assert len(rates.rows) == 1
        assert rates.rows[0].rate == pytest.approx(100.0, abs=1e-9)
        assert rates.aggregate == pytest.approx(100.0, abs=1e-9)

    def test_single_dictatorial_offer_scores_below_optimum(self, solutions):
        spec = treatment("2-perfect")
        solution = solutions["2-perfect"]
        surface = emp.payoff_surface(
            REFERENCE_LOGIT_MODELS["caltech-1perfect"], 0.05, strong_flags=(0, 1), step=0.01
        )
        logs, _ = run_batch(
            spec, [FixedOfferProposer((1.0, 0.0, 0.0))] * 3,
            [EquilibriumVoter(solution)] * 3, 5, seed=2,
        )
        rates = emp.optimization_rates(logs, surface, spec, solution, measure="one")
        (row,) = rates.rows
        assert row.label == "dictatorial"
        _, expected = surface.evaluate(1.0, 0.0, 0.0)
        assert row.rate == pytest.approx(100.0 * expected / surface.optimum.expected_payoff)
        assert row.rate < 100.0

    def test_measure_two_uses_realized_payoffs(self, solutions):
        spec, solution, logs = self.equilibrium_logs(solutions)
        surface = emp.payoff_surface(
            REFERENCE_LOGIT_MODELS["caltech-1perfect"], 0.05, strong_flags=(0, 1), step=0.01
        )
        rates = emp.optimization_rates(logs, surface, spec, solution, measure="two")
        expected = 100.0 * 1.0 / surface.optimum.expected_payoff
        assert rates.aggregate == pytest.approx(expected)

    def test_empty_log_collection_rejected(self, solutions):
        spec = treatment("2-perfect")
        solution = solutions["2-perfect"]
        surface = emp.payoff_surface(REFERENCE_LOGIT_MODELS["caltech-1perfect"], 0.05)
        with pytest.raises(emp.EmptySampleError):
            emp.optimization_rates([], surface, spec, solution)


class TestKolmogorovSmirnov:
    def test_identical_samples(self):
        assert emp.ecdf_and_ks([0.1, 0.4, 0.9], [0.1, 0.4, 0.9]) == 0.0

    def test_fully_separated_supports(self):
        assert emp.ecdf_and_ks([0.0, 0.1], [0.5, 0.9]) == 1.0

    def test_enumerated_step_functions(self):
        assert emp.ecdf_and_ks([0, 0, 1, 1], [0, 1, 1, 1]) == pytest.approx(0.25)

    def test_empty_sample_rejected(self):
        with pytest.raises(emp.EmptySampleError):
            emp.ecdf_and_ks([], [0.1])

    def test_matches_brute_force_over_merged_points(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            a = rng.uniform(0, 1, rng.integers(1, 40))
            b = rng.uniform(0, 1, rng.integers(1, 40))
            brute = max(
                abs(np.mean(a <= x) - np.mean(b <= x)) for x in np.concatenate([a, b])
            )
            assert emp.ecdf_and_ks(a, b) == pytest.approx(brute, abs=1e-12)


class TestVoteRecordsAndFilters:
    def test_first_round_records_only_by_default(self, solutions):
        spec = treatment("2-perfect")
        solution = solutions["2-perfect"]
        logs, _ = run_batch(
            spec, [EquilibriumProposer(solution)] * 3, [EquilibriumVoter(solution)] * 3,
            10, seed=0,
        )
        records = emp.vote_records_from_logs(logs, spec, solution)
        assert len(records) == 20  # two non-proposers per match
        assert {r.round for r in records} == {1}
        by_voter = {r.voter: r.strong_flag for r in records}
        assert by_voter == {2: 1, 3: 0}  # known next proposer strong, 0.90-default weak

    def test_experienced_filter_keeps_second_half(self):
        logs = list(range(16))
        assert emp.experienced_filter(logs) == list(range(8, 16))
        assert emp.experienced_filter(list(range(15))) == list(range(7, 15))
        assert emp.experienced_filter(logs, enabled=False) == logs

    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "votes.csv"
        path.write_text(
            "treatment,match,round,voter,own_share,strong_flag,gini,vote\n"
            "2-perfect,0,1,2,0.45,1,0.3,accept\n"
            "2-perfect,0,1,3,0.0,0,0.3,reject\n"
        )
        records = emp.load_vote_records_csv(path)
        assert records[0].vote and not records[1].vote
        assert records[0].own_share == pytest.approx(0.45)


class TestSummaryTables:
    def test_equilibrium_one_round_summary(self, solutions):
        spec = treatment("1-perfect")
        solution = solutions["1-perfect"]
        logs, _ = run_batch(
            spec, [EquilibriumProposer(solution)] * 3, [EquilibriumVoter(solution)] * 3,
            25, seed=4,
        )
        report = emp.summary_tables(logs, spec, solution)
        assert report.mean_accepted_first_share == pytest.approx(0.95)
        assert report.coalition_freq == {"mwc_weak": 100.0}
        assert report.mwc_weak_egalitarian_pct == 0.0
        assert report.mwc_weak_mean_proposer_share == pytest.approx(0.95)
        assert report.egalitarian_split["non_egalitarian"] == 100.0

    def test_constant_egalitarian_grand_coalition(self, solutions):
        spec = treatment("3-none")
        solution = solutions["3-none"]
        logs, _ = run_batch(
            spec,
            [FixedOfferProposer((0.34, 0.33, 0.33))] * 3,
            [EquilibriumVoter(solution)] * 3,
            10,
            seed=5,
        )
        report = emp.summary_tables(logs, spec, solution)
        assert report.coalition_freq == {"grand_coalition": 100.0}
        assert report.egalitarian_split["gc_egalitarian"] == 100.0

    def test_empty_logs_give_zero_counts(self, solutions):
        spec = treatment("1-perfect")
        report = emp.summary_tables([], spec, solutions["1-perfect"])
        assert report.n_matches == 0
        assert report.mean_accepted_first_share is None
        assert report.coalition_freq == {}
        assert report.gini_samples == ()
