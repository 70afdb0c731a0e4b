"""Game model: spec validation, unit conversion, information states, match logs."""

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bargainlab.game import (
    Allocation,
    AllocationError,
    Disclosure,
    DisclosureKind,
    GameSpec,
    InfoProtocol,
    InvalidDefaultsError,
    InvalidOrderError,
    InvalidShrinkError,
    MatchLog,
    OutOfRangeError,
    RecognitionModel,
    RoundOutOfRangeError,
    RoundRecord,
    TerminalKind,
    allocation_gini,
    enumerate_info_states,
    game_spec_from_config,
    game_spec_to_config,
    match_log_from_obj,
    match_log_to_json,
    match_log_to_obj,
    points_to_fraction,
    read_match_logs,
    validate_spec,
    write_match_logs,
)
from bargainlab.presets import THEORY_TREATMENTS, treatment


def spec_with(**kwargs) -> GameSpec:
    base = dict(
        num_rounds=3,
        protocol=InfoProtocol.PERFECT,
        defaults=(0, 0, 0),
        prize_points=240,
        shrink_factor=1,
        recognition=RecognitionModel.iid_uniform(),
    )
    base.update(kwargs)
    return GameSpec(**base)


class TestValidateSpec:
    def test_zero_default_three_round_spec_is_valid(self):
        spec = spec_with()
        assert validate_spec(spec) is spec

    def test_defaults_summing_above_one_rejected(self):
        with pytest.raises(InvalidDefaultsError):
            validate_spec(spec_with(defaults=(0.5, 0.5, 0.5)))

    def test_negative_default_rejected(self):
        with pytest.raises(InvalidDefaultsError):
            validate_spec(spec_with(defaults=(-0.1, 0.5, 0.5)))

    def test_fixed_order_length_mismatch_rejected(self):
        with pytest.raises(InvalidOrderError):
            validate_spec(
                spec_with(num_rounds=2, recognition=RecognitionModel.fixed_order((0, 1, 2)))
            )

    @pytest.mark.parametrize("delta", [0, -0.5, 1.5])
    def test_shrink_factor_outside_unit_interval_rejected(self, delta):
        with pytest.raises(InvalidShrinkError):
            validate_spec(spec_with(shrink_factor=delta))

    def test_defaults_converted_to_exact_fractions(self):
        spec = spec_with(defaults=(0.05, 0.05, 0.90), shrink_factor=0.95)
        assert spec.defaults == (Fraction(1, 20), Fraction(1, 20), Fraction(9, 10))
        assert spec.shrink_factor == Fraction(19, 20)
        assert spec.budget_fraction(3) == Fraction(19, 20) ** 2


class TestPointsToFraction:
    def test_known_points_conversion(self):
        assert points_to_fraction(216, 240) == Fraction(9, 10)

    def test_boundaries(self):
        assert points_to_fraction(0, 240) == 0
        assert points_to_fraction(240, 240) == 1

    @pytest.mark.parametrize("points", [-1, 241])
    def test_out_of_range(self, points):
        with pytest.raises(OutOfRangeError):
            points_to_fraction(points, 240)


class TestEnumerateInfoStates:
    def test_perfect_round_one_has_nine_states(self):
        states = enumerate_info_states(treatment("3-perfect"), 1)
        assert len(states) == 9
        assert all(p == Fraction(1, 9) for p in states.values())

    def test_none_round_one_has_three_states(self):
        states = enumerate_info_states(treatment("3-none"), 1)
        assert len(states) == 3
        assert all(p == Fraction(1, 3) for p in states.values())

    def test_partial_round_one_matches_joint_marginalization(self):
        # Oracle: enumerate the 3x3 joint of (next proposer, excluded label)
        # and marginalize out the next proposer.
        excluded_marginal = {j: Fraction(0) for j in range(3)}
        for q in range(3):
            for j in range(3):
                if j != q:
                    excluded_marginal[j] += Fraction(1, 3) * Fraction(1, 2)
        states = enumerate_info_states(treatment("3-partial"), 1)
        assert len(states) == 9
        for state, prob in states.items():
            expected = Fraction(1, 3) * excluded_marginal[state.disclosure.player]
            assert prob == expected == Fraction(1, 9)

    @pytest.mark.parametrize("name", THEORY_TREATMENTS)
    def test_probabilities_sum_to_one_exactly(self, name):
        spec = treatment(name)
        for t in range(1, spec.num_rounds + 1):
            assert sum(enumerate_info_states(spec, t).values()) == 1

    def test_final_round_discloses_nothing(self):
        for name in THEORY_TREATMENTS:
            spec = treatment(name)
            for state in enumerate_info_states(spec, spec.num_rounds):
                assert state.disclosure.kind is DisclosureKind.NO_INFO

    @pytest.mark.parametrize("bad_round", [0, 4])
    def test_round_out_of_range(self, bad_round):
        with pytest.raises(RoundOutOfRangeError):
            enumerate_info_states(treatment("3-none"), bad_round)

    def test_partial_excludes_next_proposer_in_transitions(self):
        from bargainlab.solver import _next_state_distribution

        spec = treatment("3-partial")
        for state in enumerate_info_states(spec, 1):
            nxt = _next_state_distribution(spec, state)
            assert all(ns.proposer != state.disclosure.player for ns in nxt)
            assert sum(nxt.values()) == 1


class TestAllocation:
    def test_shares_must_sum_to_one(self):
        with pytest.raises(AllocationError):
            Allocation((0.5, 0.4, 0.2))

    def test_shares_must_be_within_unit_interval(self):
        with pytest.raises(AllocationError):
            Allocation((1.2, -0.2, 0.0))

    @given(
        st.lists(st.floats(min_value=0.01, max_value=10.0), min_size=3, max_size=3)
    )
    @settings(max_examples=100)
    def test_normalization_is_idempotent(self, raw):
        once = Allocation.normalized(raw)
        twice = Allocation.normalized(once.shares)
        assert once.shares == twice.shares

    @given(
        st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=3, max_size=3).filter(
            lambda v: sum(v) > 0
        ),
        st.permutations([0, 1, 2]),
    )
    @settings(max_examples=100)
    def test_gini_permutation_invariant_and_bounded(self, shares, perm):
        value = allocation_gini(shares)
        assert value == allocation_gini([shares[i] for i in perm])
        assert 0.0 <= value <= 2.0 / 3.0 + 1e-12


class TestMatchLogSchema:
    def make_log(self) -> MatchLog:
        return MatchLog(
            spec_id="3-partial",
            seed=17,
            rounds=(
                RoundRecord(
                    round=1,
                    proposer=1,
                    disclosure=Disclosure.excluded_next(1),
                    offer=(0.5, 0.5, 0.0),
                    votes=(True, True, False),
                    passed=True,
                ),
            ),
            final_alloc=(0.5, 0.5, 0.0),
            terminal_kind=TerminalKind.passed_round(1),
            thresholds=(None, 0.25, 0.8),
        )

    def test_json_round_trip(self):
        log = self.make_log()
        assert match_log_from_obj(json.loads(match_log_to_json(log))) == log

    def test_serialized_field_names(self):
        obj = match_log_to_obj(self.make_log())
        assert {"spec_id", "seed", "rounds", "final_alloc", "terminal_kind"} <= set(obj)
        assert {"round", "proposer", "disclosure", "offer", "votes", "passed"} == set(
            obj["rounds"][0]
        )

    def test_file_round_trip(self, tmp_path):
        logs = [self.make_log()]
        path = tmp_path / "logs.jsonl"
        write_match_logs(path, logs)
        assert read_match_logs(path) == logs


class TestConfigFiles:
    @pytest.mark.parametrize("name", THEORY_TREATMENTS)
    def test_round_trip_preserves_spec(self, name):
        spec = treatment(name)
        assert game_spec_from_config(game_spec_to_config(spec)) == spec

    def test_parse_explicit_recognition_list(self):
        spec = game_spec_from_config(
            {
                "num_rounds": 2,
                "protocol": "perfect",
                "defaults": ["0.05", "0.05", "0.9"],
                "recognition": ["A", "B"],
            }
        )
        assert spec.recognition == RecognitionModel.fixed_order((0, 1))
        assert spec.defaults == (Fraction(1, 20), Fraction(1, 20), Fraction(9, 10))
