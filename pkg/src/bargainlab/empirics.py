"""Analysis pipeline over match logs: coalition taxonomy, inequality,
acceptance-model estimation, rejection payoffs, expected-payoff surfaces, and
proposer optimization rates."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import expit

from .beliefs import OfferOptimum
from .game import (
    GameSpec,
    InfoState,
    MatchLog,
    RoundRecord,
    allocation_gini,
)
from .simulate import LogitModel
from .solver import EquilibriumSolution, PartnerClass


class BadThresholdError(ValueError):
    pass


class SeparationError(ValueError):
    pass


class CollinearError(ValueError):
    pass


class EmptySampleError(ValueError):
    pass


def gini(alloc) -> float:
    """Gini coefficient of a three-way division; 0 is an equal split, 2/3 the
    dictatorial maximum."""
    shares = alloc.shares if hasattr(alloc, "shares") else alloc
    return allocation_gini(shares)


# --------------------------------------------------------------------------
# Coalition taxonomy


_COALITION_KINDS = ("dictatorial", "mwc", "grand_coalition")


@dataclass(frozen=True)
class CoalitionClass:
    kind: str  # "dictatorial" | "mwc" | "grand_coalition"
    target_class: PartnerClass | None  # set only for MWC offers
    egalitarian: bool
    hybrid_egalitarian: bool

    def label(self) -> str:
        if self.kind != "mwc":
            return self.kind
        target = (self.target_class or PartnerClass.NA).value
        return f"mwc_{target}"


def classify_coalition(
    offer,
    proposer: int,
    partner_classes: Mapping[int, PartnerClass] | None = None,
    threshold: float = 0.05,
) -> CoalitionClass:
    """Coalition taxonomy of an offer.

    A coalition partner is a non-proposer offered at least ``threshold`` of
    the budget; the offer is dictatorial/MWC/grand-coalition as it has 0/1/2
    partners.  It is egalitarian when all coalition members' (including the
    proposer's) shares lie within ``threshold`` of each other, and hybrid
    egalitarian when instead one non-proposer gets less than a third while
    the remaining two players split nearly equally.
    """
    if not 0.0 < threshold < 1.0 / 3.0:
        raise BadThresholdError(f"threshold must lie in (0, 1/3), got {threshold}")
    shares = tuple(float(s) for s in (offer.shares if hasattr(offer, "shares") else offer))
    others = [i for i in range(3) if i != proposer]
    partners = [i for i in others if shares[i] >= threshold - 1e-12]
    kind = _COALITION_KINDS[min(len(partners), 2)]

    target = None
    if kind == "mwc":
        target = PartnerClass.NA
        if partner_classes is not None:
            target = partner_classes.get(partners[0], PartnerClass.NA)

    egalitarian = False
    if kind != "dictatorial":
        members = [shares[proposer]] + [shares[i] for i in partners]
        egalitarian = max(members) - min(members) <= threshold + 1e-12

    hybrid = False
    if not egalitarian:
        for j in others:
            rest = [shares[i] for i in range(3) if i != j]
            if shares[j] < 1.0 / 3.0 - 1e-12 and abs(rest[0] - rest[1]) <= threshold + 1e-12:
                hybrid = True
                break

    return CoalitionClass(kind, target, egalitarian, hybrid)


# --------------------------------------------------------------------------
# Vote records


@dataclass(frozen=True)
class VoteRecord:
    voter: int  # experiment id 1..3
    own_share: float  # fraction of the prize
    strong_flag: int
    gini: float
    vote: bool
    treatment: str = ""
    match: int = 0
    round: int = 1


def state_from_round_record(spec: GameSpec, record: RoundRecord) -> InfoState:
    """Reconstruct the information state of a logged round (log ids read back
    as players, valid for exchangeable or identity-ordered recognition)."""
    return InfoState(
        round=record.round,
        proposer=record.proposer - 1,
        disclosure=record.disclosure,
        budget_fraction=spec.budget_fraction(record.round),
    )


def experienced_filter(logs: Sequence[MatchLog], enabled: bool = True) -> list[MatchLog]:
    """Keep the second half of a match collection (the 'experienced' matches);
    with 2n or 2n+1 matches the last n+? are positions n+1.. (first half
    dropped by index)."""
    logs = list(logs)
    if not enabled:
        return logs
    return logs[len(logs) // 2 :]


def vote_records_from_logs(
    logs: Sequence[MatchLog],
    spec: GameSpec,
    solution: EquilibriumSolution,
    include_later_rounds: bool = False,
) -> list[VoteRecord]:
    """Non-proposer votes as regression records (first-round votes only by
    default).  Own shares are fractions of the prize; strong flags come from
    the equilibrium classification (NA classes count as not strong)."""
    records: list[VoteRecord] = []
    for match_index, log in enumerate(logs):
        for rec in log.rounds:
            if rec.round > 1 and not include_later_rounds:
                continue
            state = state_from_round_record(spec, rec)
            classes = solution.partner_class[state]
            offer_gini = allocation_gini(rec.offer)
            budget = float(state.budget_fraction)
            for voter in range(3):
                if voter + 1 == rec.proposer:
                    continue
                records.append(
                    VoteRecord(
                        voter=voter + 1,
                        own_share=rec.offer[voter] * budget,
                        strong_flag=1 if classes[voter] is PartnerClass.STRONG else 0,
                        gini=offer_gini,
                        vote=rec.votes[voter],
                        treatment=log.spec_id,
                        match=match_index,
                        round=rec.round,
                    )
                )
    return records


_TRUTHY = {"1", "true", "yes", "accept", "y"}
_FALSY = {"0", "false", "no", "reject", "n"}


def load_vote_records_csv(path) -> list[VoteRecord]:
    """Read externally collected votes (columns: treatment, match, round,
    voter, own_share, strong_flag, gini, vote)."""
    records = []
    with open(path, newline="") as handle:
        for row in csv.DictReader(handle):
            raw_vote = str(row["vote"]).strip().lower()
            if raw_vote in _TRUTHY:
                vote = True
            elif raw_vote in _FALSY:
                vote = False
            else:
                raise ValueError(f"unrecognized vote value {row['vote']!r}")
            records.append(
                VoteRecord(
                    voter=int(row["voter"]),
                    own_share=float(row["own_share"]),
                    strong_flag=int(row["strong_flag"]),
                    gini=float(row["gini"]),
                    vote=vote,
                    treatment=str(row.get("treatment", "")),
                    match=int(row.get("match", 0)),
                    round=int(row.get("round", 1)),
                )
            )
    return records


# --------------------------------------------------------------------------
# Logistic regression (IRLS)


_REGRESSOR_NAMES = ("constant", "strong_partner", "own_share", "gini")


@dataclass(frozen=True)
class LogitFit:
    model: LogitModel
    std_errors: tuple[float, float, float, float]
    log_likelihood: float
    null_log_likelihood: float
    pseudo_r2: float
    n_obs: int
    iterations: int
    converged: bool
    unidentified: tuple[str, ...] = ()


def _log_likelihood(y: np.ndarray, p: np.ndarray) -> float:
    p = np.clip(p, 1e-12, 1 - 1e-12)
    return float(np.sum(y * np.log(p) + (1 - y) * np.log(1 - p)))


def fit_logit(records: Sequence[VoteRecord], max_iter: int = 100, tol: float = 1e-8) -> LogitFit:
    """Maximum-likelihood logistic fit of vote on (constant, strong flag, own
    share, gini) via iteratively reweighted least squares.

    Zero-variance regressors are dropped and reported as unidentified;
    perfect separation (including one-class samples) raises SeparationError
    instead of silently diverging.
    """
    if not records:
        raise EmptySampleError("no vote records to fit")
    y = np.array([1.0 if r.vote else 0.0 for r in records])
    X = np.column_stack(
        [
            np.ones(len(records)),
            np.array([float(r.strong_flag) for r in records]),
            np.array([r.own_share for r in records]),
            np.array([r.gini for r in records]),
        ]
    )
    if y.min() == y.max():
        raise SeparationError("all votes are identical; the model is not identified")

    # Constant columns (e.g. a flag that never varies) are unidentified, not
    # an estimation error; the tolerance absorbs float noise in "constant"
    # values like a gini that is the same in every record.
    def _varies(col: np.ndarray) -> bool:
        return col.std() > 1e-9 * max(1.0, float(np.abs(col).max()))

    keep = [0] + [j for j in range(1, 4) if _varies(X[:, j])]
    unidentified = tuple(_REGRESSOR_NAMES[j] for j in range(1, 4) if j not in keep)
    Xk = X[:, keep]
    if np.linalg.matrix_rank(Xk) < Xk.shape[1]:
        raise CollinearError("regressors are perfectly collinear")

    beta = np.zeros(Xk.shape[1])
    converged = False
    iterations = 0
    info = np.eye(Xk.shape[1])
    for iterations in range(1, max_iter + 1):
        eta = Xk @ beta
        p = expit(eta)
        w = np.clip(p * (1 - p), 1e-10, None)
        z = eta + (y - p) / w
        info = Xk.T @ (w[:, None] * Xk)
        try:
            new_beta = np.linalg.solve(info, Xk.T @ (w * z))
        except np.linalg.LinAlgError as exc:
            raise SeparationError(f"information matrix became singular: {exc}") from exc
        if np.max(np.abs(new_beta)) > 50.0:
            raise SeparationError("coefficients diverged; data are perfectly separated")
        step = np.max(np.abs(new_beta - beta))
        beta = new_beta
        if step < tol:
            converged = True
            break

    p = expit(Xk @ beta)
    loglik = _log_likelihood(y, p)
    p_null = y.mean()
    null_loglik = _log_likelihood(y, np.full_like(y, p_null))
    pseudo = 1.0 - loglik / null_loglik if null_loglik != 0 else 0.0

    full_beta = np.zeros(4)
    full_se = np.full(4, float("nan"))
    cov = np.linalg.inv(info)
    for pos, j in enumerate(keep):
        full_beta[j] = beta[pos]
        full_se[j] = float(np.sqrt(max(cov[pos, pos], 0.0)))

    model = LogitModel(
        constant=float(full_beta[0]),
        strong_partner=float(full_beta[1]),
        own_share=float(full_beta[2]),
        gini=float(full_beta[3]),
    )
    return LogitFit(
        model=model,
        std_errors=tuple(full_se),
        log_likelihood=loglik,
        null_log_likelihood=null_loglik,
        pseudo_r2=pseudo,
        n_obs=len(records),
        iterations=iterations,
        converged=converged,
        unidentified=unidentified,
    )


# --------------------------------------------------------------------------
# Mean rejection payoff


@dataclass(frozen=True)
class MrpResult:
    mrp: float | None  # absent when no first-round offer was rejected
    rejection_rate: float
    n_rejected: int
    n_matches: int


def mean_rejection_payoff(logs: Sequence[MatchLog]) -> MrpResult:
    """Mean final payoff of the first proposer across matches whose round-1
    offer failed, plus the first-offer rejection rate."""
    logs = list(logs)
    rejected = [log for log in logs if not log.rounds[0].passed]
    mrp = None
    if rejected:
        mrp = sum(log.final_alloc[0] for log in rejected) / len(rejected)
    rate = len(rejected) / len(logs) if logs else 0.0
    return MrpResult(mrp=mrp, rejection_rate=rate, n_rejected=len(rejected), n_matches=len(logs))


# --------------------------------------------------------------------------
# Expected-payoff surface


@dataclass(frozen=True)
class PayoffSurface:
    """Expected first-proposer payoff over the offer simplex, induced by an
    acceptance model and a mean rejection payoff.

    Offers are in slot coordinates (proposer, weak slot, strong slot) with the
    per-slot strong flags fixed by the treatment condition; expected payoff is
    ``share * pass_prob + mrp * (1 - pass_prob)`` at every cell.
    """

    model: LogitModel
    mrp: float
    strong_flags: tuple[int, int]
    grid_step: float
    s_a: np.ndarray
    s_weak: np.ndarray
    s_strong: np.ndarray
    pass_prob: np.ndarray
    expected: np.ndarray
    optimum: OfferOptimum

    def evaluate(self, s_a, s_weak, s_strong):
        """(pass probability, expected payoff) at arbitrary offers."""
        s_a = np.asarray(s_a, dtype=float)
        s_weak = np.asarray(s_weak, dtype=float)
        s_strong = np.asarray(s_strong, dtype=float)
        g = _surface_gini(s_a, s_weak, s_strong)
        p_weak = expit(
            self.model.constant
            + self.model.strong_partner * self.strong_flags[0]
            + self.model.own_share * s_weak
            + self.model.gini * g
        )
        p_strong = expit(
            self.model.constant
            + self.model.strong_partner * self.strong_flags[1]
            + self.model.own_share * s_strong
            + self.model.gini * g
        )
        pass_prob = 1.0 - (1.0 - p_weak) * (1.0 - p_strong)
        expected = s_a * pass_prob + self.mrp * (1.0 - pass_prob)
        if pass_prob.ndim == 0:
            return float(pass_prob), float(expected)
        return pass_prob, expected


def _surface_gini(s_a, s_weak, s_strong):
    hi = np.maximum(np.maximum(s_a, s_weak), s_strong)
    lo = np.minimum(np.minimum(s_a, s_weak), s_strong)
    return (2.0 / 3.0) * (hi - lo)


def payoff_surface(
    model: LogitModel,
    mrp: float,
    strong_flags: tuple[int, int] = (0, 1),
    step: float = 0.005,
) -> PayoffSurface:
    """Tabulate the expected-payoff surface on a simplex grid and locate its
    maximum (ties break lexicographically on proposer share, then weak-slot
    share)."""
    if not 0.0 < step <= 0.05:
        raise BadThresholdError(f"grid step must lie in (0, 0.05], got {step}")
    from .beliefs import simplex_grid

    s_weak, s_strong = simplex_grid(step)
    s_a = 1.0 - s_weak - s_strong
    placeholder = PayoffSurface(
        model=model,
        mrp=mrp,
        strong_flags=tuple(strong_flags),
        grid_step=step,
        s_a=s_a,
        s_weak=s_weak,
        s_strong=s_strong,
        pass_prob=np.empty(0),
        expected=np.empty(0),
        optimum=None,  # type: ignore[arg-type]
    )
    pass_prob, expected = placeholder.evaluate(s_a, s_weak, s_strong)
    best = float(expected.max())
    ties = np.flatnonzero(expected == best)
    order = np.lexsort((s_weak[ties], s_a[ties]))
    idx = int(ties[order[-1]])
    optimum = OfferOptimum(
        offer=(float(s_a[idx]), float(s_weak[idx]), float(s_strong[idx])),
        expected_payoff=best,
        accept_prob=float(pass_prob[idx]),
        is_mwc=min(float(s_weak[idx]), float(s_strong[idx])) < step,
        grid_step=step,
        refinement_iterations=0,
    )
    return PayoffSurface(
        model=model,
        mrp=mrp,
        strong_flags=tuple(strong_flags),
        grid_step=step,
        s_a=s_a,
        s_weak=s_weak,
        s_strong=s_strong,
        pass_prob=pass_prob,
        expected=expected,
        optimum=optimum,
    )


# --------------------------------------------------------------------------
# Optimization rates


@dataclass(frozen=True)
class RateRow:
    label: str
    count: int
    frequency: float
    rate: float  # percent of the surface optimum


@dataclass(frozen=True)
class OptimizationRates:
    measure: str  # "one" | "two"
    optimal_payoff: float
    rows: tuple[RateRow, ...]
    aggregate: float


def _offer_in_slot_coords(
    record: RoundRecord, classes: Mapping[int, PartnerClass]
) -> tuple[float, float, float]:
    """Map a logged offer into (proposer, weak slot, strong slot) coordinates.
    When the classification is NA, the larger non-proposer share fills the
    weak slot (coalition partner first)."""
    proposer = record.proposer - 1
    others = [i for i in range(3) if i != proposer]
    weak = next((i for i in others if classes[i] is PartnerClass.WEAK), None)
    if weak is None:
        weak = max(others, key=lambda i: (record.offer[i], -i))
    strong = next(i for i in others if i != weak)
    return (record.offer[proposer], record.offer[weak], record.offer[strong])


def optimization_rates(
    logs: Sequence[MatchLog],
    surface: PayoffSurface,
    spec: GameSpec,
    solution: EquilibriumSolution,
    measure: str = "one",
    threshold: float = 0.05,
) -> OptimizationRates:
    """Proposer performance relative to the surface optimum.

    Measure one scores the mean offer within each coalition type by its
    surface expected payoff over the optimum; measure two scores each match's
    realized first-proposer payoff over the optimum.  Coalition types with no
    offers are omitted.  Rates are percentages; the aggregate is
    frequency-weighted (measure one) or the all-match mean (measure two).
    """
    if measure not in ("one", "two"):
        raise ValueError(f"measure must be 'one' or 'two', got {measure!r}")
    logs = list(logs)
    if not logs:
        raise EmptySampleError("no match logs to score")
    optimum = surface.optimum.expected_payoff
    by_type: dict[str, list[tuple[tuple[float, float, float], float]]] = {}
    for log in logs:
        rec = log.rounds[0]
        state = state_from_round_record(spec, rec)
        classes = solution.partner_class[state]
        label = classify_coalition(
            rec.offer, rec.proposer - 1, classes, threshold=threshold
        ).label()
        slot_offer = _offer_in_slot_coords(rec, classes)
        by_type.setdefault(label, []).append((slot_offer, log.final_alloc[0]))

    total = len(logs)
    rows = []
    for label in sorted(by_type):
        entries = by_type[label]
        if measure == "one":
            mean_offer = tuple(np.mean([o[i] for o, _ in entries]) for i in range(3))
            _, expected = surface.evaluate(*mean_offer)
            rate = 100.0 * expected / optimum
        else:
            rate = 100.0 * float(np.mean([payoff / optimum for _, payoff in entries]))
        rows.append(RateRow(label, len(entries), len(entries) / total, rate))

    if measure == "one":
        aggregate = sum(r.frequency * r.rate for r in rows)
    else:
        aggregate = 100.0 * float(
            np.mean([log.final_alloc[0] / optimum for log in logs])
        )
    return OptimizationRates(measure, optimum, tuple(rows), aggregate)


# --------------------------------------------------------------------------
# Distribution statistics


def ecdf_and_ks(samples_a: Sequence[float], samples_b: Sequence[float]) -> float:
    """Two-sample Kolmogorov-Smirnov statistic, evaluated exactly at every
    jump point of the two empirical CDFs."""
    a = np.sort(np.asarray(list(samples_a), dtype=float))
    b = np.sort(np.asarray(list(samples_b), dtype=float))
    if a.size == 0 or b.size == 0:
        raise EmptySampleError("both samples must be nonempty")
    points = np.union1d(a, b)
    cdf_a = np.searchsorted(a, points, side="right") / a.size
    cdf_b = np.searchsorted(b, points, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


# --------------------------------------------------------------------------
# Summary tables


@dataclass(frozen=True)
class SummaryReport:
    n_matches: int
    mean_accepted_first_share: float | None
    coalition_freq: dict
    egalitarian_split: dict
    mwc_weak_count: int
    mwc_weak_egalitarian_pct: float | None
    mwc_weak_mean_proposer_share: float | None
    gini_samples: tuple[float, ...]


def summary_tables(
    logs: Sequence[MatchLog],
    spec: GameSpec,
    solution: EquilibriumSolution,
    threshold: float = 0.05,
) -> SummaryReport:
    """Headline tables for one treatment: accepted-first-offer proposer share,
    coalition-type frequencies, egalitarian-offer split, the egalitarian share
    among MWC offers to weak partners, and Gini samples for ECDF plots."""
    logs = list(logs)
    accepted_first = [log for log in logs if log.rounds[0].passed]
    mean_share = (
        sum(log.final_alloc[0] for log in accepted_first) / len(accepted_first)
        if accepted_first
        else None
    )
    coalition_counts: dict[str, int] = {}
    egal_counts = {"non_egalitarian": 0, "mwc_egalitarian": 0, "gc_egalitarian": 0}
    mwc_weak: list[tuple[bool, float]] = []
    for log in logs:
        rec = log.rounds[0]
        state = state_from_round_record(spec, rec)
        classes = solution.partner_class[state]
        cls = classify_coalition(rec.offer, rec.proposer - 1, classes, threshold=threshold)
        label = cls.label()
        coalition_counts[label] = coalition_counts.get(label, 0) + 1
        if cls.egalitarian and cls.kind == "mwc":
            egal_counts["mwc_egalitarian"] += 1
        elif cls.egalitarian and cls.kind == "grand_coalition":
            egal_counts["gc_egalitarian"] += 1
        else:
            egal_counts["non_egalitarian"] += 1
        if label == "mwc_weak":
            mwc_weak.append((cls.egalitarian, rec.offer[rec.proposer - 1]))

    n = len(logs)
    coalition_freq = {k: 100.0 * v / n for k, v in sorted(coalition_counts.items())} if n else {}
    egal_split = {k: (100.0 * v / n if n else 0.0) for k, v in egal_counts.items()}
    gini_samples = tuple(gini(log.final_alloc) for log in accepted_first)
    return SummaryReport(
        n_matches=n,
        mean_accepted_first_share=mean_share,
        coalition_freq=coalition_freq,
        egalitarian_split=egal_split,
        mwc_weak_count=len(mwc_weak),
        mwc_weak_egalitarian_pct=(
            100.0 * sum(1 for e, _ in mwc_weak if e) / len(mwc_weak) if mwc_weak else None
        ),
        mwc_weak_mean_proposer_share=(
            sum(s for _, s in mwc_weak) / len(mwc_weak) if mwc_weak else None
        ),
        gini_samples=gini_samples,
    )
