"""Proposer's problem under acceptance-threshold uncertainty.

A proposer keeps ``s_a`` and offers ``(s_b, s_c)`` to the two other players,
believing their acceptance thresholds follow a bivariate distribution with a
known CDF ``H``.  The offer passes when at least one threshold is met, so by
inclusion-exclusion the acceptance probability is

    Lambda(s_b, s_c) = H_b(s_b) + H_c(s_c) - H(s_b, s_c)

(thresholds met with equality count as acceptance, making Lambda
right-continuous and the supremum of the expected payoff attained).  The
proposer's expected payoff from an offer is ``d + (s_a - d) * Lambda`` where
``d`` is her expected continuation payoff after a rejection.

Optimization is an exhaustive simplex grid scan plus recursive local
refinement; the payoff can be discontinuous for discrete beliefs, so
derivative-based search is deliberately avoided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.special import ndtr, ndtri

from .bivariate_normal import bvn_cdf
from .game import Allocation

MIN_TAU_BAR = 0.5


class BeliefError(ValueError):
    pass


class BeliefDomainError(BeliefError):
    pass


class NegativeShareError(ValueError):
    pass


class BadArityError(ValueError):
    pass


class EvenNError(ValueError):
    pass


@dataclass(frozen=True)
class IndependentUniform:
    """Thresholds drawn independently, each uniform on [0, tau_bar]."""

    tau_bar: float = 1.0


@dataclass(frozen=True)
class Comonotone:
    """Perfectly positively coupled: tau_c = tau_b, uniform on [0, tau_bar]."""

    tau_bar: float = 1.0


@dataclass(frozen=True)
class Antithetic:
    """Perfectly negatively coupled: tau_c = tau_bar - tau_b, uniform marginals.

    This family violates the joint-support condition H(x, x) > 0 for small x,
    which is what makes its optimum a whole locus rather than a point.
    """

    tau_bar: float = 1.0


@dataclass(frozen=True)
class GaussianCopulaUniform:
    """Uniform marginals on [0, tau_bar] coupled by a Gaussian copula."""

    tau_bar: float = 1.0
    rho: float = 0.0


@dataclass(frozen=True)
class DiscreteThresholds:
    """Finitely many threshold pairs with positive weights summing to 1."""

    points: tuple[tuple[float, float], ...]
    weights: tuple[float, ...]


@dataclass(frozen=True)
class MixtureThresholds:
    """Convex mixture of threshold families."""

    components: tuple[tuple[float, "Family"], ...]


Family = Union[
    IndependentUniform,
    Comonotone,
    Antithetic,
    GaussianCopulaUniform,
    DiscreteThresholds,
    MixtureThresholds,
]

_CONTINUOUS = (IndependentUniform, Comonotone, Antithetic, GaussianCopulaUniform)


@dataclass(frozen=True)
class ThresholdBelief:
    """A threshold distribution plus the proposer's continuation payoff d."""

    family: Family
    d: float = 0.0


def validate_belief(belief: ThresholdBelief) -> ThresholdBelief:
    if not 0.0 <= belief.d < 1.0:
        raise BeliefDomainError(f"continuation payoff d must lie in [0, 1), got {belief.d}")
    _validate_family(belief.family)
    return belief


def _validate_family(family: Family) -> None:
    if isinstance(family, _CONTINUOUS):
        if family.tau_bar < MIN_TAU_BAR:
            raise BeliefDomainError(
                f"tau_bar must be at least {MIN_TAU_BAR} for continuous families, "
                f"got {family.tau_bar}"
            )
        if isinstance(family, GaussianCopulaUniform) and not -1.0 <= family.rho <= 1.0:
            raise BeliefDomainError(f"copula correlation must lie in [-1, 1], got {family.rho}")
        return
    if isinstance(family, DiscreteThresholds):
        if not family.points:
            raise BeliefDomainError("discrete belief needs at least one atom")
        if len(family.points) != len(family.weights):
            raise BeliefDomainError("discrete belief needs one weight per atom")
        if any(w <= 0 for w in family.weights):
            raise BeliefDomainError("discrete weights must be positive")
        if abs(sum(family.weights) - 1.0) > 1e-9:
            raise BeliefDomainError("discrete weights must sum to 1")
        if any(b < 0 or c < 0 for b, c in family.points):
            raise BeliefDomainError("thresholds must be non-negative")
        return
    if isinstance(family, MixtureThresholds):
        if not family.components:
            raise BeliefDomainError("mixture needs at least one component")
        if any(w <= 0 for w, _ in family.components):
            raise BeliefDomainError("mixture weights must be positive")
        if abs(sum(w for w, _ in family.components) - 1.0) > 1e-9:
            raise BeliefDomainError("mixture weights must sum to 1")
        for _, component in family.components:
            _validate_family(component)
        return
    raise BeliefDomainError(f"unknown threshold family {family!r}")


def assumption1_holds(family: Family) -> bool:
    """Whether H(x, x) > 0 for every x > 0 (joint support near the diagonal)."""
    if isinstance(family, (IndependentUniform, Comonotone)):
        return True
    if isinstance(family, Antithetic):
        return False
    if isinstance(family, GaussianCopulaUniform):
        return family.rho > -1.0
    if isinstance(family, DiscreteThresholds):
        return any(
            b <= 1e-12 and c <= 1e-12
            for (b, c), w in zip(family.points, family.weights)
            if w > 0
        )
    return any(assumption1_holds(component) for _, component in family.components)


# --------------------------------------------------------------------------
# CDF machinery (elementwise over numpy arrays; scalars pass through the same
# expressions, so grid scans and per-point calls agree bit for bit).


def marginal_cdf(family: Family, x, which: str = "b"):
    x = np.asarray(x, dtype=float)
    if isinstance(family, _CONTINUOUS):
        return np.clip(x / family.tau_bar, 0.0, 1.0)
    if isinstance(family, DiscreteThresholds):
        coords = np.array([p[0 if which == "b" else 1] for p in family.points])
        w = np.array(family.weights)
        return (x[..., None] + 1e-12 >= coords) @ w
    total = 0.0
    for weight, component in family.components:
        total = total + weight * marginal_cdf(component, x, which)
    return total


def joint_cdf(family: Family, x, y):
    """Right-inclusive joint CDF H(x, y) = P(tau_b <= x, tau_c <= y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if isinstance(family, IndependentUniform):
        return marginal_cdf(family, x) * marginal_cdf(family, y)
    if isinstance(family, Comonotone):
        return np.minimum(marginal_cdf(family, x), marginal_cdf(family, y))
    if isinstance(family, Antithetic):
        return np.maximum(marginal_cdf(family, x) + marginal_cdf(family, y) - 1.0, 0.0)
    if isinstance(family, GaussianCopulaUniform):
        return _gaussian_copula_cdf(family, x, y)
    if isinstance(family, DiscreteThresholds):
        bs = np.array([p[0] for p in family.points])
        cs = np.array([p[1] for p in family.points])
        w = np.array(family.weights)
        hit = (x[..., None] + 1e-12 >= bs) & (y[..., None] + 1e-12 >= cs)
        return hit @ w
    total = 0.0
    for weight, component in family.components:
        total = total + weight * joint_cdf(component, x, y)
    return total


def _gaussian_copula_cdf(family: GaussianCopulaUniform, x, y):
    u = np.clip(np.asarray(x, dtype=float) / family.tau_bar, 0.0, 1.0)
    v = np.clip(np.asarray(y, dtype=float) / family.tau_bar, 0.0, 1.0)
    u, v = np.broadcast_arrays(u, v)
    # Interior points go through the bivariate normal; boundaries are exact.
    interior = (u > 0.0) & (u < 1.0) & (v > 0.0) & (v < 1.0)
    safe_u = np.where(interior, u, 0.5)
    safe_v = np.where(interior, v, 0.5)
    inner = bvn_cdf(ndtri(safe_u), ndtri(safe_v), family.rho)
    out = np.where(interior, inner, 0.0)
    out = np.where((u >= 1.0), v, out)
    out = np.where((v >= 1.0), np.where(u >= 1.0, 1.0, u), out)
    out = np.where((u <= 0.0) | (v <= 0.0), 0.0, out)
    return out


def sample_thresholds(family: Family, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw n threshold pairs; returns an (n, 2) array."""
    if isinstance(family, IndependentUniform):
        return rng.uniform(0.0, family.tau_bar, size=(n, 2))
    if isinstance(family, Comonotone):
        u = rng.uniform(0.0, 1.0, size=n)
        return np.column_stack([family.tau_bar * u, family.tau_bar * u])
    if isinstance(family, Antithetic):
        u = rng.uniform(0.0, 1.0, size=n)
        return np.column_stack([family.tau_bar * u, family.tau_bar * (1.0 - u)])
    if isinstance(family, GaussianCopulaUniform):
        z1 = rng.standard_normal(n)
        z2 = rng.standard_normal(n)
        w = family.rho * z1 + math.sqrt(max(0.0, 1.0 - family.rho**2)) * z2
        return np.column_stack([family.tau_bar * ndtr(z1), family.tau_bar * ndtr(w)])
    if isinstance(family, DiscreteThresholds):
        idx = rng.choice(len(family.points), size=n, p=np.array(family.weights))
        pts = np.array(family.points)
        return pts[idx]
    counts = rng.multinomial(n, [w for w, _ in family.components])
    parts = [
        sample_thresholds(component, rng, count)
        for (_, component), count in zip(family.components, counts)
        if count > 0
    ]
    return np.vstack(parts)


def _atom_levels(family: Family) -> tuple[list[float], list[float]]:
    """Threshold coordinates worth probing directly during optimization."""
    if isinstance(family, DiscreteThresholds):
        return [p[0] for p in family.points], [p[1] for p in family.points]
    if isinstance(family, MixtureThresholds):
        bs: list[float] = []
        cs: list[float] = []
        for _, component in family.components:
            eb, ec = _atom_levels(component)
            bs.extend(eb)
            cs.extend(ec)
        return bs, cs
    return [], []


# --------------------------------------------------------------------------
# The proposer's objective


def lambda_accept(s_b, s_c, belief: ThresholdBelief):
    """P(at least one partner accepts) via inclusion-exclusion."""
    s_b = np.asarray(s_b, dtype=float)
    s_c = np.asarray(s_c, dtype=float)
    if np.any(s_b < 0) or np.any(s_c < 0):
        raise NegativeShareError("offered shares must be non-negative")
    family = belief.family
    out = marginal_cdf(family, s_b, "b") + marginal_cdf(family, s_c, "c") - joint_cdf(
        family, s_b, s_c
    )
    if out.ndim == 0:
        return float(out)
    return out


def _offer_triple(offer) -> tuple[float, float, float]:
    if isinstance(offer, Allocation):
        return offer.shares
    triple = tuple(float(v) for v in offer)
    if len(triple) != 3:
        raise ValueError("an offer has exactly three shares")
    return triple


def expected_payoff(offer, belief: ThresholdBelief, clamped: bool = False):
    """Proposer's expected payoff d + (s_a - d) * Lambda(s_b, s_c).

    With ``clamped=True`` the self-share term is floored at the continuation
    payoff (``max(s_a - d, 0)``), the variant whose optimizers coincide with
    the plain objective while never dipping below d.
    """
    s_a, s_b, s_c = _offer_triple(offer)
    lam = lambda_accept(s_b, s_c, belief)
    gain = s_a - belief.d
    if clamped:
        gain = max(gain, 0.0)
    return belief.d + gain * lam


def _payoff_grid(bs: np.ndarray, cs: np.ndarray, belief: ThresholdBelief, clamped: bool):
    lam = marginal_cdf(belief.family, bs, "b") + marginal_cdf(belief.family, cs, "c") - joint_cdf(
        belief.family, bs, cs
    )
    gain = (1.0 - bs - cs) - belief.d
    if clamped:
        gain = np.maximum(gain, 0.0)
    return belief.d + gain * lam


# --------------------------------------------------------------------------
# Grid optimization


@dataclass(frozen=True)
class OfferOptimum:
    """Result of a simplex scan: the best offer found, its expected payoff and
    acceptance probability, MWC flag, and grid metadata.  ``degenerate`` marks
    a near-tie set stretching over multiple grid cells (a locus of optima), in
    which case ``min_gini_offer`` is the most equal offer on that locus."""

    offer: tuple[float, float, float]
    expected_payoff: float
    accept_prob: float
    is_mwc: bool
    grid_step: float
    refinement_iterations: int
    degenerate: bool = False
    min_gini_offer: tuple[float, float, float] | None = None


def simplex_grid(step: float) -> tuple[np.ndarray, np.ndarray]:
    """All (s_b, s_c) pairs on the step-lattice with s_b + s_c <= 1."""
    n = round(1.0 / step)
    bs = []
    cs = []
    for i in range(n + 1):
        b = i * step
        for j in range(n + 1 - i):
            bs.append(b)
            cs.append(j * step)
    return np.array(bs), np.array(cs)


def _offer_gini(sa, sb, sc):
    hi = np.maximum(np.maximum(sa, sb), sc)
    lo = np.minimum(np.minimum(sa, sb), sc)
    return (2.0 / 3.0) * (hi - lo)


def _lex_best(indices: np.ndarray, sa: np.ndarray, sb: np.ndarray) -> int:
    order = np.lexsort((sb[indices], sa[indices]))
    return int(indices[order[-1]])


def optimize_offer(
    belief: ThresholdBelief,
    step: float = 0.005,
    refine_depth: int = 3,
    clamped: bool = False,
    probe_atoms: bool = False,
) -> OfferOptimum:
    """Maximize the expected payoff over the offer simplex.

    Exhaustive scan on the ``step`` lattice, then ``refine_depth`` rounds of
    local 5x refinement around the incumbent.  With ``probe_atoms`` the scan
    also evaluates discrete-atom coordinates directly, so right-inclusive
    jumps are hit exactly rather than from the nearest lattice point.  Payoff
    ties break lexicographically on (s_a, s_b) for reproducibility.
    """
    if not 0.0 < step <= 0.05:
        raise BeliefError(f"grid step must lie in (0, 0.05], got {step}")
    validate_belief(belief)
    bs, cs = simplex_grid(step)
    atom_bs, atom_cs = _atom_levels(belief.family) if probe_atoms else ([], [])
    if atom_bs or atom_cs:
        levels_b = np.unique(np.concatenate([np.unique(bs), np.array(atom_bs, dtype=float)]))
        levels_c = np.unique(np.concatenate([np.unique(cs), np.array(atom_cs, dtype=float)]))
        levels_b = levels_b[(levels_b >= 0.0) & (levels_b <= 1.0)]
        levels_c = levels_c[(levels_c >= 0.0) & (levels_c <= 1.0)]
        gb, gc = np.meshgrid(levels_b, levels_c, indexing="ij")
        keep = (gb + gc) <= 1.0 + 1e-12
        bs, cs = gb[keep], gc[keep]
    payoff = _payoff_grid(bs, cs, belief, clamped)
    sa = 1.0 - bs - cs
    best_val = float(payoff.max())

    exact = np.flatnonzero(payoff == best_val)
    best_idx = _lex_best(exact, sa, bs)

    tie_tol = max(1e-9, 1e-9 * abs(best_val))
    near = np.flatnonzero(payoff >= best_val - tie_tol)
    # Swapping which partner receives which share is a trivial symmetry, not
    # a degenerate optimum; measure the tie set in partner-sorted coordinates.
    hi = np.maximum(bs[near], cs[near])
    lo = np.minimum(bs[near], cs[near])
    span = math.hypot(float(hi.max() - hi.min()), float(lo.max() - lo.min()))
    degenerate = span > 3.0 * step
    min_gini_offer = None
    if degenerate:
        ginis = _offer_gini(sa[near], bs[near], cs[near])
        flat = near[ginis <= ginis.min() + 1e-12]
        gi = _lex_best(flat, sa, bs)
        min_gini_offer = (float(sa[gi]), float(bs[gi]), float(cs[gi]))

    b0, c0 = float(bs[best_idx]), float(cs[best_idx])
    current_step = step
    iterations = 0
    for _ in range(refine_depth):
        new_step = current_step / 5.0
        offsets = np.arange(-10, 11) * new_step
        lb = np.clip(b0 + offsets, 0.0, 1.0)
        lc = np.clip(c0 + offsets, 0.0, 1.0)
        gb, gc = np.meshgrid(np.unique(lb), np.unique(lc), indexing="ij")
        keep = (gb + gc) <= 1.0 + 1e-12
        gb, gc = gb[keep], gc[keep]
        local = _payoff_grid(gb, gc, belief, clamped)
        local_best = float(local.max())
        if local_best >= best_val:
            lsa = 1.0 - gb - gc
            li = _lex_best(np.flatnonzero(local == local_best), lsa, gb)
            best_val = local_best
            b0, c0 = float(gb[li]), float(gc[li])
        current_step = new_step
        iterations += 1

    offer = (1.0 - b0 - c0, b0, c0)
    return OfferOptimum(
        offer=offer,
        expected_payoff=best_val,
        accept_prob=float(lambda_accept(b0, c0, belief)),
        is_mwc=min(b0, c0) < step,
        grid_step=step,
        refinement_iterations=iterations,
        degenerate=degenerate,
        min_gini_offer=min_gini_offer,
    )


# --------------------------------------------------------------------------
# Convergence studies


@dataclass(frozen=True)
class ConvergenceEntry:
    optimum: OfferOptimum
    distance: float


@dataclass(frozen=True)
class ConvergenceStudy:
    limit_offer: tuple[float, float, float]
    entries: tuple[ConvergenceEntry, ...]
    distances_non_increasing: bool


def limit_offer_for(d: float) -> tuple[float, float, float]:
    """The boundary-case optimum ((1+d)/2, (1-d)/2, 0)."""
    return ((1.0 + d) / 2.0, (1.0 - d) / 2.0, 0.0)


def convergence_study(
    target: ThresholdBelief,
    sequence: Iterable[ThresholdBelief],
    step: float = 0.005,
    refine_depth: int = 3,
) -> ConvergenceStudy:
    """Optimize every element of a belief sequence and report each optimum's
    Euclidean distance to the target's boundary-case offer."""
    validate_belief(target)
    limit = limit_offer_for(target.d)
    entries = []
    for belief in sequence:
        opt = optimize_offer(belief, step=step, refine_depth=refine_depth)
        dist = math.dist(opt.offer, limit)
        entries.append(ConvergenceEntry(opt, dist))
    distances = [e.distance for e in entries]
    monotone = all(b <= a + 1e-9 for a, b in zip(distances, distances[1:]))
    return ConvergenceStudy(limit, tuple(entries), monotone)


# --------------------------------------------------------------------------
# n-player extension (independent uniform thresholds)


def poisson_binomial_tail(probabilities: Sequence[float], k: int) -> float:
    """P(at least k successes) among independent Bernoulli trials, exactly."""
    dp = np.zeros(len(probabilities) + 1)
    dp[0] = 1.0
    for p in probabilities:
        dp[1:] = dp[1:] * (1.0 - p) + dp[:-1] * p
        dp[0] *= 1.0 - p
    return float(dp[max(k, 0):].sum())


def n_player_expected_payoff(
    offers_to_others: Sequence[float], n: int, tau_bar: float = 1.0, d: float = 0.0
) -> float:
    """Expected payoff of a proposer facing n-1 others with independent
    uniform thresholds on [0, tau_bar], under simple majority (the proposer's
    own vote counts, so ceil(n/2) - 1 of the others must accept)."""
    if n < 3 or n % 2 == 0:
        raise EvenNError(f"n must be an odd integer of at least 3, got {n}")
    offers = [float(x) for x in offers_to_others]
    if len(offers) != n - 1:
        raise BadArityError(f"expected {n - 1} offers, got {len(offers)}")
    if any(x < 0 for x in offers):
        raise NegativeShareError("offered shares must be non-negative")
    if sum(offers) > 1.0 + 1e-12:
        raise BeliefError("offers cannot exceed the whole prize")
    keep = 1.0 - sum(offers)
    accept = [min(x / tau_bar, 1.0) for x in offers]
    needed = (n + 1) // 2 - 1
    return d + (keep - d) * poisson_binomial_tail(accept, needed)
