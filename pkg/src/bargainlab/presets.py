"""Named presets: the five bargaining treatments, reference acceptance-model
coefficient sets, and mean-rejection-payoff figures by site and treatment.

Treatment defaults follow the experimental design: one- and two-round games
set defaults of 0.05 for the (fixed) proposers and 0.90 for the remaining
player; three-round games set all defaults to zero and draw each round's
proposer uniformly.  Rejection payoffs are stored as fractions of the prize
(the reference figures are percentages of the prize; the one-round value of
5.00 is exactly the proposer's 0.05 default share)."""

from __future__ import annotations

from fractions import Fraction

from .game import GameSpec, InfoProtocol, RecognitionModel
from .simulate import LogitModel

_F = Fraction


def _treatment(name, num_rounds, protocol, defaults, recognition, shrink=_F(1)) -> GameSpec:
    return GameSpec(
        num_rounds=num_rounds,
        protocol=protocol,
        defaults=defaults,
        prize_points=240,
        shrink_factor=shrink,
        recognition=recognition,
        spec_id=name,
    )


def _build_treatments() -> dict[str, GameSpec]:
    specs = {
        "1-perfect": _treatment(
            "1-perfect",
            1,
            InfoProtocol.PERFECT,
            (_F(1, 20), _F(1, 20), _F(9, 10)),
            RecognitionModel.fixed_order((0,)),
        ),
        "2-perfect": _treatment(
            "2-perfect",
            2,
            InfoProtocol.PERFECT,
            (_F(1, 20), _F(1, 20), _F(9, 10)),
            RecognitionModel.fixed_order((0, 1)),
        ),
        "3-perfect": _treatment(
            "3-perfect",
            3,
            InfoProtocol.PERFECT,
            (_F(0), _F(0), _F(0)),
            RecognitionModel.iid_uniform(),
        ),
        "3-partial": _treatment(
            "3-partial",
            3,
            InfoProtocol.PARTIAL,
            (_F(0), _F(0), _F(0)),
            RecognitionModel.iid_uniform(),
        ),
        "3-none": _treatment(
            "3-none",
            3,
            InfoProtocol.NONE,
            (_F(0), _F(0), _F(0)),
            RecognitionModel.iid_uniform(),
        ),
    }
    # Lab-instruction variants with a per-round budget reduction; the theory
    # treatments above keep the full budget after failed rounds.
    for name, spec in list(specs.items()):
        shrunk = f"{name}-delta95"
        specs[shrunk] = _treatment(
            shrunk,
            spec.num_rounds,
            spec.protocol,
            spec.defaults,
            spec.recognition,
            shrink=_F(19, 20),
        )
    return specs


TREATMENTS: dict[str, GameSpec] = _build_treatments()

THEORY_TREATMENTS = ("1-perfect", "2-perfect", "3-perfect", "3-partial", "3-none")


def treatment(name: str) -> GameSpec:
    try:
        return TREATMENTS[name]
    except KeyError:
        known = ", ".join(sorted(TREATMENTS))
        raise KeyError(f"unknown treatment {name!r}; known presets: {known}") from None


# Reference acceptance-model coefficients (constant, strong partner, own
# share, gini) by site and treatment condition; "colN" aliases follow the
# conventional column order.
REFERENCE_LOGIT_MODELS: dict[str, LogitModel] = {
    "caltech-1perfect": LogitModel(-0.420, -2.472, 8.271, -0.040),
    "caltech-2perfect": LogitModel(-0.895, -2.800, 9.211, -1.628),
    "caltech-3perfect-excl": LogitModel(-2.428, -1.358, 10.851, -4.519),
    "uci-1perfect": LogitModel(-1.596, -2.183, 12.561, 0.514),
    "uci-2perfect": LogitModel(-2.435, -1.028, 9.522, -1.626),
    "uci-3partial-incl": LogitModel(-2.239, -0.074, 9.224, -3.542),
    "uci-3perfect-excl": LogitModel(-3.707, -0.195, 15.478, -8.610),
}

_LOGIT_COLUMN_ORDER = (
    "caltech-1perfect",
    "caltech-2perfect",
    "caltech-3perfect-excl",
    "uci-1perfect",
    "uci-2perfect",
    "uci-3partial-incl",
    "uci-3perfect-excl",
)
for _i, _name in enumerate(_LOGIT_COLUMN_ORDER, start=1):
    REFERENCE_LOGIT_MODELS[f"col{_i}"] = REFERENCE_LOGIT_MODELS[_name]


def logit_model(name: str) -> LogitModel:
    try:
        return REFERENCE_LOGIT_MODELS[name]
    except KeyError:
        known = ", ".join(sorted(REFERENCE_LOGIT_MODELS))
        raise KeyError(f"unknown coefficient set {name!r}; known: {known}") from None


# Reference first-offer rejection rates and mean rejection payoffs, both as
# fractions (of matches and of the prize, respectively).
REFERENCE_MRP: dict[str, tuple[float, float]] = {
    "caltech-1perfect": (0.2273, 0.0500),
    "caltech-2perfect": (0.2727, 0.2724),
    "caltech-3perfect-excl": (0.2949, 0.2609),
    "caltech-3perfect-incl": (0.3846, 0.4300),
    "uci-1perfect": (0.1579, 0.0500),
    "uci-2perfect": (0.3158, 0.2628),
    "uci-3perfect-excl": (0.2110, 0.2696),
    "uci-3perfect-incl": (0.2157, 0.2576),
    "uci-3none": (0.2071, 0.2452),
    "uci-3partial-excl": (0.1818, 0.1222),
    "uci-3partial-incl": (0.2381, 0.1547),
}


def reference_mrp(name: str) -> float:
    try:
        return REFERENCE_MRP[name][1]
    except KeyError:
        known = ", ".join(sorted(REFERENCE_MRP))
        raise KeyError(f"unknown rejection-payoff row {name!r}; known: {known}") from None
