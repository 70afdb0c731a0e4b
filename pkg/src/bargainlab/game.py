"""Three-player majority bargaining model: treatments, information protocols,
allocations, and the match-log schema shared by the solver, simulator, and
analysis modules.

Conventions used throughout the package:

* Players are indexed ``0, 1, 2`` (displayed as A, B, C).  Match logs use
  experiment-style ids ``1..3`` where id 1 is the realized first proposer.
* The internal unit is *fraction of the round-1 prize*; display points appear
  only at I/O boundaries via :func:`points_to_fraction`.
* Quantities that feed the equilibrium solver (defaults, shrink factor,
  budgets, probabilities) are exact :class:`fractions.Fraction` values.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

PLAYERS = (0, 1, 2)
PLAYER_NAMES = ("A", "B", "C")


class GameSpecError(ValueError):
    """A game specification violates one of its invariants."""


class InvalidDefaultsError(GameSpecError):
    pass


class InvalidShrinkError(GameSpecError):
    pass


class InvalidOrderError(GameSpecError):
    pass


class OutOfRangeError(ValueError):
    pass


class RoundOutOfRangeError(ValueError):
    pass


class AllocationError(ValueError):
    pass


def as_fraction(value) -> Fraction:
    """Exact rational for ints/strings/Fractions; floats go through their
    decimal repr so ``0.95`` becomes ``19/20`` rather than a 53-bit binary."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


class InfoProtocol(Enum):
    """Disclosure regime for upcoming proposer identities.

    PERFECT discloses the next round's proposer one round ahead, PARTIAL
    discloses one player who will *not* propose next, NONE discloses nothing.
    """

    PERFECT = "perfect"
    PARTIAL = "partial"
    NONE = "none"


class DisclosureKind(Enum):
    KNOWN_NEXT = "known_next"
    EXCLUDED_NEXT = "excluded_next"
    NO_INFO = "no_info"


@dataclass(frozen=True)
class Disclosure:
    """What the table knows about the next round's proposer."""

    kind: DisclosureKind
    player: int | None = None

    def __post_init__(self):
        if self.kind is DisclosureKind.NO_INFO:
            if self.player is not None:
                raise GameSpecError("no-info disclosure carries no player")
        elif self.player not in PLAYERS:
            raise GameSpecError(f"disclosure player must be one of {PLAYERS}")

    @staticmethod
    def known_next(player: int) -> "Disclosure":
        return Disclosure(DisclosureKind.KNOWN_NEXT, player)

    @staticmethod
    def excluded_next(player: int) -> "Disclosure":
        return Disclosure(DisclosureKind.EXCLUDED_NEXT, player)


NO_INFO = Disclosure(DisclosureKind.NO_INFO)


@dataclass(frozen=True)
class RecognitionModel:
    """Distribution of the proposer sequence, independent across rounds.

    Three kinds are supported: ``iid_uniform`` (each round's proposer drawn
    independently and uniformly), ``fixed_order`` (a commonly known sequence),
    and ``table`` (an arbitrary per-round distribution, one row per round).
    """

    kind: str
    order: tuple[int, ...] = ()
    tables: tuple[tuple[Fraction, Fraction, Fraction], ...] = ()

    @staticmethod
    def iid_uniform() -> "RecognitionModel":
        return RecognitionModel("iid_uniform")

    @staticmethod
    def fixed_order(order: Sequence[int]) -> "RecognitionModel":
        return RecognitionModel("fixed_order", order=tuple(order))

    @staticmethod
    def from_tables(rows: Iterable[Sequence]) -> "RecognitionModel":
        tables = tuple(tuple(as_fraction(p) for p in row) for row in rows)
        return RecognitionModel("table", tables=tables)

    def round_distribution(self, round_index: int) -> tuple[Fraction, Fraction, Fraction]:
        """Probability of each player proposing in the given (1-based) round."""
        if self.kind == "iid_uniform":
            third = Fraction(1, 3)
            return (third, third, third)
        if self.kind == "fixed_order":
            dist = [Fraction(0)] * 3
            dist[self.order[round_index - 1]] = Fraction(1)
            return tuple(dist)
        return self.tables[round_index - 1]


@dataclass(frozen=True)
class GameSpec:
    """Full description of one bargaining treatment.

    ``defaults`` are per-player fractions of the prize paid if every round
    fails; ``shrink_factor`` scales the divisible budget after each failed
    round (1 means no shrinkage).
    """

    num_rounds: int
    protocol: InfoProtocol
    defaults: tuple[Fraction, Fraction, Fraction]
    prize_points: int = 240
    shrink_factor: Fraction = Fraction(1)
    recognition: RecognitionModel = field(default_factory=RecognitionModel.iid_uniform)
    spec_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "defaults", tuple(as_fraction(v) for v in self.defaults))
        object.__setattr__(self, "shrink_factor", as_fraction(self.shrink_factor))

    def budget_fraction(self, round_index: int) -> Fraction:
        """Divisible budget at the given round, as a fraction of the round-1 prize."""
        return self.shrink_factor ** (round_index - 1)


def validate_spec(spec: GameSpec) -> GameSpec:
    """Check every GameSpec invariant; returns the spec unchanged when valid."""
    if not isinstance(spec.num_rounds, int) or spec.num_rounds < 1:
        raise GameSpecError(f"num_rounds must be a positive integer, got {spec.num_rounds!r}")
    if len(spec.defaults) != 3:
        raise InvalidDefaultsError("defaults must list exactly three shares")
    if any(v < 0 for v in spec.defaults):
        raise InvalidDefaultsError(f"defaults must be non-negative, got {spec.defaults}")
    if sum(spec.defaults) > 1:
        raise InvalidDefaultsError(f"defaults must sum to at most 1, got {spec.defaults}")
    if not (0 < spec.shrink_factor <= 1):
        raise InvalidShrinkError(f"shrink_factor must lie in (0, 1], got {spec.shrink_factor}")
    if spec.prize_points <= 0:
        raise GameSpecError("prize_points must be positive")
    rec = spec.recognition
    if rec.kind == "fixed_order":
        if len(rec.order) != spec.num_rounds:
            raise InvalidOrderError(
                f"fixed order has {len(rec.order)} entries for {spec.num_rounds} rounds"
            )
        if any(p not in PLAYERS for p in rec.order):
            raise InvalidOrderError(f"fixed order entries must be players, got {rec.order}")
    elif rec.kind == "table":
        if len(rec.tables) != spec.num_rounds:
            raise InvalidOrderError("recognition table needs one row per round")
        for row in rec.tables:
            if len(row) != 3 or any(p < 0 for p in row) or sum(row) != 1:
                raise InvalidOrderError(f"recognition row must be a distribution, got {row}")
    elif rec.kind != "iid_uniform":
        raise InvalidOrderError(f"unknown recognition kind {rec.kind!r}")
    return spec


def points_to_fraction(points: int, prize_points: int) -> Fraction:
    """Convert display points into an exact fraction of the prize."""
    if prize_points <= 0:
        raise OutOfRangeError("prize_points must be positive")
    if not 0 <= points <= prize_points:
        raise OutOfRangeError(f"points must lie in [0, {prize_points}], got {points}")
    return Fraction(points, prize_points)


_NORMALIZE_TOL = 1e-9


@dataclass(frozen=True)
class Allocation:
    """A division of the current divisible budget, as shares summing to 1."""

    shares: tuple[float, float, float]

    def __post_init__(self):
        shares = tuple(float(s) for s in self.shares)
        if len(shares) != 3:
            raise AllocationError("an allocation has exactly three shares")
        if any(s < -_NORMALIZE_TOL or s > 1 + _NORMALIZE_TOL for s in shares):
            raise AllocationError(f"shares must lie in [0, 1], got {shares}")
        if abs(sum(shares) - 1.0) > _NORMALIZE_TOL:
            raise AllocationError(f"shares must sum to 1, got {shares}")
        object.__setattr__(self, "shares", shares)

    @staticmethod
    def normalized(raw: Sequence[float]) -> "Allocation":
        """Scale non-negative weights to sum to 1.  Idempotent: inputs already
        summing to 1 (within 1e-12) are passed through untouched."""
        vals = [float(v) for v in raw]
        total = sum(vals)
        if total <= 0:
            raise AllocationError("cannot normalize a non-positive total")
        if abs(total - 1.0) > 1e-12:
            vals = [v / total for v in vals]
        return Allocation(tuple(vals))


def allocation_gini(shares: Sequence[float]) -> float:
    """Inequality of a three-way division: the pairwise-absolute-difference
    formula, which reduces to (2/3)(max - min) when shares sum to 1.  An
    all-zero division counts as perfectly equal.  Shares are sorted before
    summing so the value is exactly permutation invariant."""
    vals = sorted(float(s) for s in shares)
    total = sum(vals)
    if total <= 0:
        return 0.0
    return 2.0 * (vals[-1] - vals[0]) / (3.0 * total)


@dataclass(frozen=True)
class InfoState:
    """One information state: the round, its proposer, what is known about the
    next round's proposer, and the budget still on the table."""

    round: int
    proposer: int
    disclosure: Disclosure
    budget_fraction: Fraction

    def label(self) -> str:
        name = PLAYER_NAMES[self.proposer]
        d = self.disclosure
        if d.kind is DisclosureKind.KNOWN_NEXT:
            info = f"next={PLAYER_NAMES[d.player]}"
        elif d.kind is DisclosureKind.EXCLUDED_NEXT:
            info = f"excluded={PLAYER_NAMES[d.player]}"
        else:
            info = "no-info"
        return f"t{self.round}:{name}:{info}"


def _disclosure_distribution(spec: GameSpec, round_index: int) -> dict[Disclosure, Fraction]:
    """Distribution of the disclosure received during ``round_index`` about the
    following round's proposer.  The final round discloses nothing."""
    if round_index >= spec.num_rounds or spec.protocol is InfoProtocol.NONE:
        return {NO_INFO: Fraction(1)}
    nxt = spec.recognition.round_distribution(round_index + 1)
    if spec.protocol is InfoProtocol.PERFECT:
        return {Disclosure.known_next(q): pq for q, pq in enumerate(nxt) if pq > 0}
    # Partial: the excluded label is drawn uniformly between the two players
    # who will not propose next, then marginalized over the next proposer.
    dist: dict[Disclosure, Fraction] = {}
    for q, pq in enumerate(nxt):
        if pq == 0:
            continue
        for j in PLAYERS:
            if j == q:
                continue
            d = Disclosure.excluded_next(j)
            dist[d] = dist.get(d, Fraction(0)) + pq * Fraction(1, 2)
    return dist


def enumerate_info_states(spec: GameSpec, round_index: int) -> dict[InfoState, Fraction]:
    """All information states reachable at a round, with their probabilities
    under the recognition model (probabilities sum to 1 exactly)."""
    if not 1 <= round_index <= spec.num_rounds:
        raise RoundOutOfRangeError(
            f"round must lie in [1, {spec.num_rounds}], got {round_index}"
        )
    proposer_dist = spec.recognition.round_distribution(round_index)
    disclosure_dist = _disclosure_distribution(spec, round_index)
    budget = spec.budget_fraction(round_index)
    states: dict[InfoState, Fraction] = {}
    for p, pp in enumerate(proposer_dist):
        if pp == 0:
            continue
        for disc, pd in disclosure_dist.items():
            states[InfoState(round_index, p, disc, budget)] = pp * pd
    return states


# --------------------------------------------------------------------------
# Match logs


@dataclass(frozen=True)
class TerminalKind:
    kind: str  # "passed_round" | "defaulted"
    round: int | None = None

    @staticmethod
    def passed_round(round_index: int) -> "TerminalKind":
        return TerminalKind("passed_round", round_index)

    @staticmethod
    def defaulted() -> "TerminalKind":
        return TerminalKind("defaulted")


@dataclass(frozen=True)
class RoundRecord:
    """One round of one match.  Players appear as experiment ids 1..3 (id 1 is
    the first proposer); offers are shares of that round's budget."""

    round: int
    proposer: int
    disclosure: Disclosure
    offer: tuple[float, float, float]
    votes: tuple[bool, bool, bool]
    passed: bool


@dataclass(frozen=True)
class MatchLog:
    """Complete record of one simulated match.

    ``final_alloc`` is in fractions of the round-1 prize and therefore sums to
    the terminal round's budget fraction (not necessarily 1 when the budget
    shrinks).  ``thresholds`` records per-voter acceptance-threshold draws when
    threshold voters are in play, for replay audits.
    """

    spec_id: str
    seed: int
    rounds: tuple[RoundRecord, ...]
    final_alloc: tuple[float, float, float]
    terminal_kind: TerminalKind
    thresholds: tuple[float | None, float | None, float | None] | None = None


def _disclosure_to_obj(d: Disclosure) -> dict:
    return {"kind": d.kind.value, "player": None if d.player is None else d.player + 1}


def _disclosure_from_obj(obj: Mapping) -> Disclosure:
    kind = DisclosureKind(obj["kind"])
    player = obj.get("player")
    return Disclosure(kind, None if player is None else int(player) - 1)


def match_log_to_obj(log: MatchLog) -> dict:
    obj = {
        "spec_id": log.spec_id,
        "seed": log.seed,
        "rounds": [
            {
                "round": r.round,
                "proposer": r.proposer,
                "disclosure": _disclosure_to_obj(r.disclosure),
                "offer": list(r.offer),
                "votes": list(r.votes),
                "passed": r.passed,
            }
            for r in log.rounds
        ],
        "final_alloc": list(log.final_alloc),
        "terminal_kind": {"kind": log.terminal_kind.kind, "round": log.terminal_kind.round},
    }
    if log.thresholds is not None:
        obj["thresholds"] = list(log.thresholds)
    return obj


def match_log_from_obj(obj: Mapping) -> MatchLog:
    rounds = tuple(
        RoundRecord(
            round=int(r["round"]),
            proposer=int(r["proposer"]),
            disclosure=_disclosure_from_obj(r["disclosure"]),
            offer=tuple(float(x) for x in r["offer"]),
            votes=tuple(bool(v) for v in r["votes"]),
            passed=bool(r["passed"]),
        )
        for r in obj["rounds"]
    )
    tk = obj["terminal_kind"]
    thresholds = obj.get("thresholds")
    return MatchLog(
        spec_id=str(obj["spec_id"]),
        seed=int(obj["seed"]),
        rounds=rounds,
        final_alloc=tuple(float(x) for x in obj["final_alloc"]),
        terminal_kind=TerminalKind(tk["kind"], tk.get("round")),
        thresholds=None if thresholds is None else tuple(thresholds),
    )


def match_log_to_json(log: MatchLog) -> str:
    return json.dumps(match_log_to_obj(log), sort_keys=True, separators=(",", ":"))


def write_match_logs(path: str | os.PathLike, logs: Iterable[MatchLog]) -> None:
    """Write one JSON record per line, atomically (temp file + rename)."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".matchlogs-")
    try:
        with os.fdopen(fd, "w") as handle:
            for log in logs:
                handle.write(match_log_to_json(log))
                handle.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_match_logs(path: str | os.PathLike) -> list[MatchLog]:
    logs = []
    with open(path) as handle:
        for line in handle:
            line = line.strip()
            if line:
                logs.append(match_log_from_obj(json.loads(line)))
    return logs


def iter_match_logs(path: str | os.PathLike) -> Iterator[MatchLog]:
    yield from read_match_logs(path)


# --------------------------------------------------------------------------
# Treatment config files


def game_spec_to_config(spec: GameSpec) -> dict:
    rec = spec.recognition
    if rec.kind == "iid_uniform":
        recognition = "iid_uniform"
    elif rec.kind == "fixed_order":
        recognition = [PLAYER_NAMES[p] for p in rec.order]
    else:
        recognition = [[str(p) for p in row] for row in rec.tables]
    return {
        "num_rounds": spec.num_rounds,
        "protocol": spec.protocol.value,
        "defaults": [str(v) for v in spec.defaults],
        "prize_points": spec.prize_points,
        "shrink_factor": str(spec.shrink_factor),
        "recognition": recognition,
        "spec_id": spec.spec_id,
    }


def game_spec_from_config(config: Mapping) -> GameSpec:
    recognition = config.get("recognition", "iid_uniform")
    if recognition == "iid_uniform":
        rec = RecognitionModel.iid_uniform()
    elif recognition and isinstance(recognition[0], (list, tuple)):
        rec = RecognitionModel.from_tables(recognition)
    else:
        names = {name: i for i, name in enumerate(PLAYER_NAMES)}
        rec = RecognitionModel.fixed_order([names[str(p).upper()] for p in recognition])
    spec = GameSpec(
        num_rounds=int(config["num_rounds"]),
        protocol=InfoProtocol(config["protocol"]),
        defaults=tuple(as_fraction(v) for v in config["defaults"]),
        prize_points=int(config.get("prize_points", 240)),
        shrink_factor=as_fraction(config.get("shrink_factor", 1)),
        recognition=rec,
        spec_id=str(config.get("spec_id", "")),
    )
    return validate_spec(spec)


def load_game_config(path: str | os.PathLike) -> GameSpec:
    with open(path) as handle:
        return game_spec_from_config(json.load(handle))


def dump_game_config(spec: GameSpec, path: str | os.PathLike) -> None:
    with open(path, "w") as handle:
        json.dump(game_spec_to_config(spec), handle, indent=2)
        handle.write("\n")
