"""Shot encoding, hitter contexts and per-player probability tables.

Tennis is modeled as a non-deterministic shot-direction game. On each turn
the hitter picks a direction; chance then decides whether the shot is an
error, a winner, or stays in play. Rally shots aim at one of three zones
(1 = toward a right-hander's forehand side, 2 = middle, 3 = backhand side),
serves at one of three service-box targets (4 = wide, 5 = body,
6 = down the T).

A player's skill is a :class:`SkillProfile`: for each of 28 game-state
contexts, a 3x3 joint distribution over (direction, outcome). The contexts
split into 4 serve contexts (court side x serve number), 12 return contexts
(side x serve number x incoming serve direction) and 12 rally contexts
(whether the hitter served x serve number x incoming shot direction), so a
profile carries 36 + 108 + 108 = 252 probabilities. The direction marginal
of a context is the player's shot-selection policy; the per-direction
outcome conditional is the environment's stochasticity.

Profiles are immutable after construction and safe for concurrent reads;
sampling draws from a caller-owned random stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

PROB_TOL = 1e-9  # absolute tolerance on probability sums


class ShotModelError(Exception):
    """Base class for shot-model failures."""


class UnknownContextError(ShotModelError):
    """A context is missing from a profile's tables."""


class IllegalDirectionError(ShotModelError):
    """Direction code is not legal for the context (serve vs rally)."""


class UnsupportedDirectionError(ShotModelError):
    """Direction legal but never observed (zero marginal) in this context."""


class Direction(IntEnum):
    """Shot target encoding. 1-3 are rally zones, 4-6 are serve targets."""

    FOREHAND_SIDE = 1
    MIDDLE = 2
    BACKHAND_SIDE = 3
    WIDE = 4
    BODY = 5
    DOWN_THE_T = 6


RALLY_CODES = (1, 2, 3)
SERVE_CODES = (4, 5, 6)


def is_rally_code(code: int) -> bool:
    return 1 <= code <= 3


def is_serve_code(code: int) -> bool:
    return 4 <= code <= 6


class Outcome(IntEnum):
    """Result of a single shot. On a serve, ERROR is a fault and WINNER an ace."""

    ERROR = 0
    WINNER = 1
    IN_PLAY = 2

    @property
    def key(self) -> str:
        return _OUTCOME_KEYS[self]


_OUTCOME_KEYS = {Outcome.ERROR: "error", Outcome.WINNER: "winner", Outcome.IN_PLAY: "in_play"}


class Side(str, Enum):
    """Serving side of the court for the current point."""

    DEUCE = "deuce"
    ADVANTAGE = "advantage"


class ServeNumber(str, Enum):
    FIRST = "first"
    SECOND = "second"


@dataclass(frozen=True, slots=True)
class ServeContext:
    side: Side
    serve_number: ServeNumber


@dataclass(frozen=True, slots=True)
class ReturnContext:
    side: Side
    serve_number: ServeNumber
    serve_direction: int  # 4-6

    def __post_init__(self) -> None:
        if not is_serve_code(self.serve_direction):
            raise IllegalDirectionError(
                f"return context needs a serve direction 4-6, got {self.serve_direction}"
            )


@dataclass(frozen=True, slots=True)
class RallyContext:
    hitter_served: bool
    serve_number: ServeNumber
    previous_direction: int  # 1-3

    def __post_init__(self) -> None:
        if not is_rally_code(self.previous_direction):
            raise IllegalDirectionError(
                f"rally context needs a previous direction 1-3, got {self.previous_direction}"
            )


HitterContext = Union[ServeContext, ReturnContext, RallyContext]

# Interned instances, so hot paths never re-run construction or validation.
_SERVE_CTX: Dict[Tuple[Side, ServeNumber], ServeContext] = {}
_RETURN_CTX: Dict[Tuple[Side, ServeNumber, int], ReturnContext] = {}
_RALLY_CTX: Dict[Tuple[bool, ServeNumber, int], RallyContext] = {}

for _side in Side:
    for _sn in ServeNumber:
        _SERVE_CTX[(_side, _sn)] = ServeContext(_side, _sn)
        for _sd in SERVE_CODES:
            _RETURN_CTX[(_side, _sn, _sd)] = ReturnContext(_side, _sn, _sd)
for _served in (True, False):
    for _sn in ServeNumber:
        for _pd in RALLY_CODES:
            _RALLY_CTX[(_served, _sn, _pd)] = RallyContext(_served, _sn, _pd)


def serve_context(side: Side, serve_number: ServeNumber) -> ServeContext:
    return _SERVE_CTX[(side, serve_number)]


def return_context(side: Side, serve_number: ServeNumber, serve_direction: int) -> ReturnContext:
    try:
        return _RETURN_CTX[(side, serve_number, serve_direction)]
    except KeyError:
        raise IllegalDirectionError(
            f"return context needs a serve direction 4-6, got {serve_direction}"
        ) from None


def rally_context(hitter_served: bool, serve_number: ServeNumber, previous_direction: int) -> RallyContext:
    try:
        return _RALLY_CTX[(hitter_served, serve_number, previous_direction)]
    except KeyError:
        raise IllegalDirectionError(
            f"rally context needs a previous direction 1-3, got {previous_direction}"
        ) from None


def all_contexts() -> Tuple[HitterContext, ...]:
    """The 28 contexts in canonical order: 4 serve, 12 return, 12 rally."""
    return ALL_CONTEXTS


ALL_CONTEXTS: Tuple[HitterContext, ...] = tuple(
    [serve_context(s, n) for s in Side for n in ServeNumber]
    + [return_context(s, n, d) for s in Side for n in ServeNumber for d in SERVE_CODES]
    + [rally_context(h, n, d) for h in (True, False) for n in ServeNumber for d in RALLY_CODES]
)

CONTEXT_COUNT = len(ALL_CONTEXTS)  # 28
PROBABILITY_COUNT = CONTEXT_COUNT * 9  # 252


def direction_codes(ctx: HitterContext) -> Tuple[int, int, int]:
    """Direction codes the hitter may choose in this context."""
    return SERVE_CODES if type(ctx) is ServeContext else RALLY_CODES


def context_key(ctx: HitterContext) -> str:
    """Compact string form used in match records, e.g. ``rally:served:first:2``."""
    if type(ctx) is ServeContext:
        return f"serve:{ctx.side.value}:{ctx.serve_number.value}"
    if type(ctx) is ReturnContext:
        return f"return:{ctx.side.value}:{ctx.serve_number.value}:{ctx.serve_direction}"
    return (
        f"rally:{'served' if ctx.hitter_served else 'received'}:"
        f"{ctx.serve_number.value}:{ctx.previous_direction}"
    )


def context_from_key(key: str) -> HitterContext:
    """Inverse of :func:`context_key`."""
    parts = key.split(":")
    try:
        if parts[0] == "serve" and len(parts) == 3:
            return serve_context(Side(parts[1]), ServeNumber(parts[2]))
        if parts[0] == "return" and len(parts) == 4:
            return return_context(Side(parts[1]), ServeNumber(parts[2]), int(parts[3]))
        if parts[0] == "rally" and len(parts) == 4 and parts[1] in ("served", "received"):
            return rally_context(parts[1] == "served", ServeNumber(parts[2]), int(parts[3]))
    except (ValueError, KeyError, ShotModelError):
        pass
    raise ValueError(f"not a context key: {key!r}")


@dataclass(eq=False)
class SkillProfile:
    """Context-conditioned joint probability tables for one player.

    ``tables`` maps each of the 28 contexts to a 3x3 float array indexed
    ``[direction slot][outcome]`` with outcome columns (error, winner,
    in_play). Direction slot 0 is the lowest legal code for the context
    (1 for rally/return, 4 for serve). Compare with :func:`profiles_equal`;
    ``==`` stays identity because of the array-valued tables.
    """

    tables: Dict[HitterContext, np.ndarray]
    provenance: str = ""
    _compiled: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.tables = {
            ctx: np.asarray(grid, dtype=np.float64).reshape(3, 3)
            for ctx, grid in self.tables.items()
        }

    def grid(self, ctx: HitterContext) -> np.ndarray:
        try:
            return self.tables[ctx]
        except KeyError:
            raise UnknownContextError(f"no table for context {context_key(ctx)}") from None


@dataclass(frozen=True, slots=True)
class ValidationIssue:
    context: Optional[HitterContext]
    problem: str
    detail: str = ""

    def __str__(self) -> str:
        where = context_key(self.context) if self.context is not None else "<profile>"
        return f"{where}: {self.problem}" + (f" ({self.detail})" if self.detail else "")


@dataclass
class ValidationReport:
    issues: List[ValidationIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __str__(self) -> str:
        if self.ok:
            return "profile valid (28 contexts, 252 probabilities)"
        return "\n".join(str(issue) for issue in self.issues)


def validate_profile(profile: SkillProfile) -> ValidationReport:
    """Check a profile against the table contract. Never raises.

    Flags, per context: a missing table, entries outside [0, 1], a grid sum
    off 1 by more than ``PROB_TOL``, and zero total probability of terminal
    outcomes (error or winner), which would allow never-ending rallies.
    Unknown contexts in ``tables`` are flagged too. An empty report means
    all 28 contexts are valid.
    """
    report = ValidationReport()
    known = set(ALL_CONTEXTS)
    for ctx in profile.tables:
        if ctx not in known:
            report.issues.append(ValidationIssue(ctx, "unexpected context"))
    for ctx in ALL_CONTEXTS:
        if ctx not in profile.tables:
            report.issues.append(ValidationIssue(ctx, "missing context"))
            continue
        grid = profile.tables[ctx]
        if grid.shape != (3, 3):
            report.issues.append(ValidationIssue(ctx, "bad shape", str(grid.shape)))
            continue
        if not np.all(np.isfinite(grid)):
            report.issues.append(ValidationIssue(ctx, "non-finite entry"))
            continue
        if np.any(grid < 0.0) or np.any(grid > 1.0):
            report.issues.append(ValidationIssue(ctx, "entry outside [0, 1]"))
        total = float(grid.sum())
        if abs(total - 1.0) > PROB_TOL:
            report.issues.append(
                ValidationIssue(ctx, "grid does not sum to 1", f"deficit {1.0 - total:.6g}")
            )
        terminal = float(grid[:, Outcome.ERROR].sum() + grid[:, Outcome.WINNER].sum())
        if terminal <= 0.0:
            report.issues.append(ValidationIssue(ctx, "zero terminal probability"))
    return report


def _compiled_entry(profile: SkillProfile, ctx: HitterContext):
    """Cached sampling tables for one context.

    Returns (base_code, marginal tuple, cumulative marginal (c0, c1),
    per-slot outcome cut points ((p_err, p_err + p_win) or None if the
    slot is unsupported)).
    """
    entry = profile._compiled.get(ctx)
    if entry is not None:
        return entry
    grid = profile.grid(ctx)
    base = direction_codes(ctx)[0]
    m = grid.sum(axis=1)
    marginal = (float(m[0]), float(m[1]), float(m[2]))
    cuts = []
    for slot in range(3):
        if marginal[slot] <= 0.0:
            cuts.append(None)
        else:
            p_err = float(grid[slot, 0]) / marginal[slot]
            p_win = float(grid[slot, 1]) / marginal[slot]
            cuts.append((p_err, p_err + p_win))
    entry = (base, marginal, (marginal[0], marginal[0] + marginal[1]), tuple(cuts))
    profile._compiled[ctx] = entry
    return entry


def direction_marginal(profile: SkillProfile, ctx: HitterContext) -> Tuple[float, float, float]:
    """The hitter's direction distribution: the joint table summed over outcomes.

    Entries follow the context's direction codes in ascending order and sum
    to 1 within ``PROB_TOL`` for a valid profile.
    """
    return _compiled_entry(profile, ctx)[1]


def outcome_conditional(
    profile: SkillProfile, ctx: HitterContext, direction: int
) -> Tuple[float, float, float]:
    """(p_error, p_winner, p_in_play) of a shot in ``direction``, given this context.

    Raises :class:`IllegalDirectionError` for a code outside the context's
    legal set, and :class:`UnsupportedDirectionError` when the direction has
    zero marginal (the data never observed it here).
    """
    base, marginal, _, cuts = _compiled_entry(profile, ctx)
    slot = direction - base
    if not 0 <= slot <= 2:
        raise IllegalDirectionError(
            f"direction {direction} is not legal in context {context_key(ctx)}"
        )
    cut = cuts[slot]
    if cut is None:
        raise UnsupportedDirectionError(
            f"direction {direction} unsupported in context {context_key(ctx)}"
        )
    p_err, p_err_win = cut
    return (p_err, p_err_win - p_err, 1.0 - p_err_win)


def sample_outcome(profile: SkillProfile, ctx: HitterContext, direction: int, rng) -> Outcome:
    """Draw one shot outcome. Consumes exactly one draw from ``rng``."""
    base, _, _, cuts = _compiled_entry(profile, ctx)
    slot = direction - base
    if not 0 <= slot <= 2:
        raise IllegalDirectionError(
            f"direction {direction} is not legal in context {context_key(ctx)}"
        )
    cut = cuts[slot]
    if cut is None:
        raise UnsupportedDirectionError(
            f"direction {direction} unsupported in context {context_key(ctx)}"
        )
    u = rng.random()
    if u < cut[0]:
        return Outcome.ERROR
    if u < cut[1]:
        return Outcome.WINNER
    return Outcome.IN_PLAY


def sample_direction(profile: SkillProfile, ctx: HitterContext, rng) -> int:
    """Draw a direction code from the context's marginal. One rng draw."""
    base, _, cum, _ = _compiled_entry(profile, ctx)
    u = rng.random()
    if u < cum[0]:
        return base
    if u < cum[1]:
        return base + 1
    return base + 2


def supported_directions(profile: SkillProfile, ctx: HitterContext) -> Tuple[int, ...]:
    """Direction codes with positive marginal, ascending."""
    base, marginal, _, _ = _compiled_entry(profile, ctx)
    return tuple(base + slot for slot in range(3) if marginal[slot] > 0.0)


def profiles_equal(a: SkillProfile, b: SkillProfile) -> bool:
    """Bit-exact table equality over all contexts (provenance ignored)."""
    if set(a.tables) != set(b.tables):
        return False
    return all(np.array_equal(a.tables[ctx], b.tables[ctx]) for ctx in a.tables)


def uniform_profile(provenance: str = "uniform") -> SkillProfile:
    """All 28 contexts filled with the uniform 1/9 grid. Useful as a baseline."""
    grid = np.full((3, 3), 1.0 / 9.0)
    return SkillProfile({ctx: grid.copy() for ctx in ALL_CONTEXTS}, provenance=provenance)


def profile_from_rows(
    rows: Dict[HitterContext, Iterable[float]], provenance: str = ""
) -> SkillProfile:
    """Build a profile from 9-element rows (direction-major, outcome-minor)."""
    tables = {}
    for ctx, row in rows.items():
        flat = np.asarray(list(row), dtype=np.float64)
        if flat.size != 9:
            raise ValueError(f"context {context_key(ctx)}: expected 9 entries, got {flat.size}")
        tables[ctx] = flat.reshape(3, 3)
    return SkillProfile(tables, provenance=provenance)
