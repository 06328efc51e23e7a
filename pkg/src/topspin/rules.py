"""Tennis scoring and rally state machine.

Pure transitions on value-semantics state: :func:`apply_point` maps a score
and a point winner to the unique successor score (deuce/advantage, game and
set rollups, tiebreak entry, serve rotation), and :func:`advance_rally` maps
a rally state plus one (direction, outcome) shot to the next rally state and
an event (second serve, point decided, or rally continues with the next
hitter's context). Nothing here is random; chance lives in the shot model
and the agents.

Score objects are never mutated in place. Treat every returned state as
immutable.

Conventions:

* Points inside a game are kept as raw counts (0, 1, 2, 3, ...), rendered
  as 0/15/30/40/Ad. After deuce the pair is clamped back to (3, 3), which
  keeps counts bounded and preserves the played-points parity that decides
  the serving side.
* Rally length counts serves that land in play (an ace is a one-shot rally)
  and every later shot, including the final error or winner. Faults are
  logged but not counted, so a double fault is a zero-shot rally.
* The server alternates every game; a tiebreak counts as one game and
  inside it the serve alternates after the first point, then every two.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple, Union

from .shots import (
    HitterContext,
    Outcome,
    ServeNumber,
    Side,
    is_rally_code,
    is_serve_code,
    rally_context,
    return_context,
    serve_context,
)

PLAYER_A = "A"
PLAYER_B = "B"
PLAYERS = (PLAYER_A, PLAYER_B)


def other(player: str) -> str:
    return PLAYER_B if player == PLAYER_A else PLAYER_A


class RulesError(Exception):
    """Base class for scoring/rally contract violations."""


class InvalidConfigError(RulesError):
    pass


class MatchOverError(RulesError):
    pass


class IllegalShotError(RulesError):
    """Direction code does not fit the rally phase, or the rally is over."""


@dataclass(frozen=True, slots=True)
class MatchConfig:
    """Match format. Defaults give best-of-3 with a 7-point tiebreak at 6-6."""

    sets_to_win: int = 2
    games_per_set: int = 6
    tiebreak_at: Optional[int] = 6
    tiebreak_points: int = 7
    advantage_scoring: bool = True
    rally_shot_cap: int = 500

    def __post_init__(self) -> None:
        if self.sets_to_win < 1 or self.games_per_set < 1 or self.tiebreak_points < 1:
            raise InvalidConfigError("all counts must be positive")
        if self.rally_shot_cap < 1:
            raise InvalidConfigError("rally_shot_cap must be positive")
        if self.tiebreak_at is not None:
            if self.tiebreak_at < 1:
                raise InvalidConfigError("tiebreak_at must be positive")
            if self.tiebreak_at > self.games_per_set:
                raise InvalidConfigError("tiebreak_at cannot exceed games_per_set")


# One completed set: (games_a, games_b, (tb_a, tb_b) or None)
SetResult = Tuple[int, int, Optional[Tuple[int, int]]]


@dataclass(slots=True)
class MatchScore:
    """Full score state between points. Value semantics, do not mutate."""

    config: MatchConfig
    sets: Tuple[int, int]
    games: Tuple[int, int]
    points: Tuple[int, int]
    in_tiebreak: bool
    tiebreak: Tuple[int, int]
    server: str
    tiebreak_first_server: Optional[str]
    completed: Optional[str]
    set_history: Tuple[SetResult, ...]


def new_match(config: MatchConfig, first_server: str = PLAYER_A) -> MatchScore:
    """Zeroed score with the given first server."""
    if first_server not in PLAYERS:
        raise InvalidConfigError(f"unknown player id {first_server!r}")
    return MatchScore(config, (0, 0), (0, 0), (0, 0), False, (0, 0), first_server, None, None, ())


def match_winner(score: MatchScore) -> Optional[str]:
    """The player holding ``sets_to_win`` sets, if any."""
    return score.completed


def serve_side(score: MatchScore) -> Side:
    """Deuce side iff an even number of points has been played in the current game."""
    if score.completed is not None:
        raise MatchOverError("match is over")
    pair = score.tiebreak if score.in_tiebreak else score.points
    return Side.DEUCE if (pair[0] + pair[1]) % 2 == 0 else Side.ADVANTAGE


def _tiebreak_server(first_server: str, points_played: int) -> str:
    # Serve alternates after point 1, then every 2 points.
    return first_server if ((points_played + 1) // 2) % 2 == 0 else other(first_server)


def apply_point(score: MatchScore, point_winner: str) -> MatchScore:
    """Successor score after ``point_winner`` takes a point."""
    if score.completed is not None:
        raise MatchOverError("cannot apply a point to a completed match")
    if point_winner not in PLAYERS:
        raise InvalidConfigError(f"unknown player id {point_winner!r}")
    cfg = score.config
    w = 0 if point_winner == PLAYER_A else 1
    l = 1 - w

    if score.in_tiebreak:
        tb = list(score.tiebreak)
        tb[w] += 1
        if tb[w] >= cfg.tiebreak_points and tb[w] - tb[l] >= 2:
            games = list(score.games)
            games[w] += 1
            entry: SetResult = (games[0], games[1], (tb[0], tb[1]))
            return _finish_set(score, point_winner, entry)
        played = tb[0] + tb[1]
        server = _tiebreak_server(score.tiebreak_first_server, played)
        return MatchScore(
            cfg, score.sets, score.games, (0, 0), True, (tb[0], tb[1]), server,
            score.tiebreak_first_server, None, score.set_history,
        )

    pts = list(score.points)
    pts[w] += 1
    if cfg.advantage_scoring:
        game_over = pts[w] >= 4 and pts[w] - pts[l] >= 2
        if not game_over and pts[0] >= 4 and pts[1] >= 4:
            pts = [3, 3]  # back to deuce
    else:
        game_over = pts[w] >= 4
    if not game_over:
        return MatchScore(
            cfg, score.sets, score.games, (pts[0], pts[1]), False, (0, 0), score.server,
            None, None, score.set_history,
        )

    games = list(score.games)
    games[w] += 1
    if games[w] >= cfg.games_per_set and games[w] - games[l] >= 2:
        return _finish_set(score, point_winner, (games[0], games[1], None))
    next_server = other(score.server)
    if cfg.tiebreak_at is not None and games[0] == cfg.tiebreak_at and games[1] == cfg.tiebreak_at:
        return MatchScore(
            cfg, score.sets, (games[0], games[1]), (0, 0), True, (0, 0), next_server,
            next_server, None, score.set_history,
        )
    return MatchScore(
        cfg, score.sets, (games[0], games[1]), (0, 0), False, (0, 0), next_server,
        None, None, score.set_history,
    )


def _finish_set(score: MatchScore, set_winner: str, entry: SetResult) -> MatchScore:
    cfg = score.config
    w = 0 if set_winner == PLAYER_A else 1
    sets = list(score.sets)
    sets[w] += 1
    history = score.set_history + (entry,)
    completed = set_winner if sets[w] >= cfg.sets_to_win else None
    # The tiebreak counts as one game for rotation purposes.
    first = score.tiebreak_first_server if score.in_tiebreak else score.server
    next_server = other(first)
    return MatchScore(
        cfg, (sets[0], sets[1]), (0, 0), (0, 0), False, (0, 0), next_server, None,
        completed, history,
    )


_POINT_NAMES = ("0", "15", "30", "40")


def render_points(score: MatchScore) -> str:
    """Current-game points in tennis notation, e.g. ``40-30`` or ``Ad-40``."""
    if score.in_tiebreak:
        return f"{score.tiebreak[0]}-{score.tiebreak[1]}"
    a, b = score.points
    if a >= 3 and b >= 3:
        if a == b:
            return "40-40"
        return "Ad-40" if a > b else "40-Ad"
    return f"{_POINT_NAMES[min(a, 3)]}-{_POINT_NAMES[min(b, 3)]}"


def render_score(score: MatchScore) -> str:
    """Set-by-set score line, e.g. ``6-4 3-6 7-6(5)``.

    For an unfinished match the current set's games and the current game's
    points are appended, e.g. ``6-4 2-1 30-15``.
    """
    parts = []
    for ga, gb, tb in score.set_history:
        if tb is None:
            parts.append(f"{ga}-{gb}")
        else:
            parts.append(f"{ga}-{gb}({min(tb)})")
    if score.completed is None:
        parts.append(f"{score.games[0]}-{score.games[1]}")
        parts.append(render_points(score))
    return " ".join(parts) if parts else ""


# --- rally state machine ---------------------------------------------------

# Shot log entry: (player, direction, depth or None, Outcome)
ShotLogEntry = Tuple[str, int, Optional[int], Outcome]


@dataclass(slots=True)
class RallyState:
    """One point's shot-by-shot progression. Value semantics, do not mutate."""

    rally_server: str
    serve_number: ServeNumber
    side: Side
    hitter: str
    previous_direction: Optional[int]
    shot_count: int
    shot_log: Tuple[ShotLogEntry, ...]
    finished: bool = False


@dataclass(frozen=True, slots=True)
class SecondServe:
    """First serve faulted; the server gets a second attempt."""


@dataclass(frozen=True, slots=True)
class PointWon:
    player: str


@dataclass(frozen=True, slots=True)
class Continue:
    """Rally goes on; ``context`` is the next hitter's lookup key."""

    context: HitterContext
    hitter: str


RallyEvent = Union[SecondServe, PointWon, Continue]


def start_rally(server: str, side: Side) -> RallyState:
    return RallyState(server, ServeNumber.FIRST, side, server, None, 0, ())


def current_context(rally: RallyState) -> HitterContext:
    """The probability-lookup context for the player about to hit."""
    if rally.finished:
        raise IllegalShotError("rally is over")
    if rally.shot_count == 0:
        return serve_context(rally.side, rally.serve_number)
    if rally.shot_count == 1:
        return return_context(rally.side, rally.serve_number, rally.previous_direction)
    return rally_context(
        rally.hitter == rally.rally_server, rally.serve_number, rally.previous_direction
    )


def rally_length(rally: RallyState) -> int:
    """Shots in the rally, faults excluded. An ace is 1, a double fault 0."""
    return rally.shot_count


def advance_rally(rally: RallyState, direction: int, outcome: Outcome) -> Tuple[RallyState, RallyEvent]:
    """Apply one shot and return the successor state plus what happened.

    Serving phase (no shot in play yet): a first-serve error yields a
    ``SecondServe`` reset, a second-serve error is a double fault and loses
    the point, a winner is an ace. In-play serves hand the rally to the
    returner. Rally phase: errors lose the point, winners take it, in-play
    shots flip the hitter.
    """
    if rally.finished:
        raise IllegalShotError("cannot advance a finished rally")
    hitter = rally.hitter
    if rally.shot_count == 0:
        if not is_serve_code(direction):
            raise IllegalShotError(f"serve phase needs a direction 4-6, got {direction}")
        log = rally.shot_log + ((hitter, direction, None, outcome),)
        if outcome is Outcome.ERROR:
            if rally.serve_number is ServeNumber.FIRST:
                state = RallyState(
                    rally.rally_server, ServeNumber.SECOND, rally.side, hitter, None, 0, log
                )
                return state, SecondServe()
            state = RallyState(
                rally.rally_server, rally.serve_number, rally.side, hitter, None, 0, log, True
            )
            return state, PointWon(other(rally.rally_server))
        if outcome is Outcome.WINNER:
            state = RallyState(
                rally.rally_server, rally.serve_number, rally.side, hitter, direction, 1, log, True
            )
            return state, PointWon(rally.rally_server)
        returner = other(rally.rally_server)
        state = RallyState(
            rally.rally_server, rally.serve_number, rally.side, returner, direction, 1, log
        )
        return state, Continue(
            return_context(rally.side, rally.serve_number, direction), returner
        )

    if not is_rally_code(direction):
        raise IllegalShotError(f"rally phase needs a direction 1-3, got {direction}")
    log = rally.shot_log + ((hitter, direction, None, outcome),)
    count = rally.shot_count + 1
    if outcome is Outcome.ERROR:
        state = RallyState(
            rally.rally_server, rally.serve_number, rally.side, hitter, direction, count, log, True
        )
        return state, PointWon(other(hitter))
    if outcome is Outcome.WINNER:
        state = RallyState(
            rally.rally_server, rally.serve_number, rally.side, hitter, direction, count, log, True
        )
        return state, PointWon(hitter)
    nxt = other(hitter)
    state = RallyState(
        rally.rally_server, rally.serve_number, rally.side, nxt, direction, count, log
    )
    return state, Continue(
        rally_context(nxt == rally.rally_server, rally.serve_number, direction), nxt
    )
