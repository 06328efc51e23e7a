"""Point, match, and batch orchestration between two agents.

A batch derives every match's rng stream from (master_seed, match index)
with a SplitMix64-style mix, so records are identical at any parallelism
degree and changing one match's index perturbs only that match. Records
serialize to JSON lines (one match per line) with deterministic key order;
floats survive the round trip bit for bit.
"""

from __future__ import annotations

import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

from .agents import Agent, AgentSpec, build_agent, describe_agent
from .rules import (
    MatchConfig,
    MatchScore,
    PLAYER_A,
    PLAYER_B,
    PLAYERS,
    PointWon,
    SecondServe,
    advance_rally,
    apply_point,
    current_context,
    match_winner,
    new_match,
    other,
    render_score,
    serve_side,
    start_rally,
)
from .shots import (
    ALL_CONTEXTS,
    Outcome,
    SkillProfile,
    context_key,
    sample_outcome,
    supported_directions,
)


class HarnessError(Exception):
    pass


# --- seed splitting ----------------------------------------------------------

_MASK64 = (1 << 64) - 1
# SplitMix64 constants: golden-ratio increment and the two finalizer
# multipliers (Steele, Lea & Flood's splittable stream construction).
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def split_seed(master_seed: int, index: int) -> int:
    """Independent 64-bit seed for one match of a batch.

    SplitMix64 finalizer applied to master + (index + 1) steps of the
    golden-ratio increment; nearby indices give uncorrelated streams.
    """
    z = (master_seed + (index + 1) * _GOLDEN) & _MASK64
    z ^= z >> 30
    z = (z * _MIX1) & _MASK64
    z ^= z >> 27
    z = (z * _MIX2) & _MASK64
    z ^= z >> 31
    return z


# --- records -----------------------------------------------------------------

RECORD_SCHEMA_VERSION = "1"

_CTX_KEY = {ctx: context_key(ctx) for ctx in ALL_CONTEXTS}
_OUTCOME_FROM_KEY = {o.key: o for o in Outcome}


@dataclass(frozen=True, slots=True)
class ShotRecord:
    hitter: str
    context: str  # context key string, see shots.context_key
    direction: int
    depth: Optional[int]
    outcome: Outcome


@dataclass(frozen=True, slots=True)
class PointRecord:
    score_before: str
    rally_server: str
    serve_numbers: Tuple[str, ...]  # ("first",) or ("first", "second")
    shots: Tuple[ShotRecord, ...]
    rally_length: int
    point_winner: str
    capped: bool = False


@dataclass(frozen=True, slots=True)
class MatchRecord:
    match_seed: int
    agent_a: dict
    agent_b: dict
    first_server: str
    final_score: str
    winner: str
    match_config: MatchConfig
    points: Tuple[PointRecord, ...]


@dataclass(frozen=True, eq=False)
class BatchConfig:
    n_matches: int
    master_seed: int
    match_config: MatchConfig
    agent_a: AgentSpec
    agent_b: AgentSpec
    alternate_first_server: bool = True
    parallelism: int = 1

    def __post_init__(self) -> None:
        if self.n_matches <= 0:
            raise HarnessError("n_matches must be positive")
        if self.parallelism < 1:
            raise HarnessError("parallelism must be >= 1")


def first_server_for(batch: BatchConfig, index: int) -> str:
    """A serves first in even-indexed matches; B in odd, when alternating."""
    if batch.alternate_first_server and index % 2 == 1:
        return PLAYER_B
    return PLAYER_A


# --- play --------------------------------------------------------------------


def play_point(
    score: MatchScore,
    agents: Dict[str, Agent],
    profiles: Dict[str, SkillProfile],
    rng: random.Random,
) -> Tuple[PointRecord, str]:
    """Run one point from the given score; returns its record and winner.

    Each turn asks the hitter's agent for a direction among the codes its
    outcome profile supports, then samples the outcome from that profile.
    A rally hitting the config's shot cap is scored against the player who
    would hit next.
    """
    server = score.server
    rally = start_rally(server, serve_side(score))
    cap = score.config.rally_shot_cap
    score_before = render_score(score)
    serve_numbers = ["first"]
    shots: List[ShotRecord] = []
    capped = False
    while True:
        if rally.shot_count >= cap:
            winner = other(rally.hitter)
            capped = True
            break
        hitter = rally.hitter
        ctx = current_context(rally)
        profile = profiles[hitter]
        legal = supported_directions(profile, ctx)
        direction = agents[hitter].choose(rally, ctx, legal, rng)
        outcome = sample_outcome(profile, ctx, direction, rng)
        rally, event = advance_rally(rally, direction, outcome)
        shots.append(ShotRecord(hitter, _CTX_KEY[ctx], direction, None, outcome))
        if isinstance(event, SecondServe):
            serve_numbers.append("second")
        elif isinstance(event, PointWon):
            winner = event.player
            break
    record = PointRecord(
        score_before=score_before,
        rally_server=server,
        serve_numbers=tuple(serve_numbers),
        shots=tuple(shots),
        rally_length=rally.shot_count,
        point_winner=winner,
        capped=capped,
    )
    return record, winner


def play_match(
    match_config: MatchConfig,
    spec_a: AgentSpec,
    spec_b: AgentSpec,
    seed: int,
    first_server: str = PLAYER_A,
) -> MatchRecord:
    """Play one full match; the rng stream derives solely from ``seed``."""
    rng = random.Random(seed)
    agent_a, profile_a = build_agent(spec_a)
    agent_b, profile_b = build_agent(spec_b)
    agents = {PLAYER_A: agent_a, PLAYER_B: agent_b}
    profiles = {PLAYER_A: profile_a, PLAYER_B: profile_b}
    score = new_match(match_config, first_server)
    points: List[PointRecord] = []
    while score.completed is None:
        record, winner = play_point(score, agents, profiles, rng)
        points.append(record)
        score = apply_point(score, winner)
    return MatchRecord(
        match_seed=seed,
        agent_a=describe_agent(spec_a),
        agent_b=describe_agent(spec_b),
        first_server=first_server,
        final_score=render_score(score),
        winner=match_winner(score),
        match_config=match_config,
        points=tuple(points),
    )


def replay_final_score(record: MatchRecord) -> str:
    """Re-derive the final score from the point winners alone."""
    score = new_match(record.match_config, record.first_server)
    for point in record.points:
        score = apply_point(score, point.point_winner)
    return render_score(score)


# --- batches -----------------------------------------------------------------

_WORKER_BATCH: Optional[BatchConfig] = None


def _init_worker(batch: BatchConfig) -> None:
    global _WORKER_BATCH
    _WORKER_BATCH = batch


def _run_index(index: int) -> MatchRecord:
    batch = _WORKER_BATCH
    return play_match(
        batch.match_config,
        batch.agent_a,
        batch.agent_b,
        split_seed(batch.master_seed, index),
        first_server_for(batch, index),
    )


def _run_index_local(batch: BatchConfig, index: int) -> MatchRecord:
    return play_match(
        batch.match_config,
        batch.agent_a,
        batch.agent_b,
        split_seed(batch.master_seed, index),
        first_server_for(batch, index),
    )


@dataclass
class BatchSummary:
    """Win-rate accounting for one batch, with 95% confidence intervals.

    Rates are Wilson-score intervals on the binomial counts. Match rates
    are over completed matches; point rates over all recorded points.
    ``failed_indices`` is non-empty only when the batch aborted early, in
    which case records cover the indices before the failure.
    """

    n_matches: int
    completed: int
    failed_indices: Tuple[int, ...]
    match_wins: Dict[str, int]
    match_win_rate: Dict[str, float]
    match_win_ci: Dict[str, Tuple[float, float]]
    point_wins: Dict[str, int]
    point_win_rate: Dict[str, float]
    point_win_ci: Dict[str, Tuple[float, float]]
    total_points: int
    rally_cap_hits: int


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> Tuple[float, float]:
    """95% (by default) Wilson score interval for a binomial proportion."""
    if trials < 0 or successes < 0 or successes > trials:
        raise ValueError("need 0 <= successes <= trials")
    if trials == 0:
        return (0.0, 1.0)
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def summarize_batch(
    records: Iterable[MatchRecord],
    n_matches: int,
    failed_indices: Tuple[int, ...] = (),
) -> BatchSummary:
    match_wins = {PLAYER_A: 0, PLAYER_B: 0}
    point_wins = {PLAYER_A: 0, PLAYER_B: 0}
    cap_hits = 0
    completed = 0
    for record in records:
        completed += 1
        match_wins[record.winner] += 1
        for point in record.points:
            point_wins[point.point_winner] += 1
            if point.capped:
                cap_hits += 1
    total_points = point_wins[PLAYER_A] + point_wins[PLAYER_B]
    match_rate = {}
    match_ci = {}
    point_rate = {}
    point_ci = {}
    for player in PLAYERS:
        match_rate[player] = match_wins[player] / completed if completed else 0.0
        match_ci[player] = wilson_interval(match_wins[player], completed)
        point_rate[player] = point_wins[player] / total_points if total_points else 0.0
        point_ci[player] = wilson_interval(point_wins[player], total_points)
    return BatchSummary(
        n_matches=n_matches,
        completed=completed,
        failed_indices=tuple(failed_indices),
        match_wins=match_wins,
        match_win_rate=match_rate,
        match_win_ci=match_ci,
        point_wins=point_wins,
        point_win_rate=point_rate,
        point_win_ci=point_ci,
        total_points=total_points,
        rally_cap_hits=cap_hits,
    )


def run_batch(batch: BatchConfig) -> Tuple[List[MatchRecord], BatchSummary]:
    """Play all matches of a batch, serially or across processes.

    Outputs are a pure function of the batch config: the per-match seed
    and first server depend only on the match index, so any parallelism
    degree produces the same records in the same order. If a match raises,
    the batch stops, matches before the failure are kept, and the summary
    lists the failed index.
    """
    records: List[MatchRecord] = []
    failed: Tuple[int, ...] = ()
    if batch.parallelism == 1:
        for index in range(batch.n_matches):
            try:
                records.append(_run_index_local(batch, index))
            except Exception:
                failed = (index,)
                break
    else:
        executor = ProcessPoolExecutor(
            max_workers=batch.parallelism,
            initializer=_init_worker,
            initargs=(batch,),
        )
        try:
            chunk = max(1, batch.n_matches // (batch.parallelism * 8))
            results = executor.map(_run_index, range(batch.n_matches), chunksize=chunk)
            index = 0
            try:
                for record in results:
                    records.append(record)
                    index += 1
            except Exception:
                failed = (index,)
        finally:
            executor.shutdown(wait=False, cancel_futures=True)
    return records, summarize_batch(records, batch.n_matches, failed)


# --- serialization -----------------------------------------------------------


def match_config_to_json(config: MatchConfig) -> dict:
    return {
        "sets_to_win": config.sets_to_win,
        "games_per_set": config.games_per_set,
        "tiebreak_at": config.tiebreak_at,
        "tiebreak_points": config.tiebreak_points,
        "advantage_scoring": config.advantage_scoring,
        "rally_shot_cap": config.rally_shot_cap,
    }


def match_config_from_json(doc: dict) -> MatchConfig:
    base = MatchConfig()
    raw_tiebreak_at = doc.get("tiebreak_at", base.tiebreak_at)
    return MatchConfig(
        sets_to_win=int(doc.get("sets_to_win", base.sets_to_win)),
        games_per_set=int(doc.get("games_per_set", base.games_per_set)),
        tiebreak_at=None if raw_tiebreak_at is None else int(raw_tiebreak_at),
        tiebreak_points=int(doc.get("tiebreak_points", base.tiebreak_points)),
        advantage_scoring=bool(doc.get("advantage_scoring", base.advantage_scoring)),
        rally_shot_cap=int(doc.get("rally_shot_cap", base.rally_shot_cap)),
    )


def _shot_to_json(shot: ShotRecord) -> dict:
    doc = {
        "hitter": shot.hitter,
        "context": shot.context,
        "direction": shot.direction,
        "outcome": shot.outcome.key,
    }
    if shot.depth is not None:
        doc["depth"] = shot.depth
    return doc


def _point_to_json(point: PointRecord) -> dict:
    return {
        "score_before": point.score_before,
        "rally_server": point.rally_server,
        "serve_numbers": list(point.serve_numbers),
        "shots": [_shot_to_json(s) for s in point.shots],
        "rally_length": point.rally_length,
        "point_winner": point.point_winner,
        "capped": point.capped,
    }


def match_to_json(record: MatchRecord) -> dict:
    return {
        "schema_version": RECORD_SCHEMA_VERSION,
        "match_seed": record.match_seed,
        "agent_a": record.agent_a,
        "agent_b": record.agent_b,
        "first_server": record.first_server,
        "final_score": record.final_score,
        "winner": record.winner,
        "match_config": match_config_to_json(record.match_config),
        "points": [_point_to_json(p) for p in record.points],
    }


def match_record_to_line(record: MatchRecord) -> str:
    return json.dumps(match_to_json(record), sort_keys=True, separators=(",", ":"))


def match_from_json(doc: dict) -> MatchRecord:
    if doc.get("schema_version") != RECORD_SCHEMA_VERSION:
        raise HarnessError(
            f"unsupported record schema_version {doc.get('schema_version')!r}"
        )
    points = []
    for p in doc["points"]:
        shots = tuple(
            ShotRecord(
                hitter=s["hitter"],
                context=s["context"],
                direction=int(s["direction"]),
                depth=s.get("depth"),
                outcome=_OUTCOME_FROM_KEY[s["outcome"]],
            )
            for s in p["shots"]
        )
        points.append(
            PointRecord(
                score_before=p["score_before"],
                rally_server=p["rally_server"],
                serve_numbers=tuple(p["serve_numbers"]),
                shots=shots,
                rally_length=int(p["rally_length"]),
                point_winner=p["point_winner"],
                capped=bool(p.get("capped", False)),
            )
        )
    return MatchRecord(
        match_seed=int(doc["match_seed"]),
        agent_a=dict(doc["agent_a"]),
        agent_b=dict(doc["agent_b"]),
        first_server=doc["first_server"],
        final_score=doc["final_score"],
        winner=doc["winner"],
        match_config=match_config_from_json(doc.get("match_config", {})),
        points=tuple(points),
    )


def write_match_records(records: Iterable[MatchRecord], path: Union[str, Path]) -> None:
    """One compact JSON object per line, key-sorted for byte determinism."""
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(match_record_to_line(record))
            handle.write("\n")


def iter_match_records(path: Union[str, Path]) -> Iterator[MatchRecord]:
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise HarnessError(f"line {line_no}: not valid JSON ({exc})") from None
            yield match_from_json(doc)


def read_match_records(path: Union[str, Path]) -> List[MatchRecord]:
    return list(iter_match_records(path))


def summary_to_json(summary: BatchSummary) -> dict:
    def side(player: str) -> dict:
        return {
            "match_wins": summary.match_wins[player],
            "match_win_rate": summary.match_win_rate[player],
            "match_win_ci95": list(summary.match_win_ci[player]),
            "point_wins": summary.point_wins[player],
            "point_win_rate": summary.point_win_rate[player],
            "point_win_ci95": list(summary.point_win_ci[player]),
        }

    return {
        "schema_version": RECORD_SCHEMA_VERSION,
        "n_matches": summary.n_matches,
        "completed": summary.completed,
        "failed_indices": list(summary.failed_indices),
        "players": {PLAYER_A: side(PLAYER_A), PLAYER_B: side(PLAYER_B)},
        "total_points": summary.total_points,
        "rally_cap_hits": summary.rally_cap_hits,
    }


def write_batch_summary(summary: BatchSummary, path: Union[str, Path]) -> None:
    Path(path).write_text(
        json.dumps(summary_to_json(summary), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
