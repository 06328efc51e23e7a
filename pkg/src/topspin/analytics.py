"""Evaluation artifacts computed from match records.

Four report families: rally-length histograms, win-rate summaries with the
point-to-match amplification visible, serve-scenario shot patterns, and
parameter-sweep tables. All are pure functions over MatchRecords; every
report also ships as flat CSV and JSON for external plotting.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from .harness import BatchSummary, MatchRecord, wilson_interval
from .rules import PLAYER_A, PLAYER_B, PLAYERS


class AnalyticsError(Exception):
    pass


# --- rally-length histogram --------------------------------------------------

HISTOGRAM_MAX = 16  # individual bins 1..16, longer rallies pool in overflow
OVERFLOW_BIN = "17+"

BinKey = Union[int, str]

HISTOGRAM_BIN_ORDER: Tuple[BinKey, ...] = tuple(range(1, HISTOGRAM_MAX + 1)) + (OVERFLOW_BIN,)


@dataclass(frozen=True)
class Histogram:
    """Rally-length distribution in percentages.

    A point's rally length excludes faults, so an ace is 1 and a double
    fault 0; double faults fall outside the 1+ bins and are reported via
    ``zero_length_excluded`` instead of a bin.
    """

    bins: Dict[BinKey, float]  # percentage per bin, sums to 100
    counts: Dict[BinKey, int]
    total_count: int
    zero_length_excluded: int = 0


def rally_length_distribution(records: Iterable[MatchRecord]) -> Histogram:
    """Percentage of points at each rally length across all records."""
    counts: Dict[BinKey, int] = {key: 0 for key in HISTOGRAM_BIN_ORDER}
    zero_excluded = 0
    for record in records:
        for point in record.points:
            length = point.rally_length
            if length <= 0:
                zero_excluded += 1
            elif length <= HISTOGRAM_MAX:
                counts[length] += 1
            else:
                counts[OVERFLOW_BIN] += 1
    total = sum(counts.values())
    if total == 0:
        raise AnalyticsError("no points with rally length >= 1 to distribute")
    bins = {key: 100.0 * counts[key] / total for key in HISTOGRAM_BIN_ORDER}
    return Histogram(bins=bins, counts=counts, total_count=total, zero_length_excluded=zero_excluded)


def histogram_from_percentages(pairs: Dict[BinKey, float], total_count: int = 0) -> Histogram:
    """Histogram from published percentage coordinates, for comparisons.

    Missing bins read as 0. Counts are unknown for external curves, so the
    count table is zeroed unless a total is supplied for reconstruction.
    """
    bins = {key: float(pairs.get(key, 0.0)) for key in HISTOGRAM_BIN_ORDER}
    counts = {key: 0 for key in HISTOGRAM_BIN_ORDER}
    return Histogram(bins=bins, counts=counts, total_count=total_count)


def histogram_distance(h1: Histogram, h2: Histogram) -> Tuple[float, Tuple[BinKey, float]]:
    """(L1 distance in percentage points, (bin with the largest gap, gap)).

    Ties on the largest gap resolve to the earliest bin in display order.
    """
    if set(h1.bins) != set(h2.bins):
        raise AnalyticsError("histograms use different binnings")
    l1 = 0.0
    worst_bin: BinKey = HISTOGRAM_BIN_ORDER[0]
    worst_gap = -1.0
    for key in HISTOGRAM_BIN_ORDER:
        gap = abs(h1.bins[key] - h2.bins[key])
        l1 += gap
        if gap > worst_gap:
            worst_gap = gap
            worst_bin = key
    return l1, (worst_bin, worst_gap)


# --- win summary -------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class SideSummary:
    player: str
    matches: int
    match_wins: int
    match_win_pct: float
    match_ci95_pct: Tuple[float, float]
    points: int
    point_wins: int
    point_win_pct: float
    point_ci95_pct: Tuple[float, float]


def win_summary(records: Sequence[MatchRecord]) -> Dict[str, SideSummary]:
    """Match- and point-win percentages per side, with Wilson 95% CIs.

    Every match and every point has a winner, so the two sides' rates are
    complements summing to 100 in each category.
    """
    if not records:
        raise AnalyticsError("win_summary needs at least one match record")
    match_wins = {PLAYER_A: 0, PLAYER_B: 0}
    point_wins = {PLAYER_A: 0, PLAYER_B: 0}
    for record in records:
        match_wins[record.winner] += 1
        for point in record.points:
            point_wins[point.point_winner] += 1
    matches = len(records)
    points = point_wins[PLAYER_A] + point_wins[PLAYER_B]
    out: Dict[str, SideSummary] = {}
    for player in PLAYERS:
        m_lo, m_hi = wilson_interval(match_wins[player], matches)
        p_lo, p_hi = wilson_interval(point_wins[player], points)
        out[player] = SideSummary(
            player=player,
            matches=matches,
            match_wins=match_wins[player],
            match_win_pct=100.0 * match_wins[player] / matches,
            match_ci95_pct=(100.0 * m_lo, 100.0 * m_hi),
            points=points,
            point_wins=point_wins[player],
            point_win_pct=100.0 * point_wins[player] / points if points else 0.0,
            point_ci95_pct=(100.0 * p_lo, 100.0 * p_hi),
        )
    return out


# --- serve-scenario shot patterns ---------------------------------------------

SCENARIOS: Tuple[Tuple[str, str], ...] = (
    ("deuce", "first"),
    ("deuce", "second"),
    ("advantage", "first"),
    ("advantage", "second"),
)


@dataclass(frozen=True, slots=True)
class ShotPattern:
    """One ranked direction prefix for a serve scenario.

    ``directions`` holds the in-play serve direction followed by up to two
    rally directions (the return and the server's third shot). Points that
    end earlier contribute their shorter prefix as its own pattern; a
    double fault contributes just the failed second-serve direction.
    """

    side: str
    serve_number: str
    directions: Tuple[int, ...]
    frequency: int
    point_win_rate: float  # percent of these points the serving agent won


def scenario_key(side: str, serve_number: str) -> str:
    return f"{side}:{serve_number}"


def top_patterns(
    records: Iterable[MatchRecord], agent: str, k: int
) -> Dict[str, List[ShotPattern]]:
    """The k most frequent opening direction prefixes per serve scenario.

    Scenarios split points the agent served by court side and by the serve
    number that decided the point. Ranking is by frequency, then by
    direction tuple for determinism; win rates are reported, not ranked on.
    """
    if k < 1:
        raise AnalyticsError("k must be >= 1")
    if agent not in PLAYERS:
        raise AnalyticsError(f"unknown player id {agent!r}")
    tallies: Dict[Tuple[str, str], Dict[Tuple[int, ...], List[int]]] = {
        scenario: {} for scenario in SCENARIOS
    }
    seen_any = False
    for record in records:
        seen_any = True
        for point in record.points:
            if point.rally_server != agent or not point.shots:
                continue
            side = point.shots[0].context.split(":")[1]
            serve_number = point.serve_numbers[-1]
            first = len(point.serve_numbers) - 1
            if first >= len(point.shots):
                continue
            prefix = tuple(s.direction for s in point.shots[first : first + 3])
            bucket = tallies[(side, serve_number)].setdefault(prefix, [0, 0])
            bucket[0] += 1
            if point.point_winner == agent:
                bucket[1] += 1
    if not seen_any:
        raise AnalyticsError("top_patterns needs at least one match record")
    out: Dict[str, List[ShotPattern]] = {}
    for side, serve_number in SCENARIOS:
        buckets = tallies[(side, serve_number)]
        ranked = sorted(buckets.items(), key=lambda item: (-item[1][0], item[0]))
        out[scenario_key(side, serve_number)] = [
            ShotPattern(
                side=side,
                serve_number=serve_number,
                directions=prefix,
                frequency=freq,
                point_win_rate=100.0 * wins / freq,
            )
            for prefix, (freq, wins) in ranked[:k]
        ]
    return out


# --- parameter sweeps ----------------------------------------------------------


@dataclass(frozen=True, slots=True)
class SweepRow:
    label: str
    point_win_pct: float
    match_win_pct: float


def sweep_report(
    batches: Sequence[Tuple[str, BatchSummary]], player: str = PLAYER_A
) -> List[SweepRow]:
    """One row per labeled batch with the player's point/match win percent."""
    if not batches:
        raise AnalyticsError("sweep_report needs at least one batch")
    rows = []
    for label, summary in batches:
        rows.append(
            SweepRow(
                label=label,
                point_win_pct=100.0 * summary.point_win_rate[player],
                match_win_pct=100.0 * summary.match_win_rate[player],
            )
        )
    return rows


# --- emitters ------------------------------------------------------------------


def _write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def write_histogram_csv(histogram: Histogram, path: Union[str, Path]) -> None:
    _write_csv(
        path,
        ("rally_length", "count", "percentage"),
        (
            (key, histogram.counts[key], f"{histogram.bins[key]:.6f}")
            for key in HISTOGRAM_BIN_ORDER
        ),
    )


def histogram_to_json_dict(histogram: Histogram) -> dict:
    return {
        "schema_version": "1",
        "bins": [
            {
                "rally_length": key,
                "count": histogram.counts[key],
                "percentage": histogram.bins[key],
            }
            for key in HISTOGRAM_BIN_ORDER
        ],
        "total_count": histogram.total_count,
        "zero_length_excluded": histogram.zero_length_excluded,
    }


def write_win_summary_csv(summary: Dict[str, SideSummary], path: Union[str, Path]) -> None:
    header = (
        "player",
        "matches",
        "match_wins",
        "match_win_pct",
        "match_ci95_low_pct",
        "match_ci95_high_pct",
        "points",
        "point_wins",
        "point_win_pct",
        "point_ci95_low_pct",
        "point_ci95_high_pct",
    )
    rows = []
    for player in PLAYERS:
        side = summary[player]
        rows.append(
            (
                side.player,
                side.matches,
                side.match_wins,
                f"{side.match_win_pct:.4f}",
                f"{side.match_ci95_pct[0]:.4f}",
                f"{side.match_ci95_pct[1]:.4f}",
                side.points,
                side.point_wins,
                f"{side.point_win_pct:.4f}",
                f"{side.point_ci95_pct[0]:.4f}",
                f"{side.point_ci95_pct[1]:.4f}",
            )
        )
    _write_csv(path, header, rows)


def win_summary_to_json_dict(summary: Dict[str, SideSummary]) -> dict:
    def side(player: str) -> dict:
        s = summary[player]
        return {
            "matches": s.matches,
            "match_wins": s.match_wins,
            "match_win_pct": s.match_win_pct,
            "match_ci95_pct": list(s.match_ci95_pct),
            "points": s.points,
            "point_wins": s.point_wins,
            "point_win_pct": s.point_win_pct,
            "point_ci95_pct": list(s.point_ci95_pct),
        }

    return {
        "schema_version": "1",
        "players": {player: side(player) for player in PLAYERS},
    }


def write_patterns_csv(patterns: Dict[str, List[ShotPattern]], path: Union[str, Path]) -> None:
    rows = []
    for side, serve_number in SCENARIOS:
        for rank, pattern in enumerate(patterns.get(scenario_key(side, serve_number), ()), start=1):
            rows.append(
                (
                    side,
                    serve_number,
                    rank,
                    "-".join(str(d) for d in pattern.directions),
                    pattern.frequency,
                    f"{pattern.point_win_rate:.4f}",
                )
            )
    _write_csv(
        path,
        ("side", "serve_number", "rank", "directions", "frequency", "point_win_pct"),
        rows,
    )


def patterns_to_json_dict(patterns: Dict[str, List[ShotPattern]]) -> dict:
    return {
        "schema_version": "1",
        "scenarios": {
            scenario_key(side, number): [
                {
                    "directions": list(p.directions),
                    "frequency": p.frequency,
                    "point_win_pct": p.point_win_rate,
                }
                for p in patterns.get(scenario_key(side, number), ())
            ]
            for side, number in SCENARIOS
        },
    }


def write_sweep_csv(rows: Sequence[SweepRow], path: Union[str, Path]) -> None:
    _write_csv(
        path,
        ("label", "point_win_pct", "match_win_pct"),
        ((r.label, f"{r.point_win_pct:.4f}", f"{r.match_win_pct:.4f}") for r in rows),
    )


def sweep_to_json_dict(rows: Sequence[SweepRow]) -> dict:
    return {
        "schema_version": "1",
        "rows": [
            {
                "label": r.label,
                "point_win_pct": r.point_win_pct,
                "match_win_pct": r.match_win_pct,
            }
            for r in rows
        ],
    }


def write_json_report(doc: dict, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
