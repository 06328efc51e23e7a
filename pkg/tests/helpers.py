"""Shared builders for the test suite: profiles, corpora, records."""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from topspin import (
    ALL_CONTEXTS,
    MatchConfig,
    MatchRecord,
    Outcome,
    PointRecord,
    ReturnContext,
    ServeContext,
    ShotRecord,
    SkillProfile,
)


def joint_row(weights: Sequence[float], outcomes: Sequence[Tuple[float, float]]) -> List[float]:
    """9 joint cells from direction weights and per-direction (p_err, p_win)."""
    cells: List[float] = []
    for w, (p_err, p_win) in zip(weights, outcomes):
        cells.extend([w * p_err, w * p_win, w * (1.0 - p_err - p_win)])
    return cells


def build_profile(
    serve_cells: Sequence[float],
    return_cells: Optional[Sequence[float]] = None,
    rally_cells: Optional[Sequence[float]] = None,
    provenance: str = "test",
) -> SkillProfile:
    """Profile with one 9-cell row per context family."""
    if return_cells is None:
        return_cells = serve_cells
    if rally_cells is None:
        rally_cells = return_cells
    tables: Dict = {}
    for ctx in ALL_CONTEXTS:
        if isinstance(ctx, ServeContext):
            cells = serve_cells
        elif isinstance(ctx, ReturnContext):
            cells = return_cells
        else:
            cells = rally_cells
        tables[ctx] = np.asarray(cells, dtype=float).reshape(3, 3)
    return SkillProfile(tables, provenance=provenance)


def flat_profile(p_err: float, p_win: float, provenance: str = "flat") -> SkillProfile:
    """Uniform directions, identical outcome split in every context."""
    row = joint_row((1 / 3, 1 / 3, 1 / 3), [(p_err, p_win)] * 3)
    return build_profile(row, provenance=provenance)


def realistic_profile(provenance: str = "baseline") -> SkillProfile:
    """Tennis-shaped numbers: risky first deliveries, long-ish rallies."""
    serve = joint_row((0.45, 0.25, 0.30), [(0.30, 0.06)] * 3)
    ret = joint_row((0.40, 0.35, 0.25), [(0.18, 0.03)] * 3)
    rally = joint_row((0.38, 0.27, 0.35), [(0.14, 0.07)] * 3)
    return build_profile(serve, ret, rally, provenance=provenance)


def tilted_profile(base: SkillProfile, delta: float, provenance: str = "tilted") -> SkillProfile:
    """Shift ``delta`` of each cell's error mass to winner mass.

    Keeps every row sum at 1, so the tilt changes skill without touching
    the direction policy.
    """
    tables = {}
    for ctx, grid in base.tables.items():
        g = grid.copy()
        moved = g[:, 0] * delta
        g[:, 0] -= moved
        g[:, 1] += moved
        tables[ctx] = g
    return SkillProfile(tables, provenance=provenance)


def degenerate_middle_profile() -> SkillProfile:
    """Middle direction nearly always wins; the others nearly always err.

    Direction slot 2 (code 2 in rallies, 5 on serves): P(winner) = 0.9,
    P(in-play) = 0.1. Slots 1 and 3: P(error) = 0.9, P(in-play) = 0.1.
    Uniform direction marginal.
    """
    row = joint_row(
        (1 / 3, 1 / 3, 1 / 3),
        [(0.9, 0.0), (0.0, 0.9), (0.9, 0.0)],
    )
    return build_profile(row, provenance="degenerate-middle")


def all_in_play_profile() -> SkillProfile:
    """Every shot stays in play. Invalid on purpose (no terminal mass)."""
    row = joint_row((1 / 3, 1 / 3, 1 / 3), [(0.0, 0.0)] * 3)
    return build_profile(row, provenance="never-ends")


def make_point(
    rally_length: int,
    point_winner: str = "A",
    rally_server: str = "A",
    shots: Tuple[ShotRecord, ...] = (),
    serve_numbers: Tuple[str, ...] = ("first",),
    side: str = "deuce",
    capped: bool = False,
) -> PointRecord:
    if not shots and rally_length > 0:
        built = [
            ShotRecord(
                rally_server, f"serve:{side}:{serve_numbers[-1]}", 4, None, Outcome.IN_PLAY
            )
        ]
        hitter = "B" if rally_server == "A" else "A"
        for _ in range(rally_length - 1):
            built.append(ShotRecord(hitter, "rally:received:first:1", 1, None, Outcome.IN_PLAY))
            hitter = "B" if hitter == "A" else "A"
        built[-1] = ShotRecord(
            built[-1].hitter, built[-1].context, built[-1].direction, None, Outcome.WINNER
        )
        shots = tuple(built)
    return PointRecord(
        score_before="0-0 0-0",
        rally_server=rally_server,
        serve_numbers=serve_numbers,
        shots=shots,
        rally_length=rally_length,
        point_winner=point_winner,
        capped=capped,
    )


def make_match(
    points: Sequence[PointRecord],
    winner: str = "A",
    seed: int = 0,
    first_server: str = "A",
) -> MatchRecord:
    return MatchRecord(
        match_seed=seed,
        agent_a={"kind": "bot", "profile": "x"},
        agent_b={"kind": "bot", "profile": "y"},
        first_server=first_server,
        final_score="6-0 6-0",
        winner=winner,
        match_config=MatchConfig(),
        points=tuple(points),
    )
