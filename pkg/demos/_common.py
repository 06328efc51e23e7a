"""Small profile builders shared by the demo scripts."""

import numpy as np

from topspin import ALL_CONTEXTS, ReturnContext, ServeContext, SkillProfile


def joint_row(weights, outcomes):
    """9 joint cells from direction weights and per-direction (p_err, p_win)."""
    cells = []
    for w, (p_err, p_win) in zip(weights, outcomes):
        cells.extend([w * p_err, w * p_win, w * (1.0 - p_err - p_win)])
    return cells


def profile_from_rows(serve_row, return_row, rally_row, provenance):
    tables = {}
    for ctx in ALL_CONTEXTS:
        if isinstance(ctx, ServeContext):
            row = serve_row
        elif isinstance(ctx, ReturnContext):
            row = return_row
        else:
            row = rally_row
        tables[ctx] = np.asarray(row, dtype=float).reshape(3, 3)
    return SkillProfile(tables, provenance=provenance)


def baseline_profile(provenance="baseline"):
    """Tennis-shaped numbers: risky first deliveries, longer rallies."""
    return profile_from_rows(
        joint_row((0.45, 0.25, 0.30), [(0.30, 0.06)] * 3),
        joint_row((0.40, 0.35, 0.25), [(0.18, 0.03)] * 3),
        joint_row((0.38, 0.27, 0.35), [(0.14, 0.07)] * 3),
        provenance,
    )


def tilted_profile(base, delta, provenance="tilted"):
    """Move ``delta`` of each cell's error mass to winner mass."""
    tables = {}
    for ctx, grid in base.tables.items():
        g = grid.copy()
        moved = g[:, 0] * delta
        g[:, 0] -= moved
        g[:, 1] += moved
        tables[ctx] = g
    return SkillProfile(tables, provenance=provenance)


def one_good_direction_profile():
    """Middle direction almost always wins, the others almost always err."""
    row = joint_row((1 / 3, 1 / 3, 1 / 3), [(0.9, 0.0), (0.0, 0.9), (0.9, 0.0)])
    return profile_from_rows(row, row, row, "one-good-direction")
