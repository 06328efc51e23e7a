"""What the tree search actually learns, and how its knobs move win rates.

First: on a rigged profile where exactly one serve direction is good, the
search's visit counts pile onto that direction. Then: a small sweep over
the exploration constant, playing search-guided serves against a plain
bot that samples its own tables.
"""

import math
import random

from topspin import (
    AgentKind,
    AgentSpec,
    BatchConfig,
    MCTSConfig,
    MatchConfig,
    Side,
    mcts_search,
    run_batch,
    start_rally,
    sweep_report,
)

from _common import baseline_profile, one_good_direction_profile


def rigged_profile_search():
    print("== search on a rigged profile ==")
    print("direction 5: winner 90% of the time; directions 4 and 6: error 90%\n")
    profile = one_good_direction_profile()
    config = MCTSConfig(
        self_model=profile,
        opponent_model=profile,
        iterations=500,
        exploration_c=math.sqrt(2),
    )
    root = mcts_search(start_rally("A", Side.DEUCE), config, random.Random(1))
    print("  serve  visits  mean reward")
    for direction in sorted(root.children):
        child = root.children[direction]
        print(f"    {direction}    {child.visits:>5}    {child.wins / child.visits:.3f}")
    best = max(root.children, key=lambda d: root.children[d].visits)
    print(f"  the search piles its {root.visits} iterations onto serve {best}\n")


def exploration_sweep():
    print("== exploration constant sweep (search agent vs plain bot) ==")
    base = baseline_profile()
    bot = AgentSpec(AgentKind.BOT, profile=base)
    short = MatchConfig(sets_to_win=1, games_per_set=3, tiebreak_at=3)
    labeled = []
    for c in (0.5, math.sqrt(2), 4.0):
        searcher = AgentSpec(
            AgentKind.MCTS,
            mcts=MCTSConfig(
                self_model=base,
                opponent_model=base,
                iterations=40,
                exploration_c=c,
                rollout_cap=30,
            ),
        )
        batch = BatchConfig(
            n_matches=30,
            master_seed=99,
            match_config=short,
            agent_a=searcher,
            agent_b=bot,
            alternate_first_server=True,
            parallelism=1,
        )
        _, summary = run_batch(batch)
        labeled.append((f"c={c:.2f}", summary))
    print("  30 short matches per setting, 40 iterations per decision")
    print("  label    point win   match win")
    for row in sweep_report(labeled):
        print(f"  {row.label:<8} {row.point_win_pct:6.1f}%    {row.match_win_pct:6.1f}%")
    print("\n  same seeds, same tables: rerunning any row reproduces it exactly")


def main():
    rigged_profile_search()
    exploration_sweep()


if __name__ == "__main__":
    main()
