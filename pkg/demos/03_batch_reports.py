"""A seeded batch of matches and the reports mined from its records.

Runs 200 bot-vs-bot matches, prints win rates with their confidence
intervals, draws the rally-length distribution next to a reference curve,
and lists the most common serve-direction patterns for the stronger side.
"""

from topspin import AgentKind, AgentSpec, BatchConfig, MatchConfig, run_batch
from topspin import (
    histogram_distance,
    histogram_from_percentages,
    rally_length_distribution,
    top_patterns,
)
from topspin.analytics import HISTOGRAM_BIN_ORDER, scenario_key

from _common import baseline_profile, tilted_profile

# a published rally-length curve (percent per one-shot bin), for shape
# comparison against what the simulated records produce
REFERENCE_CURVE = {
    1: 10.02, 2: 18.02, 3: 16.62, 4: 12.57, 5: 9.99, 6: 7.34, 7: 5.58, 8: 4.31,
    9: 3.31, 10: 2.66, 11: 1.99, 12: 1.6, 13: 1.24, 14: 1.01, 15: 0.75, 16: 0.65,
}


def pct_ci(rate, ci):
    lo, hi = ci
    return f"{100 * rate:5.1f}%  (95% CI {100 * lo:.1f}-{100 * hi:.1f})"


def main():
    base = baseline_profile()
    batch = BatchConfig(
        n_matches=200,
        master_seed=42,
        match_config=MatchConfig(),
        agent_a=AgentSpec(AgentKind.BOT, profile=tilted_profile(base, 0.05, "stronger")),
        agent_b=AgentSpec(AgentKind.BOT, profile=base),
        alternate_first_server=True,
        parallelism=1,
    )
    records, summary = run_batch(batch)
    print(f"{summary.completed} matches, {summary.total_points} points\n")
    for player in ("A", "B"):
        print(
            f"  {player}: matches {pct_ci(summary.match_win_rate[player], summary.match_win_ci[player])}"
            f"   points {pct_ci(summary.point_win_rate[player], summary.point_win_ci[player])}"
        )

    hist = rally_length_distribution(records)
    print(f"\nrally lengths over {hist.total_count} rallies "
          f"({hist.zero_length_excluded} double faults excluded):")
    reference = histogram_from_percentages(REFERENCE_CURVE)
    print("  len  simulated        reference")
    for key in HISTOGRAM_BIN_ORDER:
        bar = "#" * round(hist.bins[key])
        print(f"  {str(key):>3}  {hist.bins[key]:5.1f} {bar:<20} {reference.bins[key]:5.1f}")
    l1, (worst_bin, gap) = histogram_distance(hist, reference)
    print(f"  L1 distance {l1:.1f}, largest gap {gap:.1f} points at length {worst_bin}")

    print("\nA's favorite plays on first serve, deuce side (direction codes):")
    patterns = top_patterns(records, "A", k=3)
    for rank, p in enumerate(patterns[scenario_key("deuce", "first")], start=1):
        plan = "-".join(str(d) for d in p.directions)
        print(f"  {rank}. serve {plan:<6} {p.frequency:>4} times, "
              f"won {p.point_win_rate:.1f}% of them")


if __name__ == "__main__":
    main()
