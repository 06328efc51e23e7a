"""One full match between two table-driven bots, replayed exactly.

Shows the shape of a match record: the running score line before each
point, serve attempts, rally length, and the point winner; then proves
the record is a pure function of its seed by playing it again.
"""

from topspin import MatchConfig, play_match
from topspin import AgentKind, AgentSpec, match_to_json

from _common import baseline_profile, tilted_profile

SEED = 7


def describe_point(index, point):
    serves = "+".join(point.serve_numbers)
    directions = "-".join(str(s.direction) for s in point.shots)
    kind = ""
    if point.rally_length == 0:
        kind = " (double fault)"
    elif point.rally_length == 1:
        kind = " (ace)" if point.shots[-1].outcome.key == "winner" else ""
    print(
        f"  point {index + 1:>2}  at {point.score_before:<12} "
        f"{point.rally_server} serves ({serves}), shots {directions or '-'}, "
        f"{point.rally_length} in the count, {point.point_winner} wins{kind}"
    )


def main():
    base = baseline_profile()
    agent_a = AgentSpec(AgentKind.BOT, profile=tilted_profile(base, 0.08, "stronger"))
    agent_b = AgentSpec(AgentKind.BOT, profile=base)

    record = play_match(MatchConfig(), agent_a, agent_b, seed=SEED)
    print(f"A (slightly stronger tables) vs B, seed {SEED}")
    print(f"final score: {record.final_score}, winner: {record.winner}")
    print(f"{len(record.points)} points played\n")

    print("the first ten points:")
    for i, point in enumerate(record.points[:10]):
        describe_point(i, point)

    aces = sum(
        1
        for p in record.points
        if p.rally_length == 1 and p.shots[-1].outcome.key == "winner"
    )
    double_faults = sum(1 for p in record.points if p.rally_length == 0)
    longest = max(p.rally_length for p in record.points)
    print(f"\naces {aces}, double faults {double_faults}, longest rally {longest} shots")

    again = play_match(MatchConfig(), agent_a, agent_b, seed=SEED)
    print("replay with the same seed is identical:",
          match_to_json(record) == match_to_json(again))


if __name__ == "__main__":
    main()
