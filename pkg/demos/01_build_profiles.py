"""From charting rows to a validated skill profile.

Walks the full ingest path: parse one rally string shot by shot, classify
who hit what in which context, count a whole corpus, smooth the counts
into probability tables, and round-trip the result through JSON.
"""

from pathlib import Path

from topspin import (
    PlayerFilter,
    RallyRow,
    Side,
    Smoothing,
    classify_shots,
    context_key,
    finalize_profile,
    ingest_csv,
    load_profile,
    parse_row,
    profiles_equal,
    save_profile,
    validate_profile,
)

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "corpus.csv"
OUT_DIR = Path(__file__).resolve().parent / "out"

OUTCOME_NAMES = {0: "error", 1: "winner", 2: "in play"}


def walk_one_rally():
    print("== one rally, shot by shot ==")
    row = RallyRow(
        match_id="demo",
        server_name="Alice Ace",
        returner_name="Bella Baseline",
        side=Side.DEUCE,
        first_serve_string="4d",
        second_serve_string="5f28b1*",
    )
    print(f"first serve {row.first_serve_string!r} (fault), "
          f"second {row.second_serve_string!r}")
    for shot in classify_shots(parse_row(row), row):
        print(
            f"  {shot.hitter:<15} {context_key(shot.context):<28} "
            f"direction {shot.direction}  {OUTCOME_NAMES[shot.outcome]}"
        )
    print()


def build_from_corpus():
    print(f"== counting {CORPUS.name} ==")
    tables, report = ingest_csv(CORPUS)
    print(f"{report.rallies} rallies counted, {report.skipped} rows skipped")
    top_types = sorted(report.shot_type_histogram.items(), key=lambda kv: -kv[1])[:4]
    print("most common shot types:", ", ".join(f"{t}={n}" for t, n in top_types))

    # corpus-wide tables: every context is observed, so no smoothing needed
    field = finalize_profile(tables, Smoothing.laplace(1.0), provenance="field-average")
    print("field-average profile:", validate_profile(field))

    # a single player's own shots are sparser; Laplace fills the gaps
    alice_tables, alice_report = ingest_csv(
        CORPUS, player_filter=PlayerFilter(name="Alice Ace")
    )
    alice = finalize_profile(alice_tables, Smoothing.laplace(1.0), provenance="alice")
    print(f"Alice Ace: {alice_report.rallies} of her rallies ->", validate_profile(alice))

    ctx_key = "serve:deuce:first"
    grid = next(g for c, g in alice.tables.items() if context_key(c) == ctx_key)
    print(f"\nAlice's {ctx_key} table (rows = direction 4/5/6; error, winner, in play):")
    for code, row in zip((4, 5, 6), grid):
        cells = "  ".join(f"{x:.3f}" for x in row)
        print(f"  {code}: {cells}")
    print(f"  grid sum = {grid.sum():.9f}")
    return alice


def round_trip(profile):
    print("\n== JSON round trip ==")
    OUT_DIR.mkdir(exist_ok=True)
    path = OUT_DIR / "alice.json"
    save_profile(profile, path)
    again = load_profile(path)
    print(f"saved {path.name}, reloaded, tables identical: {profiles_equal(profile, again)}")


def main():
    walk_one_rally()
    profile = build_from_corpus()
    round_trip(profile)


if __name__ == "__main__":
    main()
