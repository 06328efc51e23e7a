"""Tests for rally-string parsing, counting, and profile building."""

import json
import random

import numpy as np
import pytest

from topspin import (
    ALL_CONTEXTS,
    CountTables,
    IngestError,
    Outcome,
    ParseError,
    PlayerFilter,
    ProfileBuildError,
    ProfileSchemaError,
    RallyRow,
    ServeNumber,
    Side,
    Smoothing,
    classify_shots,
    context_key,
    finalize_profile,
    ingest_corpus,
    ingest_csv,
    load_column_mapping,
    load_profile,
    merge_counts,
    parse_row,
    parse_rally_string,
    profile_from_rows,
    profiles_equal,
    rally_context,
    return_context,
    save_profile,
    serve_context,
    uniform_profile,
    validate_profile,
)
from topspin.ingest import (
    ServeAttempt,
    ServeTerminal,
    profile_from_json_dict,
    profile_to_json_dict,
    read_rally_rows,
    report_to_json_dict,
)


def row(first, second=None, server="S", returner="R", side=Side.DEUCE, match_id="m1"):
    return RallyRow(match_id, server, returner, side, first, second)


class TestParseServe:
    def test_ace(self):
        rally = parse_rally_string("6*", ServeNumber.FIRST)
        assert rally.serves == (ServeAttempt(6, ServeTerminal.ACE),)
        assert rally.shots == ()
        assert rally.rally_length == 1

    def test_serve_left_in_play(self):
        rally = parse_rally_string("4", ServeNumber.FIRST)
        assert rally.serves == (ServeAttempt(4, ServeTerminal.IN_PLAY),)
        assert rally.rally_length == 1

    @pytest.mark.parametrize("text", ["4n", "5w", "6d", "4x", "4nw#", "5d@", "6@", "4#"])
    def test_faults(self, text):
        rally = parse_rally_string(text, ServeNumber.FIRST)
        assert rally.serves[0].terminal is ServeTerminal.FAULT
        assert rally.shots == ()
        assert rally.rally_length == 0

    def test_fault_direction_preserved(self):
        rally = parse_rally_string("5w", ServeNumber.FIRST)
        assert rally.serves[0].direction == 5

    @pytest.mark.parametrize("text,offset", [("1f1", 0), ("7", 0), ("x4", 0), ("", 0), ("  ", 0)])
    def test_bad_serve_start(self, text, offset):
        with pytest.raises(ParseError) as err:
            parse_rally_string(text, ServeNumber.FIRST)
        assert err.value.offset == offset

    def test_trailing_after_fault(self):
        with pytest.raises(ParseError, match="trailing data after serve fault"):
            parse_rally_string("4nf1", ServeNumber.FIRST)

    def test_trailing_after_ace(self):
        with pytest.raises(ParseError, match="trailing data after ace"):
            parse_rally_string("6*f1", ServeNumber.FIRST)

    def test_error_location_on_winning_serve_rejected(self):
        with pytest.raises(ParseError, match="error location on a winner"):
            parse_rally_string("4n*", ServeNumber.FIRST)


class TestParseShots:
    def test_depth_and_winner(self):
        rally = parse_rally_string("4f18b3*", ServeNumber.FIRST)
        assert rally.serves[0].terminal is ServeTerminal.IN_PLAY
        f, b = rally.shots
        assert (f.shot_type, f.direction, f.depth, f.terminal) == ("f", 1, 8, Outcome.IN_PLAY)
        assert (b.shot_type, b.direction, b.depth, b.terminal) == ("b", 3, None, Outcome.WINNER)
        assert rally.rally_length == 3

    def test_error_with_location(self):
        rally = parse_rally_string("5f2n@", ServeNumber.FIRST)
        assert rally.shots[-1].terminal is Outcome.ERROR
        assert rally.rally_length == 2

    def test_location_letters_imply_error(self):
        rally = parse_rally_string("4b1w", ServeNumber.FIRST)
        assert rally.shots[-1].terminal is Outcome.ERROR

    def test_forced_and_unforced_collapse(self):
        for mark in ("@", "#"):
            rally = parse_rally_string(f"4f1{mark}", ServeNumber.FIRST)
            assert rally.shots[-1].terminal is Outcome.ERROR

    def test_special_shot_types(self):
        rally = parse_rally_string("4r2v1z3u2y1l3m2*", ServeNumber.FIRST)
        assert [s.shot_type for s in rally.shots] == ["r", "v", "z", "u", "y", "l", "m"]
        assert rally.shots[-1].terminal is Outcome.WINNER

    def test_unfinished_rally_parses(self):
        rally = parse_rally_string("4f1b2", ServeNumber.FIRST)
        assert all(s.terminal is Outcome.IN_PLAY for s in rally.shots)
        assert rally.rally_length == 3

    def test_shot_after_terminal_rejected(self):
        with pytest.raises(ParseError, match="shot after a terminal"):
            parse_rally_string("4f1*b2", ServeNumber.FIRST)
        with pytest.raises(ParseError, match="shot after a terminal"):
            parse_rally_string("4f1nb2", ServeNumber.FIRST)

    def test_unknown_character_offset(self):
        with pytest.raises(ParseError) as err:
            parse_rally_string("4f1!", ServeNumber.FIRST)
        assert err.value.offset == 3

    def test_missing_direction(self):
        with pytest.raises(ParseError) as err:
            parse_rally_string("4f", ServeNumber.FIRST)
        assert err.value.offset == 2

    def test_direction_out_of_range(self):
        with pytest.raises(ParseError) as err:
            parse_rally_string("4f5", ServeNumber.FIRST)
        assert err.value.offset == 2

    def test_bad_depth_digit(self):
        with pytest.raises(ParseError) as err:
            parse_rally_string("4f14", ServeNumber.FIRST)
        assert err.value.offset == 3

    def test_whitespace_stripped(self):
        rally = parse_rally_string("  6*  ", ServeNumber.FIRST)
        assert rally.serves[0].terminal is ServeTerminal.ACE


class TestParseRow:
    def test_plain_row(self):
        rally = parse_row(row("4f1*"))
        assert len(rally.serves) == 1
        assert len(rally.shots) == 1

    def test_fault_merges_second_serve(self):
        rally = parse_row(row("4n", "5b2@"))
        assert [a.terminal for a in rally.serves] == [ServeTerminal.FAULT, ServeTerminal.IN_PLAY]
        assert [a.direction for a in rally.serves] == [4, 5]
        assert rally.shots[0].shot_type == "b"
        assert rally.rally_length == 2

    def test_double_fault(self):
        rally = parse_row(row("4n", "5w"))
        assert [a.terminal for a in rally.serves] == [ServeTerminal.FAULT, ServeTerminal.FAULT]
        assert rally.shots == ()
        assert rally.rally_length == 0

    def test_second_string_without_fault_rejected(self):
        with pytest.raises(ParseError, match="second serve string"):
            parse_row(row("4f1*", "5"))

    def test_fault_without_second_string_rejected(self):
        with pytest.raises(ParseError, match="second serve string"):
            parse_row(row("4n"))


class TestClassify:
    def classify(self, r):
        return classify_shots(parse_row(r), r)

    def test_served_point_observations(self):
        shots = self.classify(row("4b2f1*"))
        assert [(s.hitter, context_key(s.context), s.direction, s.outcome) for s in shots] == [
            ("S", "serve:deuce:first", 4, Outcome.IN_PLAY),
            ("R", "return:deuce:first:4", 2, Outcome.IN_PLAY),
            ("S", "rally:served:first:2", 1, Outcome.WINNER),
        ]
        assert shots[0].shot_type is None
        assert shots[1].shot_type == "b"

    def test_hitters_alternate_through_long_rally(self):
        shots = self.classify(row("4f1b2f3b1*"))
        assert [s.hitter for s in shots] == ["S", "R", "S", "R", "S"]
        assert [context_key(s.context) for s in shots[1:]] == [
            "return:deuce:first:4",
            "rally:served:first:1",
            "rally:received:first:2",
            "rally:served:first:3",
        ]

    def test_double_fault_contributes_two_serve_errors(self):
        shots = self.classify(row("4n", "5w", side=Side.ADVANTAGE))
        assert [(context_key(s.context), s.outcome) for s in shots] == [
            ("serve:advantage:first", Outcome.ERROR),
            ("serve:advantage:second", Outcome.ERROR),
        ]

    def test_second_serve_rally_contexts(self):
        shots = self.classify(row("6n", "4f1@"))
        assert [(s.hitter, context_key(s.context), s.outcome) for s in shots] == [
            ("S", "serve:deuce:first", Outcome.ERROR),
            ("S", "serve:deuce:second", Outcome.IN_PLAY),
            ("R", "return:deuce:second:4", Outcome.ERROR),
        ]

    def test_ace_is_single_observation(self):
        shots = self.classify(row("5*"))
        assert len(shots) == 1
        assert shots[0].outcome is Outcome.WINNER

    def test_advantage_side_propagates(self):
        shots = self.classify(row("4f1*", side=Side.ADVANTAGE))
        assert context_key(shots[1].context) == "return:advantage:first:4"


THREE_ROWS = [
    row("4f1*", server="Ann", returner="Bea"),
    row("6n", "4b2@", server="Ann", returner="Bea", side=Side.ADVANTAGE),
    row("5*", server="Bea", returner="Ann"),
]


class TestIngestCorpus:
    def test_hand_tallied_counts(self):
        tables, report = ingest_corpus(THREE_ROWS)
        assert tables.rally_count == 3
        assert tables.skipped_rallies == 0
        assert tables.total_observations() == 6

        deuce_first = tables.counts[serve_context(Side.DEUCE, ServeNumber.FIRST)]
        assert deuce_first[0, Outcome.IN_PLAY] == 1  # Ann's direction 4
        assert deuce_first[1, Outcome.WINNER] == 1  # Bea's ace, direction 5

        adv_first = tables.counts[serve_context(Side.ADVANTAGE, ServeNumber.FIRST)]
        assert adv_first[2, Outcome.ERROR] == 1  # fault at direction 6

        adv_second = tables.counts[serve_context(Side.ADVANTAGE, ServeNumber.SECOND)]
        assert adv_second[0, Outcome.IN_PLAY] == 1

        ret = tables.counts[return_context(Side.DEUCE, ServeNumber.FIRST, 4)]
        assert ret[0, Outcome.WINNER] == 1  # Bea's f1 winner

        ret2 = tables.counts[return_context(Side.ADVANTAGE, ServeNumber.SECOND, 4)]
        assert ret2[1, Outcome.ERROR] == 1  # Bea's b2 error

        assert report.rallies == 3
        assert report.shot_type_histogram == {"b": 1, "f": 1}
        assert report.player_share == {"Ann": 3, "Bea": 3}

    def test_conservation(self):
        tables, _ = ingest_corpus(THREE_ROWS)
        classified = sum(len(classify_shots(parse_row(r), r)) for r in THREE_ROWS)
        assert tables.total_observations() == classified

    def test_player_filter_own_shots(self):
        tables, _ = ingest_corpus(THREE_ROWS, PlayerFilter("Ann"))
        # Ann hit three serves and nothing else (Bea's ace gave her no shot)
        assert tables.total_observations() == 3
        for ctx in tables.counts:
            assert context_key(ctx).startswith("serve:")
        assert tables.rally_count == 3

    def test_player_filter_with_opponents(self):
        tables, _ = ingest_corpus(THREE_ROWS, PlayerFilter("Ann", include_opponent_shots=True))
        assert tables.total_observations() == 6

    def test_player_filter_drops_foreign_rallies(self):
        extra = THREE_ROWS + [row("4f1*", server="Cara", returner="Dee")]
        tables, _ = ingest_corpus(extra, PlayerFilter("Ann"))
        assert tables.rally_count == 3
        tables_all, _ = ingest_corpus(extra)
        assert tables_all.rally_count == 4

    def test_unknown_player_matches_nothing(self):
        tables, report = ingest_corpus(THREE_ROWS, PlayerFilter("Nobody"))
        assert tables.rally_count == 0
        assert report.rallies == 0

    def test_unparseable_rows_are_skipped(self):
        bad = THREE_ROWS + [row("zz"), row("4f9*")]
        tables, report = ingest_corpus(bad)
        assert tables.rally_count == 3
        assert report.skipped == 2

    def test_special_types_excluded_on_request(self):
        rows = [row("4r1f2@")]
        tables, _ = ingest_corpus(rows, include_special_types=False)
        # slice return dropped from counts, but still chains the context
        assert tables.total_observations() == 2
        rally_ctx = rally_context(True, ServeNumber.FIRST, 1)
        assert tables.counts[rally_ctx][1, Outcome.ERROR] == 1
        assert return_context(Side.DEUCE, ServeNumber.FIRST, 4) not in tables.counts

    def test_histogram_counts_dropped_types_too(self):
        _, report = ingest_corpus([row("4r1f2@")], include_special_types=False)
        assert report.shot_type_histogram == {"f": 1, "r": 1}


class TestMergeCounts:
    def test_merge_equals_joint_ingest(self):
        a, _ = ingest_corpus(THREE_ROWS[:2])
        b, _ = ingest_corpus(THREE_ROWS[2:])
        joint, _ = ingest_corpus(THREE_ROWS)
        merged = merge_counts(a, b)
        assert merged.rally_count == joint.rally_count
        assert merged.total_observations() == joint.total_observations()
        for ctx, grid in joint.counts.items():
            np.testing.assert_array_equal(merged.counts[ctx], grid)
        assert merged.player_share == joint.player_share

    def test_merge_commutes(self):
        a, _ = ingest_corpus(THREE_ROWS[:1])
        b, _ = ingest_corpus(THREE_ROWS[1:])
        ab, ba = merge_counts(a, b), merge_counts(b, a)
        for ctx in ab.counts:
            np.testing.assert_array_equal(ab.counts[ctx], ba.counts[ctx])


def filled_counts(cells, contexts=ALL_CONTEXTS):
    tables = CountTables()
    for ctx in contexts:
        grid = tables.grid(ctx)
        for (slot, outcome), n in cells.items():
            grid[slot, outcome] = n
    return tables


class TestFinalize:
    def test_probability_oracle(self):
        counts = filled_counts({(0, 0): 1, (0, 1): 1, (0, 2): 2})
        profile = finalize_profile(counts)
        for ctx in ALL_CONTEXTS:
            grid = profile.grid(ctx)
            assert grid[0] == pytest.approx([0.25, 0.25, 0.5], abs=1e-12)
            assert grid[1:].sum() == 0.0

    def test_laplace_on_empty_context_gives_uniform(self):
        counts = CountTables()
        profile = finalize_profile(counts, Smoothing.laplace(1.0))
        assert profiles_equal(profile, uniform_profile())

    def test_laplace_oracle(self):
        counts = filled_counts({(0, 0): 8})
        profile = finalize_profile(counts, Smoothing.laplace(1.0))
        grid = profile.grid(ALL_CONTEXTS[0])
        assert grid[0, 0] == pytest.approx(9 / 17, abs=1e-12)
        assert grid[2, 2] == pytest.approx(1 / 17, abs=1e-12)

    def test_empty_context_without_smoothing_fails(self):
        with pytest.raises(ProfileBuildError, match="serve:deuce:first"):
            finalize_profile(CountTables())

    def test_counts_recoverable_from_probabilities(self):
        rng = random.Random(31)
        counts = CountTables()
        for ctx in ALL_CONTEXTS:
            grid = counts.grid(ctx)
            for slot in range(3):
                for outcome in range(3):
                    grid[slot, outcome] = rng.randrange(20)
        alpha = 0.5
        profile = finalize_profile(counts, Smoothing.laplace(alpha))
        for ctx in ALL_CONTEXTS:
            total = counts.counts[ctx].sum()
            recovered = profile.grid(ctx) * (total + 9 * alpha) - alpha
            np.testing.assert_allclose(recovered, counts.counts[ctx], atol=1e-9)

    def test_randomized_counts_always_validate(self):
        rng = random.Random(90)
        for _ in range(25):
            counts = CountTables()
            for ctx in ALL_CONTEXTS:
                grid = counts.grid(ctx)
                for _ in range(rng.randrange(1, 12)):
                    grid[rng.randrange(3), rng.randrange(3)] += 1
            profile = finalize_profile(counts, Smoothing.laplace(rng.choice([0.5, 1.0, 2.0])))
            assert validate_profile(profile).ok

    def test_smoothing_constructors(self):
        assert Smoothing.none().alpha == 0.0
        assert Smoothing.laplace(2.5).alpha == 2.5
        with pytest.raises(ProfileBuildError):
            Smoothing.laplace(0.0)
        with pytest.raises(ProfileBuildError):
            Smoothing.laplace(-1.0)


class TestProfileSerialization:
    def test_round_trip_is_bit_exact(self, tmp_path):
        rng = random.Random(17)
        rows = {}
        for ctx in ALL_CONTEXTS:
            raw = [rng.random() for _ in range(9)]
            total = sum(raw)
            rows[ctx] = [x / total for x in raw]
        profile = profile_from_rows(rows, provenance="round-trip")
        path = tmp_path / "profile.json"
        save_profile(profile, path)
        loaded = load_profile(path)
        assert profiles_equal(profile, loaded)
        assert loaded.provenance == "round-trip"

    def test_document_uses_canonical_context_order(self):
        doc = profile_to_json_dict(uniform_profile())
        assert doc["schema_version"] == "1"
        assert len(doc["tables"]) == 28
        variants = [e["context"]["variant"] for e in doc["tables"]]
        assert variants == ["serve"] * 4 + ["return"] * 12 + ["rally"] * 12

    def test_save_refuses_invalid_profile(self, tmp_path):
        broken = uniform_profile()
        broken.tables[ALL_CONTEXTS[0]] = broken.tables[ALL_CONTEXTS[0]] * 0.5
        with pytest.raises(ProfileBuildError, match="refusing"):
            save_profile(broken, tmp_path / "x.json")

    def test_wrong_schema_version(self):
        doc = profile_to_json_dict(uniform_profile())
        doc["schema_version"] = "99"
        with pytest.raises(ProfileSchemaError, match="/schema_version"):
            profile_from_json_dict(doc)

    def test_tables_must_be_list(self):
        with pytest.raises(ProfileSchemaError, match="/tables"):
            profile_from_json_dict({"schema_version": "1", "tables": {}})

    def test_entry_path_in_errors(self):
        doc = profile_to_json_dict(uniform_profile())
        del doc["tables"][3]["probabilities"]
        with pytest.raises(ProfileSchemaError, match="/tables/3"):
            profile_from_json_dict(doc)

    def test_duplicate_context_rejected(self):
        doc = profile_to_json_dict(uniform_profile())
        doc["tables"][1] = doc["tables"][0]
        with pytest.raises(ProfileSchemaError, match="/tables/1/context"):
            profile_from_json_dict(doc)

    def test_bad_probability_shape(self):
        doc = profile_to_json_dict(uniform_profile())
        doc["tables"][0]["probabilities"] = [[0.5, 0.5]]
        with pytest.raises(ProfileSchemaError, match="/tables/0/probabilities"):
            profile_from_json_dict(doc)

    def test_unknown_variant(self):
        doc = profile_to_json_dict(uniform_profile())
        doc["tables"][0]["context"] = {"variant": "smash"}
        with pytest.raises(ProfileSchemaError, match="variant"):
            profile_from_json_dict(doc)

    def test_bad_side_value(self):
        doc = profile_to_json_dict(uniform_profile())
        doc["tables"][0]["context"] = {"variant": "serve", "side": "left", "serve_number": "first"}
        with pytest.raises(ProfileSchemaError, match="/tables/0/context"):
            profile_from_json_dict(doc)

    def test_invalid_probabilities_rejected(self):
        doc = profile_to_json_dict(uniform_profile())
        doc["tables"][0]["probabilities"] = [[0.5] * 3] * 3
        with pytest.raises(ProfileSchemaError, match="sum"):
            profile_from_json_dict(doc)

    def test_missing_context_rejected(self):
        doc = profile_to_json_dict(uniform_profile())
        doc["tables"] = doc["tables"][1:]
        with pytest.raises(ProfileSchemaError, match="missing"):
            profile_from_json_dict(doc)

    def test_load_rejects_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ProfileSchemaError, match="not valid JSON"):
            load_profile(path)


CSV_TEXT = """match_id,server,returner,side,first,second
m1,Ann,Bea,deuce,4f1*,
m1,Ann,Bea,advantage,6n,4b2@
m2,Bea,Ann,D,5*,
m2,Bea,Ann,ad,4,
m2,Ann,Bea,A,6b3f1@,
"""


class TestCsvInput:
    def write(self, tmp_path, text=CSV_TEXT, name="corpus.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    def test_read_rows(self, tmp_path):
        rows = list(read_rally_rows(self.write(tmp_path)))
        assert len(rows) == 5
        assert rows[0] == RallyRow("m1", "Ann", "Bea", Side.DEUCE, "4f1*", None)
        assert rows[1].second_serve_string == "4b2@"
        # short side spellings, any case
        assert rows[2].side is Side.DEUCE
        assert rows[3].side is Side.ADVANTAGE
        assert rows[4].side is Side.ADVANTAGE

    def test_ingest_csv_counts(self, tmp_path):
        tables, report = ingest_csv(self.write(tmp_path))
        assert report.rallies == 5
        assert report.skipped == 0
        # 2 + 3 + 1 + 1 + 3 observations across the five rows
        assert tables.total_observations() == 10

    def test_missing_column_raises(self, tmp_path):
        path = self.write(tmp_path, "match_id,server,who,side,first\n", name="bad.csv")
        with pytest.raises(IngestError, match="missing column"):
            list(read_rally_rows(path))

    def test_bad_side_rows_skip(self, tmp_path):
        text = CSV_TEXT + "m3,Ann,Bea,north,4,\n"
        tables, report = ingest_csv(self.write(tmp_path, text))
        assert report.rallies == 5
        assert report.skipped == 1

    def test_column_mapping(self, tmp_path):
        text = """game,host,guest,court,serve1,serve2
g1,Ann,Bea,deuce,5*,
"""
        path = self.write(tmp_path, text, name="renamed.csv")
        mapping_doc = {
            "columns": {
                "match_id": "game",
                "server_name": "host",
                "returner_name": "guest",
                "side": "court",
                "first_serve": "serve1",
                "second_serve": "serve2",
            }
        }
        map_path = tmp_path / "mapping.json"
        map_path.write_text(json.dumps(mapping_doc), encoding="utf-8")
        columns = load_column_mapping(map_path)
        rows = list(read_rally_rows(path, columns))
        assert rows[0].server_name == "Ann"
        assert rows[0].first_serve_string == "5*"

    def test_mapping_rejects_unknown_field(self, tmp_path):
        map_path = tmp_path / "mapping.json"
        map_path.write_text(json.dumps({"columns": {"nonsense": "x"}}), encoding="utf-8")
        with pytest.raises(IngestError, match="unknown RallyRow field"):
            load_column_mapping(map_path)

    def test_optional_columns_default(self, tmp_path):
        text = "server,returner,side,first\nAnn,Bea,deuce,5*\n"
        path = self.write(tmp_path, text, name="minimal.csv")
        rows = list(read_rally_rows(path))
        assert rows[0].match_id == ""
        assert rows[0].second_serve_string is None


class TestReportDocument:
    def test_shares_and_groups(self):
        _, report = ingest_corpus(THREE_ROWS)
        doc = report_to_json_dict(report)
        assert doc["rallies"] == 3
        assert doc["shot_type_shares_pct"]["normal"] == 100.0
        assert doc["shot_type_shares_pct"]["volley"] == 0.0
        shares = {r["player"]: r["share_pct"] for r in doc["player_share"]}
        assert shares == {"Ann": 50.0, "Bea": 50.0}

    def test_long_tail_collapses_to_others(self):
        rows = [
            row("5*", server=f"P{i:02d}", returner=f"Q{i:02d}") for i in range(12)
        ]
        _, report = ingest_corpus(rows)
        doc = report_to_json_dict(report, top=10)
        players = [r["player"] for r in doc["player_share"]]
        assert players[-1] == "Others"
        assert len(players) == 11
        total = sum(r["rallies"] for r in doc["player_share"])
        assert total == 24  # 12 rallies x 2 participants


class TestParserFuzz:
    """Random strings either parse or raise ParseError, nothing else."""

    ALPHABET = "fbrsvz123456789*@#nwdx"

    def test_fuzz(self):
        rng = random.Random(1234)
        parsed = failed = 0
        for _ in range(2000):
            text = "".join(
                rng.choice(self.ALPHABET) for _ in range(rng.randrange(0, 12))
            )
            try:
                rally = parse_rally_string(text, ServeNumber.FIRST)
            except ParseError:
                failed += 1
            else:
                parsed += 1
                assert rally.rally_length >= 0
        assert parsed > 0 and failed > 0

    def test_round_trippable_corpus(self):
        # every accepted string classifies cleanly in a synthetic row
        rng = random.Random(99)
        for _ in range(500):
            text = "".join(
                rng.choice(self.ALPHABET) for _ in range(rng.randrange(1, 10))
            )
            try:
                rally = parse_rally_string(text, ServeNumber.FIRST)
            except ParseError:
                continue
            fault = rally.serves[0].terminal is ServeTerminal.FAULT
            r = row(text, "4" if fault else None)
            shots = classify_shots(parse_row(r), r)
            assert len(shots) >= 1
