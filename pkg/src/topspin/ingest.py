"""Charting-data ingestion: rally-string parsing, counting, profile building.

Rally strings follow the shot-by-shot charting notation, restricted to the
subset this model consumes:

* serve attempt: direction digit ``4``-``6``, then optional error-location
  letters, then an optional terminal;
* rally shot: type letter (``f b r s v z o p u y l m h i j k t q``),
  direction digit ``1``-``3``, optional depth digit ``7``-``9``, optional
  error-location letters, optional terminal;
* terminals: ``*`` winner, ``@`` unforced error, ``#`` forced error (both
  error kinds collapse to one error outcome);
* error-location letters ``n w d x`` (net, wide, deep, wide-and-deep) mark
  an error even without a terminal; they may only trail the final shot.

Anything else raises :class:`ParseError` with the byte offset. Depth digits
are captured for logging only and never feed the probability tables.

A rally row pairs a first-serve string with an optional second-serve string
(present exactly when the first serve faulted). Classification turns a
parsed rally into (hitter, context, direction, outcome) observations: both
fault attempts count as serve-context errors, shot 0 is the return, later
shots alternate hitters starting back at the server.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np

from .shots import (
    ALL_CONTEXTS,
    HitterContext,
    Outcome,
    ServeNumber,
    Side,
    SkillProfile,
    context_key,
    direction_codes,
    rally_context,
    return_context,
    serve_context,
    validate_profile,
)

SHOT_TYPE_LETTERS = frozenset("fbrsvzopuylmhijktq")
ERROR_LOCATION_LETTERS = frozenset("nwdx")
NORMAL_SHOT_TYPES = frozenset("fb")  # plain forehand/backhand groundstrokes

# Charting letters for the supplementary shot-type groups.
SHOT_TYPE_GROUPS = {
    "normal": "fb",
    "slice": "rs",
    "volley": "vz",
    "drop": "uy",
    "lob": "lm",
}


class IngestError(Exception):
    pass


class ParseError(IngestError):
    """Unparseable rally string; carries the byte offset of the failure."""

    def __init__(self, reason: str, offset: int):
        super().__init__(f"{reason} at offset {offset}")
        self.reason = reason
        self.offset = offset


class ProfileBuildError(IngestError):
    pass


class ProfileSchemaError(IngestError):
    """Bad profile document; message carries a JSON-pointer-style path."""


class ServeTerminal(str, Enum):
    FAULT = "fault"
    ACE = "ace"
    IN_PLAY = "in_play"


@dataclass(frozen=True, slots=True)
class ServeAttempt:
    direction: int  # 4-6
    terminal: ServeTerminal


@dataclass(frozen=True, slots=True)
class Shot:
    shot_type: str
    direction: int  # 1-3
    depth: Optional[int]  # 7-9, visualization only
    terminal: Outcome


@dataclass(frozen=True, slots=True)
class ParsedRally:
    serves: Tuple[ServeAttempt, ...]  # 1 or 2 attempts
    shots: Tuple[Shot, ...]

    @property
    def rally_length(self) -> int:
        in_play = 0 if self.serves[-1].terminal is ServeTerminal.FAULT else 1
        return in_play + len(self.shots)


@dataclass(frozen=True, slots=True)
class RallyRow:
    match_id: str
    server_name: str
    returner_name: str
    side: Side
    first_serve_string: str
    second_serve_string: Optional[str] = None


def parse_rally_string(s: str, serve_number: ServeNumber) -> ParsedRally:
    """Parse one serve attempt plus any following shots.

    The returned rally holds a single serve. Use :func:`parse_row` to merge
    a faulted first serve with its second-serve string.
    """
    text = s.strip()
    if not text:
        raise ParseError("empty rally string", 0)
    i = 0
    ch = text[0]
    if not ch.isdigit() or not 4 <= int(ch) <= 6:
        raise ParseError(f"expected serve direction 4-6, got {ch!r}", 0)
    serve_dir = int(ch)
    i = 1
    i, marks, terminal = _scan_ending(text, i)
    if terminal is Outcome.ERROR or (marks and terminal is None):
        if i != len(text):
            raise ParseError("trailing data after serve fault", i)
        return ParsedRally((ServeAttempt(serve_dir, ServeTerminal.FAULT),), ())
    if terminal is Outcome.WINNER:
        if i != len(text):
            raise ParseError("trailing data after ace", i)
        return ParsedRally((ServeAttempt(serve_dir, ServeTerminal.ACE),), ())

    shots: List[Shot] = []
    while i < len(text):
        ch = text[i]
        if ch not in SHOT_TYPE_LETTERS:
            raise ParseError(f"expected shot type letter, got {ch!r}", i)
        i += 1
        if i >= len(text) or not text[i].isdigit() or not 1 <= int(text[i]) <= 3:
            raise ParseError("expected shot direction 1-3", i)
        direction = int(text[i])
        i += 1
        depth = None
        if i < len(text) and text[i].isdigit():
            if not 7 <= int(text[i]) <= 9:
                raise ParseError(f"expected depth digit 7-9, got {text[i]!r}", i)
            depth = int(text[i])
            i += 1
        i, marks, terminal = _scan_ending(text, i)
        if terminal is None and marks:
            terminal = Outcome.ERROR
        if terminal is not None and i != len(text):
            raise ParseError("shot after a terminal", i)
        shots.append(Shot(ch, direction, depth, terminal if terminal is not None else Outcome.IN_PLAY))
        if terminal is not None:
            break
    return ParsedRally((ServeAttempt(serve_dir, ServeTerminal.IN_PLAY),), tuple(shots))


def _scan_ending(text: str, i: int) -> Tuple[int, str, Optional[Outcome]]:
    """Consume error-location letters and an optional terminal at position i."""
    marks = ""
    while i < len(text) and text[i] in ERROR_LOCATION_LETTERS:
        marks += text[i]
        i += 1
    terminal = None
    if i < len(text):
        ch = text[i]
        if ch == "*":
            terminal = Outcome.WINNER
            i += 1
        elif ch in ("@", "#"):
            terminal = Outcome.ERROR
            i += 1
    if marks and terminal is Outcome.WINNER:
        raise ParseError("error location on a winner", i - 1)
    if marks and terminal is None:
        return i, marks, None
    return i, marks, terminal


def parse_row(row: RallyRow) -> ParsedRally:
    """Parse a full rally row, merging first and second serve attempts."""
    first = parse_rally_string(row.first_serve_string, ServeNumber.FIRST)
    first_fault = first.serves[0].terminal is ServeTerminal.FAULT
    if first_fault != (row.second_serve_string is not None):
        raise ParseError(
            "second serve string present iff the first serve faulted", 0
        )
    if not first_fault:
        return first
    second = parse_rally_string(row.second_serve_string, ServeNumber.SECOND)
    return ParsedRally(first.serves + second.serves, second.shots)


@dataclass(frozen=True, slots=True)
class ClassifiedShot:
    hitter: str
    context: HitterContext
    direction: int
    outcome: Outcome
    shot_type: Optional[str]  # None for serve attempts


def classify_shots(rally: ParsedRally, row: RallyRow) -> List[ClassifiedShot]:
    """Observations a parsed rally contributes to the count tables.

    Serve attempts map to serve contexts (side x attempt number), the first
    shot to a return context keyed by the in-play serve, and every later
    shot to a rally context with hitters alternating from the server.
    """
    out: List[ClassifiedShot] = []
    numbers = (ServeNumber.FIRST, ServeNumber.SECOND)
    for attempt, number in zip(rally.serves, numbers):
        outcome = {
            ServeTerminal.FAULT: Outcome.ERROR,
            ServeTerminal.ACE: Outcome.WINNER,
            ServeTerminal.IN_PLAY: Outcome.IN_PLAY,
        }[attempt.terminal]
        out.append(
            ClassifiedShot(
                row.server_name, serve_context(row.side, number), attempt.direction, outcome, None
            )
        )
    final = rally.serves[-1]
    if final.terminal is not ServeTerminal.IN_PLAY:
        return out
    number = numbers[len(rally.serves) - 1]
    for k, shot in enumerate(rally.shots):
        if k == 0:
            hitter = row.returner_name
            ctx: HitterContext = return_context(row.side, number, final.direction)
        else:
            served = k % 2 == 1
            hitter = row.server_name if served else row.returner_name
            ctx = rally_context(served, number, rally.shots[k - 1].direction)
        out.append(ClassifiedShot(hitter, ctx, shot.direction, shot.terminal, shot.shot_type))
    return out


@dataclass(frozen=True, slots=True)
class PlayerFilter:
    """Restrict counting to one player's own shots, or take everything.

    ``name`` of None keeps every shot (corpus-wide averaging). With a name,
    only rallies that player served or returned are ingested, and by default
    only that player's own shots are counted; ``include_opponent_shots``
    widens it to both hitters of those rallies.
    """

    name: Optional[str] = None
    include_opponent_shots: bool = False


ALL_PLAYERS = PlayerFilter()


@dataclass
class CountTables:
    """Integer observation counts per context, plus corpus bookkeeping."""

    counts: Dict[HitterContext, np.ndarray] = field(default_factory=dict)
    rally_count: int = 0
    skipped_rallies: int = 0
    shot_type_histogram: Counter = field(default_factory=Counter)
    player_share: Counter = field(default_factory=Counter)

    def grid(self, ctx: HitterContext) -> np.ndarray:
        grid = self.counts.get(ctx)
        if grid is None:
            grid = np.zeros((3, 3), dtype=np.int64)
            self.counts[ctx] = grid
        return grid

    def add(self, shot: ClassifiedShot) -> None:
        base = direction_codes(shot.context)[0]
        self.grid(shot.context)[shot.direction - base, shot.outcome] += 1

    def total_observations(self) -> int:
        return int(sum(int(g.sum()) for g in self.counts.values()))


def merge_counts(a: CountTables, b: CountTables) -> CountTables:
    """Cell-wise sum; counting shards commute, so merge order never matters."""
    merged = CountTables(
        rally_count=a.rally_count + b.rally_count,
        skipped_rallies=a.skipped_rallies + b.skipped_rallies,
        shot_type_histogram=a.shot_type_histogram + b.shot_type_histogram,
        player_share=a.player_share + b.player_share,
    )
    for src in (a, b):
        for ctx, grid in src.counts.items():
            merged.grid(ctx)[:] += grid
    return merged


@dataclass
class IngestReport:
    rallies: int
    skipped: int
    shot_type_histogram: Dict[str, int]
    player_share: Dict[str, int]  # rally participations per player


def ingest_corpus(
    rows: Iterable[RallyRow],
    player_filter: PlayerFilter = ALL_PLAYERS,
    include_special_types: bool = True,
) -> Tuple[CountTables, IngestReport]:
    """Accumulate classified shots from rally rows into count tables.

    Unparseable rows are counted in ``skipped_rallies`` and never abort the
    run. ``include_special_types`` keeps direction observations from
    non-groundstroke shot types (the default); switching it off drops those
    shots from the counts while still using them for context chaining.
    """
    tables = CountTables()
    name = player_filter.name
    for row in rows:
        if name is not None and name != row.server_name and name != row.returner_name:
            continue
        try:
            rally = parse_row(row)
            shots = classify_shots(rally, row)
        except IngestError:
            tables.skipped_rallies += 1
            continue
        tables.rally_count += 1
        tables.player_share[row.server_name] += 1
        tables.player_share[row.returner_name] += 1
        for shot in shots:
            if shot.shot_type is not None:
                tables.shot_type_histogram[shot.shot_type] += 1
            if name is not None and not player_filter.include_opponent_shots:
                if shot.hitter != name:
                    continue
            if not include_special_types and shot.shot_type is not None:
                if shot.shot_type not in NORMAL_SHOT_TYPES:
                    continue
            tables.add(shot)
    report = IngestReport(
        rallies=tables.rally_count,
        skipped=tables.skipped_rallies,
        shot_type_histogram=dict(sorted(tables.shot_type_histogram.items())),
        player_share=dict(tables.player_share.most_common()),
    )
    return tables, report


@dataclass(frozen=True, slots=True)
class Smoothing:
    """Additive (Laplace) smoothing; ``alpha`` of 0 means none."""

    alpha: float = 0.0

    @classmethod
    def none(cls) -> "Smoothing":
        return cls(0.0)

    @classmethod
    def laplace(cls, alpha: float = 1.0) -> "Smoothing":
        if alpha <= 0:
            raise ProfileBuildError("laplace alpha must be positive")
        return cls(alpha)


def finalize_profile(
    counts: CountTables, smoothing: Smoothing = Smoothing.none(), provenance: str = ""
) -> SkillProfile:
    """Turn counts into probabilities: (count + alpha) / (total + 9 * alpha).

    Without smoothing every context needs at least one observation; the
    error names the first empty context. The result always passes
    :func:`topspin.shots.validate_profile`.
    """
    alpha = smoothing.alpha
    tables: Dict[HitterContext, np.ndarray] = {}
    for ctx in ALL_CONTEXTS:
        grid = counts.counts.get(ctx)
        total = int(grid.sum()) if grid is not None else 0
        if total == 0 and alpha == 0.0:
            raise ProfileBuildError(f"no observations for context {context_key(ctx)}")
        base = grid.astype(np.float64) if grid is not None else np.zeros((3, 3))
        tables[ctx] = (base + alpha) / (total + 9.0 * alpha)
    profile = SkillProfile(tables, provenance=provenance)
    report = validate_profile(profile)
    if not report.ok:
        raise ProfileBuildError(f"counts produce an invalid profile: {report}")
    return profile


# --- serialization ----------------------------------------------------------

PROFILE_SCHEMA_VERSION = "1"


def _context_to_json(ctx: HitterContext) -> Dict[str, object]:
    key = context_key(ctx)
    parts = key.split(":")
    if parts[0] == "serve":
        return {"variant": "serve", "side": parts[1], "serve_number": parts[2]}
    if parts[0] == "return":
        return {
            "variant": "return",
            "side": parts[1],
            "serve_number": parts[2],
            "serve_direction": int(parts[3]),
        }
    return {
        "variant": "rally",
        "hitter_served": parts[1] == "served",
        "serve_number": parts[2],
        "previous_direction": int(parts[3]),
    }


def _context_from_json(doc: Dict[str, object], path: str) -> HitterContext:
    try:
        variant = doc["variant"]
        if variant == "serve":
            return serve_context(Side(doc["side"]), ServeNumber(doc["serve_number"]))
        if variant == "return":
            return return_context(
                Side(doc["side"]), ServeNumber(doc["serve_number"]), int(doc["serve_direction"])
            )
        if variant == "rally":
            return rally_context(
                bool(doc["hitter_served"]),
                ServeNumber(doc["serve_number"]),
                int(doc["previous_direction"]),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise ProfileSchemaError(f"{path}: bad context ({exc})") from None
    raise ProfileSchemaError(f"{path}/variant: unknown variant {variant!r}")


def profile_to_json_dict(profile: SkillProfile) -> Dict[str, object]:
    entries = []
    for ctx in ALL_CONTEXTS:
        grid = profile.grid(ctx)
        entries.append(
            {
                "context": _context_to_json(ctx),
                "probabilities": [[float(x) for x in row] for row in grid],
            }
        )
    return {
        "schema_version": PROFILE_SCHEMA_VERSION,
        "provenance": profile.provenance,
        "tables": entries,
    }


def save_profile(profile: SkillProfile, path: Union[str, Path]) -> None:
    """Write the canonical JSON document. Floats round-trip bit for bit."""
    report = validate_profile(profile)
    if not report.ok:
        raise ProfileBuildError(f"refusing to save an invalid profile: {report}")
    doc = profile_to_json_dict(profile)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def profile_from_json_dict(doc: Dict[str, object]) -> SkillProfile:
    if not isinstance(doc, dict):
        raise ProfileSchemaError("/: expected an object")
    if doc.get("schema_version") != PROFILE_SCHEMA_VERSION:
        raise ProfileSchemaError(
            f"/schema_version: expected {PROFILE_SCHEMA_VERSION!r}, got {doc.get('schema_version')!r}"
        )
    entries = doc.get("tables")
    if not isinstance(entries, list):
        raise ProfileSchemaError("/tables: expected an array")
    tables: Dict[HitterContext, np.ndarray] = {}
    for idx, entry in enumerate(entries):
        path = f"/tables/{idx}"
        if not isinstance(entry, dict) or "context" not in entry or "probabilities" not in entry:
            raise ProfileSchemaError(f"{path}: expected context and probabilities")
        ctx = _context_from_json(entry["context"], f"{path}/context")
        if ctx in tables:
            raise ProfileSchemaError(f"{path}/context: duplicate context {context_key(ctx)}")
        probs = entry["probabilities"]
        if (
            not isinstance(probs, list)
            or len(probs) != 3
            or any(not isinstance(r, list) or len(r) != 3 for r in probs)
        ):
            raise ProfileSchemaError(f"{path}/probabilities: expected a 3x3 array")
        tables[ctx] = np.array(probs, dtype=np.float64)
    profile = SkillProfile(tables, provenance=str(doc.get("provenance", "")))
    report = validate_profile(profile)
    if not report.ok:
        missing = [str(i) for i in report.issues]
        raise ProfileSchemaError("invalid profile: " + "; ".join(missing))
    return profile


def load_profile(path: Union[str, Path]) -> SkillProfile:
    """Read and validate a profile document; invalid documents are rejected."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ProfileSchemaError(f"/: not valid JSON ({exc})") from None
    return profile_from_json_dict(doc)


# --- CSV input ---------------------------------------------------------------

DEFAULT_COLUMNS = {
    "match_id": "match_id",
    "server_name": "server",
    "returner_name": "returner",
    "side": "side",
    "first_serve": "first",
    "second_serve": "second",
}

_SIDE_VALUES = {
    "deuce": Side.DEUCE,
    "d": Side.DEUCE,
    "advantage": Side.ADVANTAGE,
    "ad": Side.ADVANTAGE,
    "a": Side.ADVANTAGE,
}


def load_column_mapping(path: Union[str, Path]) -> Dict[str, str]:
    """Column mapping document: ``{"columns": {field: csv column, ...}}``."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    columns = dict(DEFAULT_COLUMNS)
    supplied = doc.get("columns", doc) if isinstance(doc, dict) else None
    if not isinstance(supplied, dict):
        raise IngestError("mapping document must be an object with a 'columns' table")
    for fieldname, col in supplied.items():
        if fieldname not in DEFAULT_COLUMNS:
            raise IngestError(f"unknown RallyRow field {fieldname!r} in column mapping")
        columns[fieldname] = str(col)
    return columns


def read_rally_rows(
    path: Union[str, Path], columns: Optional[Dict[str, str]] = None
) -> Iterator[Union[RallyRow, None]]:
    """Yield RallyRows from a UTF-8 CSV with a header; bad rows yield None.

    None entries let :func:`ingest_rows_file` count skips without aborting;
    a missing header column aborts immediately since no row could parse.
    """
    cols = columns or DEFAULT_COLUMNS
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        for fieldname in ("server_name", "returner_name", "side", "first_serve"):
            if cols[fieldname] not in header:
                raise IngestError(f"CSV is missing column {cols[fieldname]!r}")
        has_second = cols["second_serve"] in header
        has_match = cols["match_id"] in header
        for raw in reader:
            try:
                side = _SIDE_VALUES[raw[cols["side"]].strip().lower()]
                second = raw[cols["second_serve"]].strip() if has_second else ""
                yield RallyRow(
                    match_id=raw[cols["match_id"]].strip() if has_match else "",
                    server_name=raw[cols["server_name"]].strip(),
                    returner_name=raw[cols["returner_name"]].strip(),
                    side=side,
                    first_serve_string=raw[cols["first_serve"]].strip(),
                    second_serve_string=second or None,
                )
            except (KeyError, AttributeError):
                yield None


def ingest_csv(
    path: Union[str, Path],
    columns: Optional[Dict[str, str]] = None,
    player_filter: PlayerFilter = ALL_PLAYERS,
    include_special_types: bool = True,
) -> Tuple[CountTables, IngestReport]:
    """CSV convenience wrapper around :func:`ingest_corpus`."""

    def rows() -> Iterator[RallyRow]:
        for row in read_rally_rows(path, columns):
            if row is None:
                bad_rows[0] += 1
                continue
            yield row

    bad_rows = [0]
    tables, report = ingest_corpus(rows(), player_filter, include_special_types)
    tables.skipped_rallies += bad_rows[0]
    report.skipped += bad_rows[0]
    return tables, report


def report_to_json_dict(report: IngestReport, top: int = 10) -> Dict[str, object]:
    """Report document with shot-type shares and top-player composition."""
    total_shots = sum(report.shot_type_histogram.values())
    groups: Dict[str, float] = {}
    if total_shots:
        assigned = 0
        for group, letters in SHOT_TYPE_GROUPS.items():
            count = sum(report.shot_type_histogram.get(l, 0) for l in letters)
            groups[group] = round(100.0 * count / total_shots, 2)
            assigned += count
        groups["other"] = round(100.0 * (total_shots - assigned) / total_shots, 2)
    participations = sum(report.player_share.values())
    share_rows = []
    for name, count in list(report.player_share.items())[:top]:
        share_rows.append(
            {
                "player": name,
                "rallies": count,
                "share_pct": round(100.0 * count / participations, 2) if participations else 0.0,
            }
        )
    rest = sum(list(report.player_share.values())[top:])
    if rest:
        share_rows.append(
            {
                "player": "Others",
                "rallies": rest,
                "share_pct": round(100.0 * rest / participations, 2),
            }
        )
    return {
        "schema_version": "1",
        "rallies": report.rallies,
        "skipped": report.skipped,
        "shot_type_histogram": report.shot_type_histogram,
        "shot_type_shares_pct": groups,
        "player_share": share_rows,
    }


def save_report(report: IngestReport, path: Union[str, Path]) -> None:
    Path(path).write_text(
        json.dumps(report_to_json_dict(report), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
