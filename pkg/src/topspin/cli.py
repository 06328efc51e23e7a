"""Command-line entry point: ingest, simulate, sweep, analyze, validate.

Agent definitions live in JSON config documents rather than flag soup;
flags carry only paths, seeds, sizes, and overrides. Every run is
deterministic given its inputs and seed: reruns produce byte-identical
output files. Failures print one machine-readable JSON line to stderr and
exit with a documented code (see EXIT_CODES / --help).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional

from .agents import AgentSpecError, agent_spec_from_json
from .analytics import (
    AnalyticsError,
    histogram_to_json_dict,
    patterns_to_json_dict,
    rally_length_distribution,
    sweep_report,
    sweep_to_json_dict,
    top_patterns,
    win_summary,
    win_summary_to_json_dict,
    write_histogram_csv,
    write_json_report,
    write_patterns_csv,
    write_sweep_csv,
    write_win_summary_csv,
)
from .harness import (
    BatchConfig,
    HarnessError,
    match_config_from_json,
    read_match_records,
    run_batch,
    write_batch_summary,
    write_match_records,
)
from .ingest import (
    IngestError,
    PlayerFilter,
    ProfileBuildError,
    ProfileSchemaError,
    Smoothing,
    finalize_profile,
    ingest_csv,
    load_column_mapping,
    load_profile,
    save_profile,
    save_report,
)
from .rules import InvalidConfigError, PLAYER_A, PLAYER_B
from .shots import SkillProfile

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_DATA = 4
EXIT_INTERNAL = 5

EXIT_CODES = {
    EXIT_OK: "success",
    EXIT_USAGE: "usage error (unknown flags or arguments)",
    EXIT_CONFIG: "config or schema error (bad config/profile documents, bad references)",
    EXIT_DATA: "data or parse error (unreadable or insufficient input data)",
    EXIT_INTERNAL: "internal error",
}

CONFIG_SCHEMA_VERSION = "1"


class CliError(Exception):
    exit_code = EXIT_INTERNAL
    kind = "internal"


class UsageError(CliError):
    exit_code = EXIT_USAGE
    kind = "usage"


class ConfigError(CliError):
    exit_code = EXIT_CONFIG
    kind = "config"


class DataError(CliError):
    exit_code = EXIT_DATA
    kind = "data"


def _emit_error(exit_code: int, kind: str, message: str) -> None:
    line = json.dumps({"error": {"exit_code": exit_code, "kind": kind, "message": message}})
    print(line, file=sys.stderr)


class _Parser(argparse.ArgumentParser):
    """argparse that raises UsageError instead of exiting the process."""

    def error(self, message: str):  # noqa: A003 - argparse API
        raise UsageError(message)


# --- config documents ---------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """A parsed, schema-checked config document plus its directory.

    Profile references inside the document resolve relative to
    ``base_dir``, so configs can travel with their profiles.
    """

    path: Path
    doc: dict
    base_dir: Path


def load_run_config(path: str) -> RunConfig:
    p = Path(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    version = doc.get("schema_version")
    if version != CONFIG_SCHEMA_VERSION:
        raise ConfigError(
            f"config {path}: schema_version must be {CONFIG_SCHEMA_VERSION!r}, got {version!r}"
        )
    return RunConfig(path=p, doc=doc, base_dir=p.parent)


def _profile_loader(base_dir: Path) -> Callable[[str], SkillProfile]:
    cache: Dict[str, SkillProfile] = {}

    def load(ref: str) -> SkillProfile:
        if not isinstance(ref, str) or not ref:
            raise ConfigError(f"profile reference must be a non-empty string, got {ref!r}")
        key = str((base_dir / ref).resolve())
        if key not in cache:
            try:
                cache[key] = load_profile(key)
            except OSError as exc:
                raise ConfigError(f"cannot read profile {ref}: {exc}") from None
            except ProfileSchemaError as exc:
                raise ConfigError(f"profile {ref}: {exc}") from None
        return cache[key]

    return load


def batch_config_from_run_config(
    config: RunConfig,
    parallelism: Optional[int] = None,
    master_seed: Optional[int] = None,
) -> BatchConfig:
    doc = config.doc
    load = _profile_loader(config.base_dir)
    try:
        n_matches = int(doc["n_matches"])
        seed = int(doc["master_seed"]) if master_seed is None else master_seed
        agent_a = agent_spec_from_json(doc["agent_a"], load)
        agent_b = agent_spec_from_json(doc["agent_b"], load)
    except KeyError as exc:
        raise ConfigError(f"config {config.path}: missing {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config {config.path}: {exc}") from None
    except AgentSpecError as exc:
        raise ConfigError(f"config {config.path}: {exc}") from None
    try:
        match_config = match_config_from_json(doc.get("match", {}))
        return BatchConfig(
            n_matches=n_matches,
            master_seed=seed,
            match_config=match_config,
            agent_a=agent_a,
            agent_b=agent_b,
            alternate_first_server=bool(doc.get("alternate_first_server", True)),
            parallelism=parallelism if parallelism is not None else int(doc.get("parallelism", 1)),
        )
    except (InvalidConfigError, HarnessError, TypeError, ValueError) as exc:
        raise ConfigError(f"config {config.path}: {exc}") from None


# --- subcommands ---------------------------------------------------------------


def _parse_smoothing(text: Optional[str], player: Optional[str]) -> Smoothing:
    if text is None:
        # Named-player tables are sparse; corpus-wide tables are not.
        return Smoothing.laplace(1.0) if player else Smoothing.none()
    if text == "none":
        return Smoothing.none()
    if text == "laplace":
        return Smoothing.laplace(1.0)
    if text.startswith("laplace:"):
        try:
            return Smoothing.laplace(float(text.split(":", 1)[1]))
        except (ValueError, ProfileBuildError) as exc:
            raise UsageError(f"bad --smoothing value {text!r}: {exc}") from None
    raise UsageError(f"bad --smoothing value {text!r}; use none, laplace, or laplace:<alpha>")


def cmd_ingest(args: argparse.Namespace) -> int:
    if args.mapping is not None:
        try:
            columns = load_column_mapping(args.mapping)
        except OSError as exc:
            raise ConfigError(f"cannot read mapping {args.mapping}: {exc}") from None
        except (IngestError, json.JSONDecodeError) as exc:
            raise ConfigError(f"mapping {args.mapping}: {exc}") from None
    else:
        columns = None
    smoothing = _parse_smoothing(args.smoothing, args.player)
    player_filter = PlayerFilter(name=args.player)
    try:
        tables, report = ingest_csv(args.input, columns, player_filter)
        provenance = f"charting:{args.player or 'all-players'}:{Path(args.input).name}"
        profile = finalize_profile(tables, smoothing, provenance=provenance)
    except OSError as exc:
        raise DataError(f"cannot read input {args.input}: {exc}") from None
    except (IngestError, ProfileBuildError) as exc:
        raise DataError(str(exc)) from None
    save_profile(profile, args.out)
    if args.report:
        save_report(report, args.report)
    print(
        f"wrote {args.out}: {report.rallies} rallies ingested, {report.skipped} skipped"
    )
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    batch = batch_config_from_run_config(config, args.parallelism, args.seed)
    records, summary = run_batch(batch)
    write_match_records(records, args.out)
    write_batch_summary(summary, args.summary)
    if summary.failed_indices:
        raise CliError(
            f"batch aborted at match {summary.failed_indices[0]}; "
            f"{summary.completed} matches written to {args.out}"
        )
    rate = summary.match_win_rate[PLAYER_A]
    print(
        f"played {summary.completed} matches, {summary.total_points} points; "
        f"A match-win rate {rate:.4f}"
    )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    agent_doc = config.doc.get("agent_a")
    if not isinstance(agent_doc, dict) or agent_doc.get("kind") != "mcts":
        raise ConfigError("sweep varies agent_a, which must have kind 'mcts'")
    tokens = [v.strip() for v in args.values.split(",") if v.strip()]
    if not tokens:
        raise UsageError("--values must list at least one value")
    labeled = []
    for token in tokens:
        swept = dict(config.doc)
        swept_agent = dict(agent_doc)
        if args.param == "c":
            try:
                swept_agent["c"] = float(token)
            except ValueError:
                raise UsageError(f"--values entry {token!r} is not a number") from None
        else:
            try:
                swept_agent["iterations"] = int(token)
            except ValueError:
                raise UsageError(f"--values entry {token!r} is not an integer") from None
        swept["agent_a"] = swept_agent
        run = RunConfig(path=config.path, doc=swept, base_dir=config.base_dir)
        batch = batch_config_from_run_config(run, args.parallelism)
        _, summary = run_batch(batch)
        if summary.failed_indices:
            raise CliError(f"batch for {args.param}={token} aborted at match {summary.failed_indices[0]}")
        labeled.append((f"{args.param}={token}", summary))
    rows = sweep_report(labeled, PLAYER_A)
    write_sweep_csv(rows, args.out)
    if args.json:
        write_json_report(sweep_to_json_dict(rows), args.json)
    for row in rows:
        print(f"{row.label}: point-win {row.point_win_pct:.2f}%, match-win {row.match_win_pct:.2f}%")
    return EXIT_OK


ANALYZE_ARTIFACTS = ("histogram", "win_summary", "patterns")


def cmd_analyze(args: argparse.Namespace) -> int:
    emits = [e.strip() for e in args.emit.split(",") if e.strip()]
    unknown = [e for e in emits if e not in ANALYZE_ARTIFACTS]
    if unknown:
        raise UsageError(
            f"unknown --emit artifacts {unknown}; choose from {', '.join(ANALYZE_ARTIFACTS)}"
        )
    if not emits:
        raise UsageError("--emit must list at least one artifact")
    try:
        records = read_match_records(args.matches)
    except OSError as exc:
        raise DataError(f"cannot read matches {args.matches}: {exc}") from None
    except HarnessError as exc:
        raise DataError(f"matches {args.matches}: {exc}") from None
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: List[str] = []
    try:
        if "histogram" in emits:
            histogram = rally_length_distribution(records)
            write_histogram_csv(histogram, outdir / "histogram.csv")
            write_json_report(histogram_to_json_dict(histogram), outdir / "histogram.json")
            written += ["histogram.csv", "histogram.json"]
        if "win_summary" in emits:
            summary = win_summary(records)
            write_win_summary_csv(summary, outdir / "win_summary.csv")
            write_json_report(win_summary_to_json_dict(summary), outdir / "win_summary.json")
            written += ["win_summary.csv", "win_summary.json"]
        if "patterns" in emits:
            patterns = top_patterns(records, args.agent, args.top)
            write_patterns_csv(patterns, outdir / "patterns.csv")
            write_json_report(patterns_to_json_dict(patterns), outdir / "patterns.json")
            written += ["patterns.csv", "patterns.json"]
    except AnalyticsError as exc:
        raise DataError(str(exc)) from None
    print(f"wrote {', '.join(written)} to {outdir}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        load_profile(args.profile)
    except OSError as exc:
        raise ConfigError(f"cannot read profile {args.profile}: {exc}") from None
    except ProfileSchemaError as exc:
        raise ConfigError(f"profile {args.profile}: {exc}") from None
    print("OK 28 contexts")
    return EXIT_OK


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    epilog = "exit codes: " + "; ".join(f"{code} = {text}" for code, text in EXIT_CODES.items())
    parser = _Parser(
        prog="topspin",
        description=(
            "Tennis shot-direction simulation: build player profiles from charting "
            "data, run seeded agent-vs-agent match batches, and analyze the records."
        ),
        epilog=epilog,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser(
        "ingest",
        help="build a skill profile from a charting CSV",
        epilog=epilog,
    )
    p.add_argument("--input", required=True, help="charting CSV file (one rally per row)")
    p.add_argument("--mapping", help="JSON column-mapping document for the CSV header")
    p.add_argument("--player", help="restrict counting to this player's own shots")
    p.add_argument(
        "--smoothing",
        help="none, laplace, or laplace:<alpha>; default laplace:1 with --player, else none",
    )
    p.add_argument("--out", required=True, help="output profile JSON path")
    p.add_argument("--report", help="optional ingest report JSON path")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser(
        "simulate",
        help="play a seeded batch of matches between two configured agents",
        epilog=epilog,
    )
    p.add_argument("--config", required=True, help="batch config JSON (see docs/schemas.md)")
    p.add_argument("--out", required=True, help="output match records JSONL path")
    p.add_argument("--summary", required=True, help="output batch summary JSON path")
    p.add_argument("--seed", type=int, help="override the config's master_seed")
    p.add_argument("--parallelism", type=int, help="worker processes (default from config, else 1)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "sweep",
        help="re-run a batch while varying one MCTS parameter of agent_a",
        epilog=epilog,
    )
    p.add_argument("--config", required=True, help="batch config JSON with an mcts agent_a")
    p.add_argument("--param", required=True, choices=("c", "iterations"), help="parameter to vary")
    p.add_argument("--values", required=True, help="comma-separated parameter values")
    p.add_argument("--out", required=True, help="output sweep CSV path")
    p.add_argument("--json", help="optional sweep JSON path")
    p.add_argument("--parallelism", type=int, help="worker processes (default from config, else 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser(
        "analyze",
        help="compute report artifacts from recorded matches",
        epilog=epilog,
    )
    p.add_argument("--matches", required=True, help="match records JSONL path")
    p.add_argument(
        "--emit",
        default=",".join(ANALYZE_ARTIFACTS),
        help=f"comma-separated artifacts from: {', '.join(ANALYZE_ARTIFACTS)} (default all)",
    )
    p.add_argument("--outdir", required=True, help="directory for the artifact files")
    p.add_argument(
        "--agent",
        default=PLAYER_A,
        choices=(PLAYER_A, PLAYER_B),
        help="which side the pattern report follows (default A)",
    )
    p.add_argument("--top", type=int, default=10, help="patterns per scenario (default 10)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser(
        "validate",
        help="check a profile document against the schema and table contract",
        epilog=epilog,
    )
    p.add_argument("--profile", required=True, help="profile JSON path")
    p.set_defaults(func=cmd_validate)

    return parser


def run_cli(argv: Optional[List[str]] = None) -> int:
    """Dispatch one CLI invocation and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # --help and --version paths
        code = exc.code if isinstance(exc.code, int) else EXIT_OK
        return code
    except CliError as err:
        _emit_error(err.exit_code, err.kind, str(err))
        return err.exit_code
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to exit 5
        _emit_error(EXIT_INTERNAL, "internal", f"{type(exc).__name__}: {exc}")
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
