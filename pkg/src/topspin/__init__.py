"""Tennis as a shot-direction game: simulation, data-driven bots, MCTS agents.

The model treats each shot as a chosen direction plus a stochastic outcome
(error, winner, or still in play) conditioned on the hitter's situation.
Skill profiles hold those conditional tables, built from shot-by-shot
charting data; agents choose directions on top of them; the harness plays
seeded matches; analytics turns the records into report artifacts.
"""

from .shots import (
    ALL_CONTEXTS,
    CONTEXT_COUNT,
    Direction,
    HitterContext,
    all_contexts,
    IllegalDirectionError,
    Outcome,
    PROBABILITY_COUNT,
    RallyContext,
    ReturnContext,
    ServeContext,
    ServeNumber,
    ShotModelError,
    Side,
    SkillProfile,
    UnknownContextError,
    UnsupportedDirectionError,
    ValidationIssue,
    ValidationReport,
    context_from_key,
    context_key,
    direction_codes,
    direction_marginal,
    outcome_conditional,
    profile_from_rows,
    profiles_equal,
    rally_context,
    return_context,
    sample_direction,
    sample_outcome,
    serve_context,
    supported_directions,
    uniform_profile,
    validate_profile,
)
from .rules import (
    Continue,
    IllegalShotError,
    InvalidConfigError,
    MatchConfig,
    MatchOverError,
    MatchScore,
    PLAYER_A,
    PLAYER_B,
    PLAYERS,
    PointWon,
    RallyState,
    RulesError,
    SecondServe,
    advance_rally,
    apply_point,
    current_context,
    match_winner,
    new_match,
    other,
    rally_length,
    render_points,
    render_score,
    serve_side,
    start_rally,
)
from .ingest import (
    CountTables,
    IngestError,
    IngestReport,
    ParseError,
    ParsedRally,
    PlayerFilter,
    ProfileBuildError,
    ProfileSchemaError,
    RallyRow,
    Smoothing,
    classify_shots,
    finalize_profile,
    ingest_corpus,
    ingest_csv,
    load_column_mapping,
    load_profile,
    merge_counts,
    parse_rally_string,
    parse_row,
    read_rally_rows,
    save_profile,
    save_report,
)
from .agents import (
    Agent,
    AgentError,
    AgentKind,
    AgentSpec,
    AgentSpecError,
    BotAgent,
    DecisionPolicy,
    MCTSConfig,
    MctsAgent,
    SearchError,
    SearchNode,
    SelectionPolicy,
    UniformRandomAgent,
    agent_spec_from_json,
    bot_decide,
    build_agent,
    describe_agent,
    mcts_decide,
    mcts_search,
    rollout,
    select_child,
    uct_value,
)
from .harness import (
    BatchConfig,
    BatchSummary,
    HarnessError,
    MatchRecord,
    PointRecord,
    ShotRecord,
    first_server_for,
    iter_match_records,
    match_config_from_json,
    match_config_to_json,
    match_from_json,
    match_record_to_line,
    match_to_json,
    play_match,
    play_point,
    read_match_records,
    replay_final_score,
    run_batch,
    split_seed,
    summarize_batch,
    summary_to_json,
    wilson_interval,
    write_batch_summary,
    write_match_records,
)
from .analytics import (
    AnalyticsError,
    Histogram,
    ShotPattern,
    SideSummary,
    SweepRow,
    histogram_distance,
    histogram_from_percentages,
    rally_length_distribution,
    sweep_report,
    top_patterns,
    win_summary,
)

__version__ = "0.1.0"
