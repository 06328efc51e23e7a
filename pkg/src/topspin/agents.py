"""Shot-direction decision policies: profile-driven bots and MCTS agents.

The bot simply samples its profile's direction marginal. The MCTS agent
searches over its own future direction choices with an open-loop tree:
nodes track only the agent's decisions, while shot outcomes and opponent
replies are resampled from the skill profiles on every descent. Serve codes
(4-6) and rally codes (1-3) are disjoint, so a node reached after a serve
keeps separate child statistics for "second serve after a fault" and "third
shot after a return" even though both follow the same decision.

Search horizon is the current point with reward 1 for winning it, 0 for
losing. The agent's own shot outcomes, in search and in real play, come
from ``self_model``; the opponent is simulated from ``opponent_model``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .rules import PointWon, RallyState, advance_rally, current_context
from .shots import (
    HitterContext,
    SkillProfile,
    sample_direction,
    sample_outcome,
    supported_directions,
)


class AgentError(Exception):
    pass


class SearchError(AgentError):
    pass


class AgentSpecError(AgentError):
    """Unusable agent description in a config document."""


class SelectionPolicy(str, Enum):
    UCT = "uct"
    RANDOM = "random"
    GREEDY = "greedy"


class DecisionPolicy(str, Enum):
    GREEDY_VALUE = "greedy_value"  # argmax mean reward at the root
    MAX_VISITS = "max_visits"


@dataclass(frozen=True, eq=False)
class MCTSConfig:
    self_model: SkillProfile
    opponent_model: SkillProfile
    iterations: int = 1000
    exploration_c: float = math.sqrt(2)
    selection_policy: SelectionPolicy = SelectionPolicy.UCT
    decision_policy: DecisionPolicy = DecisionPolicy.GREEDY_VALUE
    rollout_cap: int = 200

    def __post_init__(self) -> None:
        if self.iterations <= 0:
            raise AgentSpecError("iterations must be positive")
        if self.exploration_c < 0:
            raise AgentSpecError("exploration constant must be >= 0")
        if self.rollout_cap <= 0:
            raise AgentSpecError("rollout cap must be positive")


@dataclass(slots=True)
class SearchNode:
    """MCTS statistics: ``wins`` accumulates point rewards over ``visits``.

    Children are keyed by the agent's own direction code. The root's visit
    count equals the iterations spent, so every node satisfies
    ``visits >= sum of child visits``.
    """

    visits: int = 0
    wins: float = 0.0
    children: Dict[int, "SearchNode"] = field(default_factory=dict)

    @property
    def mean(self) -> float:
        if self.visits == 0:
            raise SearchError("mean of an unvisited node")
        return self.wins / self.visits


def bot_decide(profile: SkillProfile, ctx: HitterContext, rng) -> int:
    """One draw from the profile's direction marginal for this context."""
    return sample_direction(profile, ctx, rng)


def uct_value(w: float, n: int, N: int, c: float) -> float:
    """w/n + c * sqrt(ln N / n); callers handle n = 0 before getting here."""
    if n <= 0 or N <= 0:
        raise SearchError("uct_value needs n >= 1 and N >= 1")
    return w / n + c * math.sqrt(math.log(N) / n)


def select_child(
    policy: SelectionPolicy,
    node: SearchNode,
    c: float,
    rng,
    among: Optional[Sequence[int]] = None,
) -> int:
    """Pick a child direction at ``node`` under the given selection policy.

    ``among`` restricts the choice to the directions legal right now; in
    the open-loop tree a node can hold children from differently-shaped
    continuations, so the restriction is per descent. UCT and Greedy try
    unvisited directions first (uniformly); Random ignores statistics
    entirely. Ties break uniformly via ``rng``.
    """
    legal = sorted(node.children) if among is None else sorted(among)
    if not legal:
        raise SearchError("no legal child directions to select")
    if policy is SelectionPolicy.RANDOM:
        return legal[rng.randrange(len(legal))]
    unvisited = [
        d for d in legal if d not in node.children or node.children[d].visits == 0
    ]
    if unvisited:
        return unvisited[rng.randrange(len(unvisited))]
    if policy is SelectionPolicy.UCT:
        scores = {
            d: uct_value(node.children[d].wins, node.children[d].visits, node.visits, c)
            for d in legal
        }
    else:
        scores = {d: node.children[d].mean for d in legal}
    best = max(scores.values())
    ties = [d for d in legal if scores[d] == best]
    return ties[rng.randrange(len(ties))]


def rollout(
    point_state: RallyState,
    self_model: SkillProfile,
    opponent_model: SkillProfile,
    rng,
    cap: int,
    agent: Optional[str] = None,
) -> float:
    """Play the point out with both players on their profile marginals.

    Returns 1.0 if ``agent`` (default: the player on strike at entry) wins
    the point, else 0.0. A rally reaching ``cap`` shots is scored against
    whoever would hit next, mirroring the match-play cap rule.
    """
    if point_state.finished:
        raise SearchError("rollout needs a live point")
    me = agent if agent is not None else point_state.hitter
    state = point_state
    while True:
        if state.shot_count >= cap:
            return 1.0 if state.hitter != me else 0.0
        model = self_model if state.hitter == me else opponent_model
        ctx = current_context(state)
        direction = bot_decide(model, ctx, rng)
        outcome = sample_outcome(model, ctx, direction, rng)
        state, event = advance_rally(state, direction, outcome)
        if isinstance(event, PointWon):
            return 1.0 if event.player == me else 0.0


def _search_iteration(
    root: SearchNode, rally: RallyState, me: str, config: MCTSConfig, rng
) -> None:
    """One descend / expand / rollout / backpropagate pass."""
    node = root
    path: List[SearchNode] = [root]
    state = rally
    reward: Optional[float] = None
    while reward is None:
        if state.shot_count >= config.rollout_cap:
            reward = 1.0 if state.hitter != me else 0.0
            break
        ctx = current_context(state)
        if state.hitter == me:
            legal = supported_directions(config.self_model, ctx)
            direction = select_child(
                config.selection_policy, node, config.exploration_c, rng, among=legal
            )
            child = node.children.get(direction)
            if child is None:
                child = SearchNode()
                node.children[direction] = child
            fresh = child.visits == 0
            node = child
            path.append(child)
            outcome = sample_outcome(config.self_model, ctx, direction, rng)
            state, event = advance_rally(state, direction, outcome)
            if isinstance(event, PointWon):
                reward = 1.0 if event.player == me else 0.0
            elif fresh:
                reward = rollout(
                    state,
                    config.self_model,
                    config.opponent_model,
                    rng,
                    config.rollout_cap,
                    agent=me,
                )
        else:
            direction = bot_decide(config.opponent_model, ctx, rng)
            outcome = sample_outcome(config.opponent_model, ctx, direction, rng)
            state, event = advance_rally(state, direction, outcome)
            if isinstance(event, PointWon):
                reward = 1.0 if event.player == me else 0.0
    for visited in path:
        visited.visits += 1
        visited.wins += reward


def mcts_search(rally: RallyState, config: MCTSConfig, rng) -> SearchNode:
    """Run the configured number of iterations and return the root node."""
    if rally.finished:
        raise SearchError("cannot search a finished rally")
    me = rally.hitter
    root = SearchNode()
    for _ in range(config.iterations):
        _search_iteration(root, rally, me, config, rng)
    return root


def mcts_decide(rally: RallyState, config: MCTSConfig, rng) -> int:
    """Search, then apply the decision policy to the root's children.

    GreedyValue takes the highest mean reward, MaxVisits the most-visited
    child; ties break uniformly. Only visited children are candidates, so
    tiny iteration budgets still return a legal direction.
    """
    root = mcts_search(rally, config, rng)
    candidates = [d for d in sorted(root.children) if root.children[d].visits > 0]
    if not candidates:
        legal = supported_directions(config.self_model, current_context(rally))
        return legal[rng.randrange(len(legal))]
    if config.decision_policy is DecisionPolicy.MAX_VISITS:
        score = {d: float(root.children[d].visits) for d in candidates}
    else:
        score = {d: root.children[d].mean for d in candidates}
    best = max(score.values())
    ties = [d for d in candidates if score[d] == best]
    return ties[rng.randrange(len(ties))]


# --- agents and their config-file descriptions ------------------------------


class Agent:
    """Direction chooser. ``legal`` lists the hitter's supported codes."""

    def choose(self, rally: RallyState, ctx: HitterContext, legal: Tuple[int, ...], rng) -> int:
        raise NotImplementedError


class BotAgent(Agent):
    """Plays the profile's direction marginal, the data-driven baseline."""

    def __init__(self, profile: SkillProfile):
        self.profile = profile

    def choose(self, rally: RallyState, ctx: HitterContext, legal: Tuple[int, ...], rng) -> int:
        return bot_decide(self.profile, ctx, rng)


class UniformRandomAgent(Agent):
    def choose(self, rally: RallyState, ctx: HitterContext, legal: Tuple[int, ...], rng) -> int:
        if not legal:
            raise AgentError("no legal directions to choose from")
        return legal[rng.randrange(len(legal))]


class MctsAgent(Agent):
    def __init__(self, config: MCTSConfig):
        self.config = config

    def choose(self, rally: RallyState, ctx: HitterContext, legal: Tuple[int, ...], rng) -> int:
        return mcts_decide(rally, self.config, rng)


class AgentKind(str, Enum):
    BOT = "bot"
    MCTS = "mcts"
    UNIFORM_RANDOM = "uniform_random"


@dataclass(frozen=True, eq=False)
class AgentSpec:
    """One resolved agent definition: exactly one kind with its models.

    ``profile`` is the outcome model for bot and uniform_random kinds (for
    the bot it is also the policy); MCTS carries its models inside
    ``mcts``. ``source`` keeps the config-file form for match records.
    """

    kind: AgentKind
    profile: Optional[SkillProfile] = None
    mcts: Optional[MCTSConfig] = None
    source: Optional[dict] = None

    def __post_init__(self) -> None:
        if self.kind is AgentKind.MCTS:
            if self.mcts is None or self.profile is not None:
                raise AgentSpecError("mcts agents take an MCTSConfig and no bare profile")
        else:
            if self.profile is None or self.mcts is not None:
                raise AgentSpecError(f"{self.kind.value} agents take a profile and no MCTSConfig")


def build_agent(spec: AgentSpec) -> Tuple[Agent, SkillProfile]:
    """The playable agent plus the profile that decides its shot outcomes."""
    if spec.kind is AgentKind.BOT:
        return BotAgent(spec.profile), spec.profile
    if spec.kind is AgentKind.UNIFORM_RANDOM:
        return UniformRandomAgent(), spec.profile
    return MctsAgent(spec.mcts), spec.mcts.self_model


def agent_spec_from_json(
    doc: dict, load: Callable[[str], SkillProfile]
) -> AgentSpec:
    """Resolve a config-document agent entry.

    ``load`` maps a profile reference string (usually a path) to a
    SkillProfile; the caller owns relative-path resolution and caching.
    Example document: ``{"kind": "mcts", "iterations": 1000, "c": 1.4142,
    "selection": "uct", "decision": "greedy_value", "self_model":
    "avg.json", "opponent_model": "djokovic.json"}``.
    """
    if not isinstance(doc, dict):
        raise AgentSpecError("agent entry must be an object")
    try:
        kind = AgentKind(doc.get("kind"))
    except ValueError:
        raise AgentSpecError(f"unknown agent kind {doc.get('kind')!r}") from None
    try:
        if kind is AgentKind.MCTS:
            config = MCTSConfig(
                self_model=load(doc["self_model"]),
                opponent_model=load(doc["opponent_model"]),
                iterations=int(doc.get("iterations", 1000)),
                exploration_c=float(doc.get("c", math.sqrt(2))),
                selection_policy=SelectionPolicy(doc.get("selection", "uct")),
                decision_policy=DecisionPolicy(doc.get("decision", "greedy_value")),
                rollout_cap=int(doc.get("rollout_cap", 200)),
            )
            return AgentSpec(kind, mcts=config, source=dict(doc))
        return AgentSpec(kind, profile=load(doc["profile"]), source=dict(doc))
    except KeyError as exc:
        raise AgentSpecError(f"agent entry is missing {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise AgentSpecError(f"bad agent entry: {exc}") from None


def describe_agent(spec: AgentSpec) -> dict:
    """Config-file shaped description for embedding in match records."""
    if spec.source is not None:
        return dict(spec.source)
    if spec.kind is AgentKind.MCTS:
        cfg = spec.mcts
        return {
            "kind": "mcts",
            "iterations": cfg.iterations,
            "c": cfg.exploration_c,
            "selection": cfg.selection_policy.value,
            "decision": cfg.decision_policy.value,
            "rollout_cap": cfg.rollout_cap,
            "self_model": cfg.self_model.provenance or "unnamed",
            "opponent_model": cfg.opponent_model.provenance or "unnamed",
        }
    return {"kind": spec.kind.value, "profile": spec.profile.provenance or "unnamed"}
