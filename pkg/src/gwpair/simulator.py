"""Dyadic speed-date simulation: pairing, sessions, matches, export.

An event snapshots every agent, runs all eligible pairs' sessions against
that frozen snapshot (optionally in parallel), then commits preference
updates sequentially in pair-list order. Batch size therefore only controls
throughput: exports are byte-identical for any batch size given the same
seed and scripted provider.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .agent import AgentState, CognitiveConfig, process_turn, update_preferences
from .errors import ConfigError, ContractViolation, ProviderError
from .memory import MemoryStore, SEMANTIC
from .types import ATTRIBUTES, EMOTION, DatingAttributes, PersonalityProfile
from .workspace import CycleTrace, GlobalWorkspace

log = logging.getLogger(__name__)

CONTEXT_GROUPS: dict[str, tuple[str, ...]] = {
    "physical": ("spatial_layout", "proximity", "sensory_conditions"),
    "temporal": ("duration", "pacing", "sequence_structure"),
    "social": ("group_size", "relationship_dynamics", "power_structure"),
    "cultural": ("normative_expectations", "communication_styles"),
}

DEFAULT_CONTEXT: dict[str, str] = {
    "spatial_layout": "bar-restaurant tables",
    "proximity": "seated across a small table",
    "sensory_conditions": "dim lighting, light background chatter",
    "duration": "4 minutes",
    "pacing": "quick alternating exchanges",
    "sequence_structure": "introductions, shared interests, closing impressions",
    "group_size": "two participants",
    "relationship_dynamics": "strangers on a first speed date",
    "power_structure": "equal footing",
    "normative_expectations": "friendly, respectful first-date etiquette",
    "communication_styles": "casual conversational small talk",
}

DEFAULT_ROUNDS = 8


@dataclass
class SessionContext:
    physical: dict[str, str]
    temporal: dict[str, str]
    social: dict[str, str]
    cultural: dict[str, str]
    rounds: int = DEFAULT_ROUNDS

    def __post_init__(self):
        for group, keys in CONTEXT_GROUPS.items():
            mapping = getattr(self, group)
            missing = set(keys) - set(mapping)
            if missing:
                raise ContractViolation(f"context {group} missing keys: {sorted(missing)}")
        if self.rounds < 1:
            raise ContractViolation("rounds must be >= 1")

    def scene_prompt(self) -> str:
        """Natural-language scene description carrying every parameter."""
        p, t, s, c = self.physical, self.temporal, self.social, self.cultural
        return (
            f"Scene: {p['spatial_layout']}, {p['proximity']}, with {p['sensory_conditions']}. "
            f"The interaction lasts {t['duration']} at a pace of {t['pacing']}, "
            f"structured as {t['sequence_structure']}. "
            f"Participants: {s['group_size']}, {s['relationship_dynamics']}, {s['power_structure']}. "
            f"Expected conduct: {c['normative_expectations']}, using {c['communication_styles']}."
        )


def build_context(config: dict | None = None) -> SessionContext:
    """Context from overrides on top of the defaults. Unknown keys fail."""
    config = dict(config or {})
    rounds = config.pop("rounds", DEFAULT_ROUNDS)
    valid = set(DEFAULT_CONTEXT)
    unknown = set(config) - valid
    if unknown:
        raise ConfigError(
            f"unknown context keys {sorted(unknown)}; valid keys: {sorted(valid | {'rounds'})}"
        )
    merged = {**DEFAULT_CONTEXT, **{k: str(v) for k, v in config.items()}}
    return SessionContext(
        physical={k: merged[k] for k in CONTEXT_GROUPS["physical"]},
        temporal={k: merged[k] for k in CONTEXT_GROUPS["temporal"]},
        social={k: merged[k] for k in CONTEXT_GROUPS["social"]},
        cultural={k: merged[k] for k in CONTEXT_GROUPS["cultural"]},
        rounds=int(rounds),
    )


@dataclass
class EvaluationScores:
    """Session-quality dimensions plus attribute ratings of the partner."""

    e_attr: float = 0.5
    e_similar: float = 0.5
    e_comfort: float = 0.5
    e_interest: float = 0.5
    partner_ratings: dict[str, float] = field(default_factory=dict)
    overall_liking: float = 5.5

    def validate(self) -> None:
        for name in ("e_attr", "e_similar", "e_comfort", "e_interest"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ContractViolation(f"{name}={v} outside [0, 1]")
        missing = set(ATTRIBUTES) - set(self.partner_ratings)
        if missing:
            raise ContractViolation(f"partner ratings missing: {sorted(missing)}")
        for a, v in self.partner_ratings.items():
            if not 1.0 <= v <= 10.0:
                raise ContractViolation(f"partner rating {a}={v} outside [1, 10]")
        if not 1.0 <= self.overall_liking <= 10.0:
            raise ContractViolation("overall_liking outside [1, 10]")

    def evaluation_mean(self) -> float:
        return (self.e_attr + self.e_similar + self.e_comfort + self.e_interest) / 4.0

    def to_json(self) -> dict:
        return {
            "e_attr": self.e_attr,
            "e_similar": self.e_similar,
            "e_comfort": self.e_comfort,
            "e_interest": self.e_interest,
            "partner_ratings": dict(self.partner_ratings),
            "overall_liking": self.overall_liking,
        }


@dataclass
class ConversationTurn:
    speaker: str
    kind: str  # "query" | "response"
    text: str

    def to_json(self) -> dict:
        return {"speaker": self.speaker, "kind": self.kind, "text": self.text}


@dataclass
class SessionRecord:
    pair: tuple[str, str]
    turns: list[ConversationTurn] = field(default_factory=list)
    evaluations: dict[str, EvaluationScores] = field(default_factory=dict)
    compatibility: dict[str, float] = field(default_factory=dict)
    decisions: dict[str, bool] = field(default_factory=dict)
    traces: dict[str, list[CycleTrace]] = field(default_factory=dict)
    aborted: bool = False
    abort_reason: str = ""

    def to_json(self) -> dict:
        return {
            "pair": list(self.pair),
            "turns": [t.to_json() for t in self.turns],
            "evaluations": {k: v.to_json() for k, v in self.evaluations.items()},
            "compatibility": dict(self.compatibility),
            "decisions": dict(self.decisions),
            "aborted": self.aborted,
            "abort_reason": self.abort_reason,
        }


@dataclass
class MatchMatrix:
    decisions: dict[str, dict[str, bool]]
    matches: dict[tuple[str, str], bool]


def heterosexual(a: AgentState, b: AgentState) -> bool:
    return bool(a.gender and b.gender and a.gender != b.gender)


def generate_pairs(agents: list[AgentState], criteria) -> list[tuple[str, str]]:
    """All unordered pairs passing the criteria predicate, in pool order."""
    if len(agents) < 2:
        raise ContractViolation("need at least two agents")
    pairs = []
    for i, a in enumerate(agents):
        for b in agents[i + 1 :]:
            if criteria(a, b):
                pairs.append((a.agent_id, b.agent_id))
    if not pairs:
        log.warning("no eligible pairs for %d agents", len(agents))
    return pairs


def decide(score: float, threshold: float) -> bool:
    if not 0.0 <= threshold <= 1.0:
        raise ContractViolation("threshold must be in [0, 1]")
    return score >= threshold


def build_match_matrix(decisions: dict[str, dict[str, bool]]) -> MatchMatrix:
    """matches[(i, j)] = decisions[i][j] AND decisions[j][i], symmetric."""
    matches: dict[tuple[str, str], bool] = {}
    for i, row in decisions.items():
        for j in row:
            if j in decisions and i in decisions[j]:
                m = decisions[i][j] and decisions[j][i]
                matches[(i, j)] = m
                matches[(j, i)] = m
    return MatchMatrix(decisions=decisions, matches=matches)


def evaluate_compatibility(
    agent: AgentState,
    partner: AgentState,
    history: list[tuple[str, str]],
    evaluation: EvaluationScores | None = None,
) -> tuple[float, EvaluationScores]:
    """Blend importance-weighted partner ratings with the session-quality mean.

    score = 0.5 * sum(importance[a]/100 * rating[a]/10) + 0.5 * mean(e_*).
    The evaluation is written to the agent's memory.
    """
    if evaluation is None:
        evaluation = EvaluationScores(partner_ratings=dict(partner.attributes.self_ratings))
    evaluation.validate()
    weighted = sum(
        agent.attributes.importance[a] / 100.0 * evaluation.partner_ratings[a] / 10.0
        for a in ATTRIBUTES
    )
    score = 0.5 * weighted + 0.5 * evaluation.evaluation_mean()
    if agent.memory is not None:
        agent.memory.store(
            content=f"Evaluated {partner.agent_id}: score {score:.3f}, "
            f"liking {evaluation.overall_liking:.1f}",
            kind=SEMANTIC,
        )
    return score, evaluation


def _update_attraction(
    state: EvaluationScores, emotion_payload: dict[str, float], importance: dict[str, float]
) -> None:
    """Revise the running evaluation from the latest exchange's emotion."""
    v = float(emotion_payload.get("valence", 0.0))
    u = float(emotion_payload.get("arousal", 0.0))
    clamp01 = lambda x: min(1.0, max(0.0, x))
    state.e_attr = clamp01(state.e_attr + 0.10 * v)
    state.e_similar = clamp01(state.e_similar + 0.08 * v)
    state.e_comfort = clamp01(state.e_comfort + 0.10 * v)
    state.e_interest = clamp01(state.e_interest + 0.10 * u * (1.0 if v >= 0 else -1.0))
    mean_importance = 100.0 / len(ATTRIBUTES)
    for a in ATTRIBUTES:
        rel = importance[a] / mean_importance
        state.partner_ratings[a] = min(
            10.0, max(1.0, state.partner_ratings[a] + 0.4 * v * rel)
        )
    state.overall_liking = min(10.0, max(1.0, state.overall_liking + 0.5 * v))


def _clone_for_session(agent: AgentState, provider) -> AgentState:
    memory = None
    if agent.memory is not None:
        memory = MemoryStore(provider=provider, items=list(agent.memory.items))
        memory._next_id = agent.memory._next_id
        memory._episodic_count = agent.memory._episodic_count
        memory._dim = agent.memory._dim
    return AgentState(
        agent_id=agent.agent_id,
        profile=PersonalityProfile(**agent.profile.as_dict(), mbti_label=agent.profile.mbti_label),
        attributes=agent.attributes.copy(),
        gender=agent.gender,
        memory=memory,
        gw=GlobalWorkspace(),
        meta=dict(agent.meta),
    )


def _utterance(
    agent: AgentState,
    instruction: str,
    history: list[tuple[str, str]],
    provider,
    config: CognitiveConfig,
) -> tuple[str, list[CycleTrace], dict[str, float]]:
    text, traces, _ = process_turn(agent, instruction, history, provider, config)
    emotion_payload = agent.meta.get("last_emotion_payload", {})
    return text, traces, emotion_payload


def run_session(
    agent_i: AgentState,
    agent_j: AgentState,
    ctx: SessionContext,
    provider,
    config: CognitiveConfig | None = None,
    threshold: float = 0.5,
    full_final_round: bool = False,
) -> SessionRecord:
    """One dyadic conversation: alternating query/response rounds, running
    attraction updates, final compatibility scores and decisions.

    The final round skips the second exchange (so a session has
    ``4 * rounds - 2`` turns) unless ``full_final_round`` is set.
    """
    if agent_i.agent_id == agent_j.agent_id:
        raise ContractViolation("agents in a session must be distinct")
    config = config or CognitiveConfig()
    record = SessionRecord(pair=(agent_i.agent_id, agent_j.agent_id))
    record.traces = {agent_i.agent_id: [], agent_j.agent_id: []}
    scene = ctx.scene_prompt()
    history: list[tuple[str, str]] = []
    attraction = {
        agent_i.agent_id: EvaluationScores(partner_ratings=dict(agent_j.attributes.self_ratings)),
        agent_j.agent_id: EvaluationScores(partner_ratings=dict(agent_i.attributes.self_ratings)),
    }

    def speak(speaker: AgentState, kind: str, instruction: str) -> dict[str, float]:
        text, traces, emotion = _utterance(speaker, instruction, history, provider, config)
        record.traces[speaker.agent_id].extend(traces)
        record.turns.append(ConversationTurn(speaker.agent_id, kind, text))
        history.append((speaker.agent_id, text))
        return emotion

    emotions = {agent_i.agent_id: {}, agent_j.agent_id: {}}
    for r in range(1, ctx.rounds + 1):
        ask_i = f"{scene}\nAsk your date something engaging (round {r})."
        emotions[agent_i.agent_id] = speak(agent_i, "query", ask_i)
        last_query = record.turns[-1].text
        emotions[agent_j.agent_id] = speak(agent_j, "response", last_query)
        if full_final_round or r < ctx.rounds:
            ask_j = f"{scene}\nAsk your date something engaging (round {r})."
            emotions[agent_j.agent_id] = speak(agent_j, "query", ask_j)
            last_query = record.turns[-1].text
            emotions[agent_i.agent_id] = speak(agent_i, "response", last_query)
        _update_attraction(
            attraction[agent_i.agent_id], emotions[agent_i.agent_id], agent_i.attributes.importance
        )
        _update_attraction(
            attraction[agent_j.agent_id], emotions[agent_j.agent_id], agent_j.attributes.importance
        )

    for agent, partner in ((agent_i, agent_j), (agent_j, agent_i)):
        score, evaluation = evaluate_compatibility(
            agent, partner, history, attraction[agent.agent_id]
        )
        record.compatibility[agent.agent_id] = score
        record.evaluations[agent.agent_id] = evaluation
        record.decisions[agent.agent_id] = decide(score, threshold)
    return record


@dataclass
class EventResult:
    participants: list[AgentState]
    sessions: list[SessionRecord]
    matches: MatchMatrix
    snapshots_t1: dict[str, dict]
    snapshots_t2: dict[str, dict]
    aborted: list[SessionRecord] = field(default_factory=list)

    def all_traces(self) -> list[CycleTrace]:
        out = []
        for s in self.sessions:
            for agent_id in sorted(s.traces):
                out.extend(s.traces[agent_id])
        return out


def _snapshot(agent: AgentState) -> dict:
    return {
        "self_ratings": dict(agent.attributes.self_ratings),
        "importance": dict(agent.attributes.importance),
        "traits": agent.profile.as_dict(),
    }


def run_event(
    pool: list[AgentState],
    ctx: SessionContext,
    provider,
    config: CognitiveConfig | None = None,
    criteria=heterosexual,
    batch_size: int = 4,
    threshold: float = 0.5,
    workers: int = 1,
    full_final_round: bool = False,
    progress=None,
) -> EventResult:
    """Simulate every eligible pair exactly once and commit updates.

    Sessions read the event-start snapshot of every agent, so batches can
    run concurrently; preference updates are computed per session and
    applied to the live pool sequentially in pair-list order afterwards.
    Sessions that lose their provider are retried once, then reported in
    ``aborted``.
    """
    if batch_size < 1:
        raise ContractViolation("batch_size must be >= 1")
    config = config or CognitiveConfig()
    by_id = {a.agent_id: a for a in pool}
    snapshots_t1 = {a.agent_id: _snapshot(a) for a in pool}
    if len(pool) < 2:
        return EventResult(pool, [], build_match_matrix({}), snapshots_t1, dict(snapshots_t1))
    pairs = generate_pairs(pool, criteria)

    def attempt(pair: tuple[str, str]) -> SessionRecord:
        a = _clone_for_session(by_id[pair[0]], provider)
        b = _clone_for_session(by_id[pair[1]], provider)
        try:
            return run_session(a, b, ctx, provider, config, threshold, full_final_round)
        except ProviderError as exc:
            rec = SessionRecord(pair=pair, aborted=True, abort_reason=str(exc))
            rec.traces = {pair[0]: getattr(exc, "partial_trace", []), pair[1]: []}
            return rec

    records: dict[tuple[str, str], SessionRecord] = {}
    done = 0
    for start in range(0, len(pairs), batch_size):
        batch = pairs[start : start + batch_size]
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool_exec:
                results = list(pool_exec.map(attempt, batch))
        else:
            results = [attempt(p) for p in batch]
        for pair, rec in zip(batch, results):
            if rec.aborted:
                retry = attempt(pair)  # one retry per aborted pair
                if not retry.aborted:
                    rec = retry
            records[pair] = rec
            done += 1
            if progress is not None:
                progress(done / len(pairs))

    sessions = [records[p] for p in pairs if not records[p].aborted]
    aborted = [records[p] for p in pairs if records[p].aborted]

    decisions: dict[str, dict[str, bool]] = {a.agent_id: {} for a in pool}
    for rec in sessions:
        i, j = rec.pair
        decisions[i][j] = rec.decisions[i]
        decisions[j][i] = rec.decisions[j]
    matches = build_match_matrix(decisions)

    # Commit phase: deterministic pair-list order regardless of batching.
    for pair in pairs:
        rec = records[pair]
        if rec.aborted:
            continue
        success = (rec.compatibility[pair[0]] + rec.compatibility[pair[1]]) / 2.0
        for agent_id, partner_id in (pair, pair[::-1]):
            agent = by_id[agent_id]
            evidence = rec.evaluations[agent_id].partner_ratings
            agent.attributes, agent.profile = update_preferences(
                agent.attributes, agent.profile, evidence, success, config.eta
            )
            if agent.memory is not None:
                agent.memory.store(
                    content=f"Session with {partner_id}: compatibility "
                    f"{rec.compatibility[agent_id]:.3f}, matched={matches.matches.get(pair, False)}",
                    kind=SEMANTIC,
                )

    snapshots_t2 = {a.agent_id: _snapshot(a) for a in pool}
    return EventResult(pool, sessions, matches, snapshots_t1, snapshots_t2, aborted)


def event_to_json(result: EventResult) -> dict:
    participants = []
    for agent in result.participants:
        participants.append(
            {
                "agent_id": agent.agent_id,
                "gender": agent.gender,
                "t1": result.snapshots_t1[agent.agent_id],
                "t2": result.snapshots_t2[agent.agent_id],
            }
        )
    match_list = sorted({tuple(sorted(k)) for k, v in result.matches.matches.items() if v})
    return {
        "participants": participants,
        "sessions": [s.to_json() for s in result.sessions],
        "aborted": [s.to_json() for s in result.aborted],
        "decisions": result.matches.decisions,
        "matches": [list(m) for m in match_list],
    }


def export_event_json(result: EventResult, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(event_to_json(result), fh, sort_keys=True, indent=2)
        fh.write("\n")


def event_csv_summary(result: EventResult) -> str:
    """One row per session: ids, scores, decisions, match."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["agent_i", "agent_j", "score_i", "score_j", "decision_i", "decision_j", "match"]
    )
    for rec in result.sessions:
        i, j = rec.pair
        writer.writerow(
            [
                i,
                j,
                f"{rec.compatibility[i]:.6f}",
                f"{rec.compatibility[j]:.6f}",
                rec.decisions[i],
                rec.decisions[j],
                result.matches.matches.get((i, j), False),
            ]
        )
    return buf.getvalue()
