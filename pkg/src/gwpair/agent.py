"""Single-agent turn processing: the competition loop.

One turn runs up to ``max_iterations`` cycles. Each cycle processes the
query through all five modules, scores salience, averages it with the
personality weights, damps conflicting modules, broadcasts the winner's
content (or the conflict synthesis), and checks payload convergence
against the previous cycle. The integrated response is then generated,
consolidated into episodic memory, and preferences are updated by the
caller once interaction success is known.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .conflict import ConflictConfig, detect_conflicts, resolve_conflict
from .errors import ContractViolation, ProviderError
from .memory import MemoryStore
from .modules import run_cognitive_module
from .providers import GenerationRequest
from .salience import SalienceConfig, compute_salience, personality_weights
from .types import (
    ATTRIBUTES,
    EMOTION,
    IMPORTANCE_TOTAL,
    MODULE_ORDER,
    DatingAttributes,
    ModuleResponse,
    PersonalityProfile,
    SalienceVector,
    require_five,
)
from .workspace import CycleTrace, GlobalWorkspace

log = logging.getLogger(__name__)

RESPONSE_CALL_TEMPERATURE = 0.7


@dataclass
class CognitiveConfig:
    """Algorithm parameters for one agent's competition loop."""

    salience: SalienceConfig = field(default_factory=SalienceConfig)
    conflict: ConflictConfig = field(default_factory=ConflictConfig)
    epsilon: float = 0.05
    max_iterations: int = 3
    eta: float = 0.1
    retrieval_k: int = 4

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ContractViolation("max_iterations must be >= 1")
        if self.epsilon <= 0:
            raise ContractViolation("epsilon must be positive")
        if not 0.0 < self.eta <= 1.0:
            raise ContractViolation("eta must be in (0, 1]")


@dataclass
class AgentState:
    """Everything one agent owns: profile, preferences, memory, workspace."""

    agent_id: str
    profile: PersonalityProfile
    attributes: DatingAttributes
    gender: str = ""
    memory: MemoryStore | None = None
    gw: GlobalWorkspace = field(default_factory=GlobalWorkspace)
    meta: dict = field(default_factory=dict)


def check_convergence(
    prev: list[ModuleResponse], curr: list[ModuleResponse], epsilon: float
) -> bool:
    """True iff no payload key of any module moved by epsilon or more (L-inf,
    absent keys read as 0)."""
    if epsilon <= 0:
        raise ContractViolation("epsilon must be positive")
    prev_by = require_five(prev)
    curr_by = require_five(curr)
    worst = 0.0
    for kind in MODULE_ORDER:
        a, b = prev_by[kind].payload, curr_by[kind].payload
        for key in set(a) | set(b):
            worst = max(worst, abs(a.get(key, 0.0) - b.get(key, 0.0)))
    return worst < epsilon


def integrate_outputs(
    responses: list[ModuleResponse],
    salience: SalienceVector,
    profile: PersonalityProfile,
    gw: GlobalWorkspace,
    provider,
    weights: dict[str, float] | None = None,
    query: str = "",
    history: list[tuple[str, str]] | None = None,
    temperature: float = RESPONSE_CALL_TEMPERATURE,
) -> tuple[str, dict[str, float]]:
    """Average salience with personality weights and generate the response.

    ``weights`` overrides the prompt annotation weights (used after conflict
    adjustment); the returned combined weights are always the plain average.
    """
    by_kind = require_five(responses)
    pw = personality_weights(profile)
    combined = {m: (salience.normalized[m] + pw[m]) / 2.0 for m in MODULE_ORDER}
    prompt_weights = weights if weights is not None else combined

    lines = ["You are a cognitive agent with the following personality:"]
    for trait, value in profile.as_dict().items():
        lines.append(f"- {trait.capitalize()}: {value:.2f}")
    ordered = sorted(MODULE_ORDER, key=lambda m: (-prompt_weights[m], MODULE_ORDER.index(m)))
    for m in ordered:
        label = m.replace("_", " ").upper()
        lines.append(f"[{label} MODULE] (Contribution: {prompt_weights[m]:.2f}): {by_kind[m].content}")
    if gw.broadcast_content:
        lines.append(f"Current workspace focus: {gw.broadcast_content}")
    if history:
        lines.append("Conversation so far:")
        lines.extend(f"  {speaker}: {text}" for speaker, text in history[-8:])
    lines.append("Weigh each module's contribution accordingly and answer in character.")

    request = GenerationRequest(
        system_prompt="\n".join(lines),
        messages=[("user", query or gw.broadcast_content or "Respond.")],
        temperature=temperature,
    )
    text, _ = provider.generate(request)
    return text, combined


def update_preferences(
    attrs: DatingAttributes,
    profile: PersonalityProfile,
    partner_evidence: dict[str, float],
    success: float,
    eta: float,
) -> tuple[DatingAttributes, PersonalityProfile]:
    """Evolve preferences from one interaction's outcome.

    Success above 0.5 reinforces the attributes the partner evidenced
    (multiplicative importance update, renormalized to the 100-point
    budget), nudges self-ratings toward the evidence, and drifts traits by
    at most ``eta * 0.05`` (extraversion up, neuroticism down on success;
    reversed on failure). A neutral outcome (success = 0.5) changes nothing.
    """
    if not 0.0 < eta <= 1.0:
        raise ContractViolation("eta must be in (0, 1]")
    missing = set(ATTRIBUTES) - set(partner_evidence)
    if missing:
        raise ContractViolation(f"evidence missing attributes: {sorted(missing)}")
    signal = 2.0 * success - 1.0
    if signal == 0.0:
        return attrs.copy(), PersonalityProfile(**profile.as_dict(), mbti_label=profile.mbti_label)

    def relevance(a: str) -> float:
        return (partner_evidence[a] - 5.5) / 4.5

    importance = {
        a: attrs.importance[a] * (1.0 + eta * signal * relevance(a)) for a in ATTRIBUTES
    }
    total = sum(importance.values())
    importance = {a: v * IMPORTANCE_TOTAL / total for a, v in importance.items()}

    ratings = {
        a: min(10.0, max(1.0, r + eta * signal * 0.1 * (partner_evidence[a] - r)))
        for a, r in attrs.self_ratings.items()
    }

    drift = eta * 0.05 * signal
    traits = profile.as_dict()
    traits["extraversion"] = min(1.0, max(0.0, traits["extraversion"] + drift))
    traits["neuroticism"] = min(1.0, max(0.0, traits["neuroticism"] - drift))
    return (
        DatingAttributes(ratings, importance),
        PersonalityProfile(**traits, mbti_label=profile.mbti_label),
    )


def process_turn(
    agent: AgentState,
    query: str,
    history: list[tuple[str, str]] | None = None,
    provider=None,
    config: CognitiveConfig | None = None,
) -> tuple[str, list[CycleTrace], AgentState]:
    """Run one full turn of the competition loop for ``agent``.

    Returns the integrated response, the traces of every executed cycle,
    and the (mutated) agent. Provider errors propagate with the partial
    trace attached on the exception.
    """
    if history is None:
        history = []
    config = config or CognitiveConfig()
    traces: list[CycleTrace] = []
    prev: list[ModuleResponse] | None = None
    responses: list[ModuleResponse] = []
    salience = None
    adjusted: dict[str, float] = {}

    memory_context = ""
    if agent.memory is not None and agent.memory.items:
        retrieved = agent.memory.retrieve(query, config.retrieval_k, agent.profile.openness)
        memory_context = "\n".join(it.content for it in retrieved)
        working = agent.memory.working_context()
        if working:
            memory_context = (memory_context + "\n" + working).strip()

    try:
        for iteration in range(1, config.max_iterations + 1):
            responses = [
                run_cognitive_module(
                    kind, query, history, agent.gw, agent.profile, provider, memory_context
                )
                for kind in MODULE_ORDER
            ]
            salience = compute_salience(responses, agent.profile, agent.gw, config.salience)
            pw = personality_weights(agent.profile)
            combined = {m: (salience.normalized[m] + pw[m]) / 2.0 for m in MODULE_ORDER}

            conflicts = detect_conflicts(responses, config.conflict.table)
            flagged = conflicts.pairs_over(config.conflict.threshold)
            winner = salience.argmax()
            content = {r.module_kind: r for r in responses}[winner].content
            adjusted = combined
            if flagged:
                synthesis, adjusted = resolve_conflict(
                    conflicts, responses, combined, agent.gw, agent.profile, provider,
                    config.conflict,
                )
                if synthesis:
                    content = synthesis

            delta = None
            if prev is not None:
                worst = 0.0
                prev_by = {r.module_kind: r for r in prev}
                for r in responses:
                    a, b = prev_by[r.module_kind].payload, r.payload
                    for key in set(a) | set(b):
                        worst = max(worst, abs(a.get(key, 0.0) - b.get(key, 0.0)))
                delta = worst

            trace = CycleTrace(
                iteration=iteration,
                salience_raw=dict(salience.raw),
                salience_norm=dict(salience.normalized),
                combined_weights=dict(adjusted),
                conflicts=[{"modules": [i, j], "score": s} for i, j, s in flagged],
                winner=winner,
                delta=delta,
            )
            agent.gw.broadcast(content, winner, trace)
            traces.append(trace)

            if delta is not None and delta < config.epsilon:
                break
            prev = responses

        response_text, _ = integrate_outputs(
            responses, salience, agent.profile, agent.gw, provider,
            weights=adjusted, query=query, history=history,
        )
    except ProviderError as exc:
        exc.partial_trace = traces
        raise

    emotion_payload = {r.module_kind: r for r in responses}[EMOTION].payload
    agent.meta["last_emotion_payload"] = dict(emotion_payload)
    if agent.memory is not None:
        agent.memory.consolidate(query, response_text, history, emotion_payload)
    return response_text, traces, agent
