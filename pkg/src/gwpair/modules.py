"""The five cognitive module processors.

Each module is an LLM call with a module-specific system prompt. The prompt
carries a numeric gain derived from the module's paired personality trait
(higher neuroticism turns the emotion gain up, higher conscientiousness
deepens planning, and so on), the current workspace broadcast, recent
history, and a request for the module's canonical payload keys. Whatever
structured payload the provider returns is kept verbatim; the reserved key
``confidence`` is lifted into the response's confidence field.
"""

from __future__ import annotations

from .errors import PayloadParseError, RetryableProviderError
from .providers import GenerationRequest
from .types import (
    CANONICAL_PAYLOAD_KEYS,
    EMOTION,
    GOAL_TRACKING,
    MEMORY,
    MODULE_TRAIT,
    PLANNING,
    SOCIAL_NORMS,
    ModuleResponse,
    PersonalityProfile,
)
from .workspace import GlobalWorkspace

_ROLE_TEXT = {
    EMOTION: (
        "You are the emotion processor: detect affective markers, place them "
        "on valence/arousal axes, and pick a regulation strategy."
    ),
    MEMORY: (
        "You are the memory processor: surface episodic and semantic items "
        "relevant to the query and rate how strongly they were retrieved."
    ),
    PLANNING: (
        "You are the planning processor: decompose the social goal into "
        "tactical steps and rate their feasibility."
    ),
    SOCIAL_NORMS: (
        "You are the social-norms processor: check etiquette, disclosure "
        "boundaries and reciprocity, and rate the required formality."
    ),
    GOAL_TRACKING: (
        "You are the goal-tracking processor: monitor progress toward the "
        "interaction objective and rate goal alignment."
    ),
}

_GAIN_NAME = {
    EMOTION: "emotion_gain",
    MEMORY: "memory_breadth_gain",
    PLANNING: "planning_depth_gain",
    SOCIAL_NORMS: "norm_strictness_gain",
    GOAL_TRACKING: "goal_assertiveness_gain",
}

MODULE_CALL_TEMPERATURE = 0.9


def build_module_prompt(
    kind: str,
    query: str,
    history: list[tuple[str, str]],
    gw: GlobalWorkspace,
    profile: PersonalityProfile,
    memory_context: str = "",
    temperature: float = MODULE_CALL_TEMPERATURE,
) -> GenerationRequest:
    """Assemble the module call. History and workspace state ride in the
    system prompt so message roles stay a single user turn."""
    gain = profile.module_trait(kind)
    lines = [
        _ROLE_TEXT[kind],
        f"{_GAIN_NAME[kind]}={gain:.3f} (from {MODULE_TRAIT[kind]})",
    ]
    if gw.broadcast_content:
        lines.append(f"Workspace broadcast [{gw.broadcast_source}]: {gw.broadcast_content}")
    if memory_context:
        lines.append(f"Retrieved memory:\n{memory_context}")
    if history:
        lines.append("Recent history:")
        lines.extend(f"  {speaker}: {text}" for speaker, text in history[-10:])
    keys = ", ".join(CANONICAL_PAYLOAD_KEYS[kind])
    lines.append(
        f"Reply with a short analysis and a JSON object containing at least: {keys}."
    )
    return GenerationRequest(
        system_prompt="\n".join(lines),
        messages=[("user", query)],
        temperature=temperature,
    )


def run_cognitive_module(
    kind: str,
    query: str,
    history: list[tuple[str, str]],
    gw: GlobalWorkspace,
    profile: PersonalityProfile,
    provider,
    memory_context: str = "",
    temperature: float = MODULE_CALL_TEMPERATURE,
) -> ModuleResponse:
    """Run one module's local processing for the current cycle."""
    if not query:
        raise ValueError("query must be non-empty")
    request = build_module_prompt(kind, query, history, gw, profile, memory_context, temperature)
    try:
        text, payload = provider.generate(request)
    except RetryableProviderError as exc:
        raise RetryableProviderError(str(exc), module_kind=kind) from exc
    except PayloadParseError:
        raise
    payload = dict(payload)
    confidence = float(payload.pop("confidence", 0.5))
    return ModuleResponse(
        module_kind=kind,
        content=text or "(no content)",
        payload=payload,
        confidence=min(1.0, max(0.0, confidence)),
    )
