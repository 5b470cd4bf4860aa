import pathlib

import pytest

from gwpair import (
    ATTRIBUTES,
    AgentState,
    DatingAttributes,
    MemoryStore,
    ModuleResponse,
    PersonalityProfile,
    ScriptEntry,
    ScriptedProvider,
)
from gwpair.config import default_simulation_script
from gwpair.types import MODULE_ORDER

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture
def neutral_profile():
    return PersonalityProfile()


@pytest.fixture
def neutral_attrs():
    return DatingAttributes(
        {a: 5.5 for a in ATTRIBUTES}, {a: 100.0 / 6.0 for a in ATTRIBUTES}
    )


@pytest.fixture
def default_provider():
    return ScriptedProvider(default_simulation_script(), seed=11)


@pytest.fixture
def neutral_agent(neutral_profile, neutral_attrs, default_provider):
    return AgentState(
        agent_id="agent-1",
        profile=neutral_profile,
        attributes=neutral_attrs,
        gender="f",
        memory=MemoryStore(provider=default_provider),
    )


def make_responses(confidences=None, payloads=None):
    """Five well-formed module responses, overridable per module."""
    confidences = confidences or {}
    payloads = payloads or {}
    out = []
    for kind in MODULE_ORDER:
        out.append(
            ModuleResponse(
                module_kind=kind,
                content=f"{kind} stance",
                payload=payloads.get(kind, {"score": 0.5}),
                confidence=confidences.get(kind, 0.5),
            )
        )
    return out


@pytest.fixture
def interview_anxiety_provider():
    """Scripted responses for an interview-anxiety query: emotion leads
    with confidence 0.75 and a -0.48/0.68 affect payload."""
    entries = [
        ScriptEntry(
            "emotion processor",
            "Anxiety with determination underneath; validate before advising.",
            {"valence": -0.48, "arousal": 0.68, "confidence": 0.75},
        ),
        ScriptEntry(
            "memory processor",
            "Recalls months of searching and a long preparation effort.",
            {"retrieval_strength": 0.64, "confidence": 0.52},
        ),
        ScriptEntry(
            "planning processor",
            "Lay out a short, high-impact preparation sequence.",
            {"plan_feasibility": 0.88, "goal_alignment": 0.84, "confidence": 0.67},
        ),
        ScriptEntry(
            "social-norms processor",
            "Supportive professional tone fits this situation.",
            {"formality": 0.65, "confidence": 0.48},
        ),
        ScriptEntry(
            "goal-tracking processor",
            "Interview success is the active milestone.",
            {"goal_alignment": 0.84, "confidence": 0.45},
        ),
        ScriptEntry(
            "cognitive agent with the following personality",
            "Feeling nervous is normal; your preparation will carry you.",
            {},
        ),
        ScriptEntry(
            "internal stances disagree",
            "Validate the worry first, then one concrete preparation step.",
            {},
        ),
    ]
    return ScriptedProvider(entries, seed=3)
