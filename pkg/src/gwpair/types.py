"""Core domain types: personality profiles, dating attributes, module responses.

Module kinds are plain strings; ``MODULE_ORDER`` fixes both the processing
order and the tie-break order used when two modules claim equal salience.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ContractViolation

EMOTION = "emotion"
MEMORY = "memory"
PLANNING = "planning"
SOCIAL_NORMS = "social_norms"
GOAL_TRACKING = "goal_tracking"

# Processing + tie-break order: emotion beats memory beats planning, etc.
MODULE_ORDER: tuple[str, ...] = (EMOTION, MEMORY, PLANNING, SOCIAL_NORMS, GOAL_TRACKING)

TRAIT_NAMES: tuple[str, ...] = (
    "openness",
    "conscientiousness",
    "extraversion",
    "agreeableness",
    "neuroticism",
)

# Each cognitive module is gated by one Big Five trait.
MODULE_TRAIT: dict[str, str] = {
    EMOTION: "neuroticism",
    MEMORY: "openness",
    PLANNING: "conscientiousness",
    SOCIAL_NORMS: "agreeableness",
    GOAL_TRACKING: "extraversion",
}

# Structured keys each module is asked to return. Payloads are still
# pass-through: whatever the provider sends is kept verbatim.
CANONICAL_PAYLOAD_KEYS: dict[str, tuple[str, ...]] = {
    EMOTION: ("valence", "arousal"),
    MEMORY: ("retrieval_strength",),
    PLANNING: ("plan_feasibility",),
    SOCIAL_NORMS: ("formality",),
    GOAL_TRACKING: ("goal_alignment",),
}

ATTRIBUTES: tuple[str, ...] = (
    "attractiveness",
    "sincerity",
    "intelligence",
    "fun",
    "ambition",
    "shared_interests",
)

IMPORTANCE_TOTAL = 100.0


def _in_unit(x: float) -> bool:
    return 0.0 <= x <= 1.0


@dataclass
class PersonalityProfile:
    """Big Five trait vector. Every trait lives in [0, 1]."""

    openness: float = 0.5
    conscientiousness: float = 0.5
    extraversion: float = 0.5
    agreeableness: float = 0.5
    neuroticism: float = 0.5
    mbti_label: str | None = None

    def __post_init__(self):
        for name in TRAIT_NAMES:
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and _in_unit(v)):
                raise ContractViolation(f"trait {name}={v!r} outside [0, 1]")

    def trait(self, name: str) -> float:
        if name not in TRAIT_NAMES:
            raise ContractViolation(f"unknown trait {name!r}")
        return float(getattr(self, name))

    def as_dict(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in TRAIT_NAMES}

    def module_trait(self, kind: str) -> float:
        """Value of the trait gating the given module."""
        return self.trait(MODULE_TRAIT[kind])


@dataclass
class DatingAttributes:
    """Self-image ratings plus a 100-point importance allocation.

    ``self_ratings`` are 1-10 per attribute; ``importance`` is non-negative
    and sums to 100 (within 1e-6).
    """

    self_ratings: dict[str, float]
    importance: dict[str, float]

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name, mapping in (("self_ratings", self.self_ratings), ("importance", self.importance)):
            missing = set(ATTRIBUTES) - set(mapping)
            if missing:
                raise ContractViolation(f"{name} missing attributes: {sorted(missing)}")
        for a, v in self.self_ratings.items():
            if not 1.0 <= v <= 10.0:
                raise ContractViolation(f"self rating {a}={v} outside [1, 10]")
        for a, v in self.importance.items():
            if v < 0:
                raise ContractViolation(f"importance {a}={v} negative")
        total = sum(self.importance.values())
        if abs(total - IMPORTANCE_TOTAL) > 1e-6:
            raise ContractViolation(f"importance sum {total} != 100")

    def copy(self) -> "DatingAttributes":
        return DatingAttributes(dict(self.self_ratings), dict(self.importance))


@dataclass
class ModuleResponse:
    """One module's local answer for a cycle: free text plus scored payload."""

    module_kind: str
    content: str
    payload: dict[str, float] = field(default_factory=dict)
    confidence: float = 0.5

    def __post_init__(self):
        if self.module_kind not in MODULE_ORDER:
            raise ContractViolation(f"unknown module kind {self.module_kind!r}")
        if not self.content:
            raise ContractViolation("module response content is empty")
        if not _in_unit(self.confidence):
            raise ContractViolation(f"confidence {self.confidence} outside [0, 1]")
        for k, v in self.payload.items():
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ContractViolation(f"payload {k}={v!r} not finite")


@dataclass
class SalienceVector:
    """Raw and softmax-normalized salience per module."""

    raw: dict[str, float]
    normalized: dict[str, float]

    def __post_init__(self):
        for name, mapping in (("raw", self.raw), ("normalized", self.normalized)):
            if set(mapping) != set(MODULE_ORDER):
                raise ContractViolation(f"salience {name} must cover exactly the five modules")
        if any(v < 0 for v in self.normalized.values()):
            raise ContractViolation("normalized salience has negative entries")
        total = sum(self.normalized.values())
        if abs(total - 1.0) > 1e-9:
            raise ContractViolation(f"normalized salience sums to {total}, not 1")

    def argmax(self) -> str:
        """Most salient module by raw score; ties broken by MODULE_ORDER."""
        best = MODULE_ORDER[0]
        for kind in MODULE_ORDER[1:]:
            if self.raw[kind] > self.raw[best]:
                best = kind
        return best


@dataclass
class ConflictMatrix:
    """Symmetric pairwise stance-conflict scores with a zero diagonal."""

    scores: dict[str, dict[str, float]]

    def __post_init__(self):
        for i in MODULE_ORDER:
            for j in MODULE_ORDER:
                s = self.scores[i][j]
                if not _in_unit(s):
                    raise ContractViolation(f"conflict score [{i}][{j}]={s} outside [0, 1]")
                if i == j and s != 0.0:
                    raise ContractViolation("conflict diagonal must be zero")
                if abs(s - self.scores[j][i]) > 1e-12:
                    raise ContractViolation("conflict matrix not symmetric")

    def pairs_over(self, threshold: float) -> list[tuple[str, str, float]]:
        """Unordered module pairs whose conflict exceeds ``threshold``."""
        out = []
        for idx, i in enumerate(MODULE_ORDER):
            for j in MODULE_ORDER[idx + 1 :]:
                if self.scores[i][j] > threshold:
                    out.append((i, j, self.scores[i][j]))
        return out


def require_five(responses: list[ModuleResponse]) -> dict[str, ModuleResponse]:
    """Index responses by module kind, insisting on exactly one per module."""
    by_kind = {r.module_kind: r for r in responses}
    if set(by_kind) != set(MODULE_ORDER) or len(responses) != len(MODULE_ORDER):
        raise ContractViolation(
            f"need exactly one response per module, got kinds {sorted(r.module_kind for r in responses)}"
        )
    return by_kind
