"""Salience competition: which module wins access to the workspace.

Raw salience for a module is a linear feature combination

    raw[m] = alpha[m] + beta_confidence * confidence[m]
                      + beta_trait * trait_gain[m]
                      + beta_recency * recency[m]

with trait_gain the module's personality weight (softmax over its paired
trait) and recency 1 when the module produced the previous broadcast.
Normalization is a temperature-scaled softmax.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .types import (
    MODULE_ORDER,
    ModuleResponse,
    PersonalityProfile,
    SalienceVector,
    require_five,
)
from .workspace import GlobalWorkspace


def softmax(values: dict[str, float], temperature: float = 1.0) -> dict[str, float]:
    """Numerically stable softmax over a keyed score map."""
    if temperature <= 0:
        raise ValueError("softmax temperature must be positive")
    scaled = {k: v / temperature for k, v in values.items()}
    peak = max(scaled.values())
    exp = {k: math.exp(v - peak) for k, v in scaled.items()}
    total = sum(exp.values())
    return {k: v / total for k, v in exp.items()}


@dataclass
class SalienceConfig:
    """Coefficients of the salience equation plus the softmax temperature."""

    alpha: dict[str, float] = field(default_factory=lambda: {m: 0.0 for m in MODULE_ORDER})
    beta_confidence: float = 1.0
    beta_trait: float = 1.0
    beta_recency: float = 1.0
    tau: float = 1.0

    def __post_init__(self):
        missing = set(MODULE_ORDER) - set(self.alpha)
        if missing:
            raise ValueError(f"alpha missing modules: {sorted(missing)}")
        if self.tau <= 0:
            raise ValueError("tau must be positive")


def personality_weights(
    profile: PersonalityProfile, base: float = 0.0, kappa: float = 1.0
) -> dict[str, float]:
    """Softmax over (base + kappa * paired trait) per module.

    Strictly increasing in a module's paired trait with the others fixed,
    so the module gated by the dominant trait carries the largest weight.
    """
    logits = {m: base + kappa * profile.module_trait(m) for m in MODULE_ORDER}
    return softmax(logits)


def compute_salience(
    responses: list[ModuleResponse],
    profile: PersonalityProfile,
    gw: GlobalWorkspace,
    config: SalienceConfig | None = None,
) -> SalienceVector:
    """Score all five modules' claims to the workspace for this cycle."""
    config = config or SalienceConfig()
    by_kind = require_five(responses)
    gains = personality_weights(profile)
    raw = {}
    for kind in MODULE_ORDER:
        recency = 1.0 if gw.broadcast_source == kind else 0.0
        raw[kind] = (
            config.alpha[kind]
            + config.beta_confidence * by_kind[kind].confidence
            + config.beta_trait * gains[kind]
            + config.beta_recency * recency
        )
    normalized = softmax(raw, temperature=config.tau)
    return SalienceVector(raw=raw, normalized=normalized)
