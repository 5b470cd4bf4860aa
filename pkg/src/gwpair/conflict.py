"""Pairwise stance-conflict detection and weight-adjusting resolution.

Payloads are compared as stance vectors. Every key is normalized to [0, 1]
(valence lives in [-1, 1] and is rescaled; other keys are clamped). Shared
keys contribute their absolute stance difference directly. Keys the two
payloads do not share contribute through a fixed cross-key opposition
table: an entry ``(a, b): w`` reads "a low opposes b high" and contributes
``w * (1 - stance[a]) * stance[b]``. The pair's conflict score is the
maximum contribution, so one sharply opposed stance is enough to flag the
pair.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .providers import GenerationRequest
from .types import (
    MODULE_ORDER,
    ConflictMatrix,
    ModuleResponse,
    PersonalityProfile,
    require_five,
)
from .workspace import GlobalWorkspace

log = logging.getLogger(__name__)

# Opposition weights between structurally different payload keys. The
# dominant entry encodes the emotional-negativity-vs-action-push tension;
# the smaller ones keep unrelated pairs mildly sensitive without flagging.
DEFAULT_CROSS_KEY_TABLE: dict[tuple[str, str], float] = {
    ("valence", "plan_feasibility"): 0.5,
    ("valence", "goal_alignment"): 0.2,
    ("valence", "formality"): 0.15,
    ("valence", "retrieval_strength"): 0.1,
    ("plan_feasibility", "arousal"): 0.1,
}

STANCE_RANGES: dict[str, tuple[float, float]] = {"valence": (-1.0, 1.0)}


def _stance(key: str, value: float) -> float:
    lo, hi = STANCE_RANGES.get(key, (0.0, 1.0))
    return min(1.0, max(0.0, (value - lo) / (hi - lo)))


def pair_conflict(
    a: dict[str, float],
    b: dict[str, float],
    table: dict[tuple[str, str], float] | None = None,
) -> float:
    """Conflict score in [0, 1] between two payload maps (order-free)."""
    table = DEFAULT_CROSS_KEY_TABLE if table is None else table
    contributions: list[float] = []
    shared = set(a) & set(b)
    for key in shared:
        contributions.append(abs(_stance(key, a[key]) - _stance(key, b[key])))
    for (low_key, high_key), weight in table.items():
        if low_key in shared or high_key in shared:
            continue
        for p, q in ((a, b), (b, a)):
            if low_key in p and high_key in q:
                contributions.append(
                    weight * (1.0 - _stance(low_key, p[low_key])) * _stance(high_key, q[high_key])
                )
    if not contributions:
        return 0.0
    return min(1.0, max(contributions))


def detect_conflicts(
    responses: list[ModuleResponse],
    table: dict[tuple[str, str], float] | None = None,
) -> ConflictMatrix:
    """Score every unordered module pair; symmetric with zero diagonal."""
    by_kind = require_five(responses)
    scores = {i: {j: 0.0 for j in MODULE_ORDER} for i in MODULE_ORDER}
    for idx, i in enumerate(MODULE_ORDER):
        for j in MODULE_ORDER[idx + 1 :]:
            c = pair_conflict(by_kind[i].payload, by_kind[j].payload, table)
            scores[i][j] = c
            scores[j][i] = c
    return ConflictMatrix(scores=scores)


@dataclass
class ConflictConfig:
    threshold: float = 0.3
    kappa: float = 0.2
    table: dict[tuple[str, str], float] = field(
        default_factory=lambda: dict(DEFAULT_CROSS_KEY_TABLE)
    )


def resolve_conflict(
    conflicts: ConflictMatrix,
    responses: list[ModuleResponse],
    weights: dict[str, float],
    gw: GlobalWorkspace,
    profile: PersonalityProfile,
    provider,
    config: ConflictConfig | None = None,
) -> tuple[str, dict[str, float]]:
    """Damp the weights of conflicting modules and synthesize a settlement.

    Each flagged pair costs both members ``kappa * conflict * weight``; the
    freed mass goes to unflagged modules proportionally to their current
    weights. If every module is flagged there is no redistribution target:
    weights fall back to uniform and a degenerate-conflict event is logged.
    Returns the synthesis text ("" when nothing was flagged) and the
    adjusted weights.
    """
    config = config or ConflictConfig()
    by_kind = require_five(responses)
    flagged_pairs = conflicts.pairs_over(config.threshold)
    adjusted = dict(weights)
    if not flagged_pairs:
        return "", adjusted

    flagged = {m for i, j, _ in flagged_pairs for m in (i, j)}
    unflagged = [m for m in MODULE_ORDER if m not in flagged]
    if not unflagged:
        log.warning("degenerate conflict: all five modules flagged; using uniform weights")
        adjusted = {m: 1.0 / len(MODULE_ORDER) for m in MODULE_ORDER}
    else:
        freed = 0.0
        for i, j, score in flagged_pairs:
            for m in (i, j):
                cut = config.kappa * score * adjusted[m]
                adjusted[m] -= cut
                freed += cut
        pool = sum(adjusted[m] for m in unflagged)
        for m in unflagged:
            adjusted[m] += freed * (adjusted[m] / pool)
        total = sum(adjusted.values())
        adjusted = {m: w / total for m, w in adjusted.items()}

    stance_lines = []
    for i, j, score in flagged_pairs:
        stance_lines.append(
            f"- {i} (score {score:.2f}) holds: {by_kind[i].content}\n"
            f"  {j} holds: {by_kind[j].content}"
        )
    request = GenerationRequest(
        system_prompt=(
            "Two internal stances disagree. Produce one short synthesis that "
            "names and balances both sides.\n" + "\n".join(stance_lines)
        ),
        messages=[("user", gw.broadcast_content or "Resolve the disagreement.")],
        temperature=0.7,
    )
    content, _ = provider.generate(request)
    return content, adjusted
