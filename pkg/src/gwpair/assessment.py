"""Adaptive scenario-based personality assessment.

Each scenario yields two analysis events (the option choice, then an
optional free-text follow-up). Events carry per-trait (value, confidence)
deltas that accumulate by confidence-weighted mean:

    new_value = (value * conf + delta_value * delta_conf) / (conf + delta_conf)

Scenario selection targets the traits with the largest confidence deficit;
the session ends once every trait is confidently estimated (or the pool or
scenario budget runs out).
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import ContractViolation
from .providers import GenerationRequest
from .types import TRAIT_NAMES, PersonalityProfile

log = logging.getLogger(__name__)

CHOICE = "choice"
FREE_TEXT = "free_text"

DONE = "done"

_TRAIT_LINE = re.compile(
    r"(?im)^\s*(openness|conscientiousness|extraversion|agreeableness|neuroticism)"
    r"\s*:\s*(-?\d+(?:\.\d+)?)\s*\(\s*confidence\s*:\s*(-?\d+(?:\.\d+)?)\s*\)"
)


@dataclass
class Scenario:
    id: str
    prompt: str
    options: list[str]
    trait_targets: dict[str, float]
    follow_up_template: str = ""

    def __post_init__(self):
        if len(self.options) < 2:
            raise ContractViolation(f"scenario {self.id} needs at least 2 options")
        if not any(v > 0 for v in self.trait_targets.values()):
            raise ContractViolation(f"scenario {self.id} targets no trait")

    def follow_up(self, option_index: int) -> str:
        if not self.follow_up_template:
            return ""
        return self.follow_up_template.format(option=self.options[option_index].lower())


@dataclass
class AssessmentConfig:
    max_scenarios: int = 15
    min_scenarios: int = 12
    confidence_threshold: float = 1.4


@dataclass
class TraitEstimateState:
    values: dict[str, float] = field(default_factory=lambda: {t: 0.0 for t in TRAIT_NAMES})
    confidence: dict[str, float] = field(default_factory=lambda: {t: 0.0 for t in TRAIT_NAMES})
    scenarios_seen: int = 0
    seen_ids: list[str] = field(default_factory=list)
    transcript: list[dict] = field(default_factory=list)
    done: bool = False
    low_confidence: bool = False

    def display_profile(self) -> dict:
        return {
            t: {"value": round(self.values[t]), "confidence": round(self.confidence[t], 3)}
            for t in TRAIT_NAMES
        }


def jsonl_event_sink(path: str):
    """Event sink appending one JSON line per analysis event, for replay."""

    def sink(event: dict) -> None:
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")

    return sink


def load_scenario_pool(path: str | None = None) -> list[Scenario]:
    """The bundled 12-scenario pool, or a user pool from a JSON file."""
    if path is None:
        raw = resources.files("gwpair.data").joinpath("scenarios.json").read_text("utf-8")
    else:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    doc = json.loads(raw)
    return [Scenario(**entry) for entry in doc["scenarios"]]


def next_scenario(
    state: TraitEstimateState,
    pool: list[Scenario],
    config: AssessmentConfig | None = None,
) -> Scenario | str:
    """Pick the unseen scenario best covering under-confident traits.

    Returns ``DONE`` when the scenario budget or confidence bar is met; an
    exhausted pool also ends the session with the low-confidence flag set.
    """
    if not pool:
        raise ContractViolation("scenario pool is empty")
    config = config or AssessmentConfig()
    min_conf = min(state.confidence[t] for t in TRAIT_NAMES)
    if state.scenarios_seen >= config.max_scenarios:
        state.done = True
        return DONE
    if state.scenarios_seen >= config.min_scenarios and min_conf >= config.confidence_threshold:
        state.done = True
        return DONE
    unseen = [s for s in pool if s.id not in state.seen_ids]
    if not unseen:
        state.done = True
        state.low_confidence = min_conf < config.confidence_threshold
        return DONE

    def score(s: Scenario) -> float:
        return sum(
            s.trait_targets.get(t, 0.0)
            * max(0.0, config.confidence_threshold - state.confidence[t])
            for t in TRAIT_NAMES
        )

    return min(unseen, key=lambda s: (-score(s), s.id))


def analyze(
    kind: str,
    scenario: Scenario,
    user_input,
    provider,
) -> dict[str, tuple[float, float]]:
    """Run the provider analysis of a choice or free-text response.

    Returns per-trait (value, confidence) deltas parsed from the provider's
    block format (``openness: 65 (confidence: 0.3)`` per line). Out-of-range
    values are clamped and logged; an unparseable analysis yields
    zero-confidence deltas so the session continues.
    """
    if kind not in (CHOICE, FREE_TEXT):
        raise ContractViolation(f"unknown analysis kind {kind!r}")
    if kind == CHOICE:
        if not isinstance(user_input, int) or not 0 <= user_input < len(scenario.options):
            raise ContractViolation(
                f"choice index {user_input!r} out of range for {len(scenario.options)} options"
            )
        described = f"The participant chose option {user_input + 1}: {scenario.options[user_input]}"
    else:
        described = f"The participant wrote: {user_input}"
    request = GenerationRequest(
        system_prompt=(
            "You infer Big Five trait evidence from behavior in scenarios. "
            "Reply with one line per trait in the exact form "
            "'trait: VALUE (confidence: C)' with VALUE in 0-100 and C in 0-1.\n"
            f"Scenario: {scenario.prompt}\n"
            + ("Options:\n" + "\n".join(f"{i+1}. {o}" for i, o in enumerate(scenario.options)) + "\n"
               if kind == CHOICE else "")
        ),
        messages=[("user", described)],
        temperature=0.2,
    )
    text, _ = provider.generate(request)
    deltas: dict[str, tuple[float, float]] = {}
    for match in _TRAIT_LINE.finditer(text):
        trait = match.group(1).lower()
        value = float(match.group(2))
        conf = float(match.group(3))
        if not 0.0 <= value <= 100.0:
            log.warning("trait %s value %.1f out of range; clamped", trait, value)
            value = min(100.0, max(0.0, value))
        if not 0.0 <= conf <= 1.0:
            log.warning("trait %s confidence %.2f out of range; clamped", trait, conf)
            conf = min(1.0, max(0.0, conf))
        deltas[trait] = (value, conf)
    if not deltas:
        log.warning("unparseable trait analysis; recording zero-confidence deltas")
        deltas = {t: (50.0, 0.0) for t in TRAIT_NAMES}
    return deltas


def apply_update(
    state: TraitEstimateState, deltas: dict[str, tuple[float, float]]
) -> TraitEstimateState:
    """Fold one event's deltas into the running confidence-weighted means."""
    for trait, (value, conf) in deltas.items():
        if trait not in TRAIT_NAMES:
            raise ContractViolation(f"unknown trait {trait!r} in deltas")
        if conf < 0:
            raise ContractViolation("delta confidence must be >= 0")
        if conf == 0:
            continue
        prior_value = state.values[trait]
        prior_conf = state.confidence[trait]
        new_value = (prior_value * prior_conf + value * conf) / (prior_conf + conf)
        state.values[trait] = min(100.0, max(0.0, new_value))
        state.confidence[trait] = prior_conf + conf
    return state


def finalize(state: TraitEstimateState) -> tuple[PersonalityProfile, dict]:
    """Close the session: rounded 0-100 display profile plus the unit-scale
    core profile. Traits never evidenced default to 50 and are flagged."""
    display = {}
    core = {}
    for trait in TRAIT_NAMES:
        flagged = state.confidence[trait] == 0.0
        value = 50 if flagged else round(state.values[trait])
        display[trait] = {
            "value": value,
            "confidence": round(state.confidence[trait], 3),
            "flagged": flagged,
        }
        core[trait] = value / 100.0
    return PersonalityProfile(**core), display


class AssessmentSession:
    """One participant's assessment: scenario flow, events, persistence."""

    def __init__(
        self,
        provider,
        pool: list[Scenario] | None = None,
        config: AssessmentConfig | None = None,
        event_sink=None,
    ):
        self.provider = provider
        self.pool = pool if pool is not None else load_scenario_pool()
        self.config = config or AssessmentConfig()
        self.state = TraitEstimateState()
        self.event_sink = event_sink  # callable(dict) for JSONL persistence
        self.current: Scenario | None = None

    def start(self) -> Scenario:
        scenario = next_scenario(self.state, self.pool, self.config)
        if scenario == DONE:
            raise ContractViolation("assessment finished before it started")
        self.current = scenario
        return scenario

    def _record(self, event: dict) -> None:
        self.state.transcript.append(event)
        if self.event_sink is not None:
            self.event_sink(event)

    def submit(self, option_index: int, free_text: str | None = None) -> Scenario | str:
        """Process one scenario's worth of input and advance the session."""
        if self.state.done:
            raise ContractViolation("session is already done")
        if self.current is None:
            raise ContractViolation("call start() first")
        scenario = self.current
        deltas = analyze(CHOICE, scenario, option_index, self.provider)
        apply_update(self.state, deltas)
        self._record(
            {
                "scenario_id": scenario.id,
                "kind": CHOICE,
                "input": option_index,
                "deltas": {t: list(d) for t, d in deltas.items()},
                "post_values": dict(self.state.values),
                "post_confidence": dict(self.state.confidence),
            }
        )
        if free_text:
            deltas = analyze(FREE_TEXT, scenario, free_text, self.provider)
            apply_update(self.state, deltas)
            self._record(
                {
                    "scenario_id": scenario.id,
                    "kind": FREE_TEXT,
                    "input": free_text,
                    "deltas": {t: list(d) for t, d in deltas.items()},
                    "post_values": dict(self.state.values),
                    "post_confidence": dict(self.state.confidence),
                }
            )
        self.state.scenarios_seen += 1
        self.state.seen_ids.append(scenario.id)
        advanced = next_scenario(self.state, self.pool, self.config)
        self.current = None if advanced == DONE else advanced
        return advanced

    def finalize(self) -> tuple[PersonalityProfile, dict]:
        return finalize(self.state)
