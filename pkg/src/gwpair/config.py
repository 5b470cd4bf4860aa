"""Run configuration: one JSON document drives a whole simulation.

Only the remote provider's auth token lives outside the file (environment
variable). Scripted runs must carry a seed so exports are reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .agent import CognitiveConfig
from .conflict import ConflictConfig, DEFAULT_CROSS_KEY_TABLE
from .errors import ConfigError
from .providers import ReplayProvider, RemoteProvider, ScriptEntry, ScriptedProvider
from .salience import SalienceConfig
from .types import MODULE_ORDER

PROVIDER_KINDS = ("scripted", "replay", "remote")


def default_simulation_script() -> list[ScriptEntry]:
    """Canned responses keyed on prompt markers, enough to run any
    simulation or assessment fully offline."""
    return [
        ScriptEntry(
            "emotion processor",
            "A warm current runs through the exchange.",
            {"valence": 0.35, "arousal": 0.55, "confidence": 0.7},
        ),
        ScriptEntry(
            "memory processor",
            "This echoes an earlier pleasant moment.",
            {"retrieval_strength": 0.6, "confidence": 0.55},
        ),
        ScriptEntry(
            "planning processor",
            "Steer toward shared interests next.",
            {"plan_feasibility": 0.75, "confidence": 0.6},
        ),
        ScriptEntry(
            "social-norms processor",
            "Tone is polite and well inside bounds.",
            {"formality": 0.4, "confidence": 0.5},
        ),
        ScriptEntry(
            "goal-tracking processor",
            "Momentum is good for getting to know each other.",
            {"goal_alignment": 0.65, "confidence": 0.6},
        ),
        ScriptEntry(
            "cognitive agent with the following personality",
            "That sounds lovely - what do you enjoy most outside work?",
            {},
        ),
        ScriptEntry(
            "internal stances disagree",
            "Acknowledge the feeling first, then take one concrete step.",
            {},
        ),
        ScriptEntry(
            "chose option",
            "openness: 55 (confidence: 0.3)\nconscientiousness: 55 (confidence: 0.3)\n"
            "extraversion: 50 (confidence: 0.3)\nagreeableness: 55 (confidence: 0.3)\n"
            "neuroticism: 45 (confidence: 0.3)",
            {},
        ),
        ScriptEntry(
            "participant wrote",
            "openness: 60 (confidence: 0.2)\nconscientiousness: 60 (confidence: 0.2)\n"
            "extraversion: 45 (confidence: 0.2)\nagreeableness: 60 (confidence: 0.2)\n"
            "neuroticism: 40 (confidence: 0.2)",
            {},
        ),
    ]


@dataclass
class RunConfig:
    provider: dict = field(default_factory=lambda: {"kind": "scripted", "seed": 0})
    context: dict = field(default_factory=dict)
    batch_size: int = 4
    threshold: float = 0.5
    workers: int = 1
    full_final_round: bool = False
    seed: int | None = None
    cognitive: dict = field(default_factory=dict)

    def __post_init__(self):
        kind = self.provider.get("kind")
        if kind not in PROVIDER_KINDS:
            raise ConfigError(f"provider kind must be one of {PROVIDER_KINDS}, got {kind!r}")
        if kind == "scripted" and self.seed is None and self.provider.get("seed") is None:
            raise ConfigError("seed is mandatory for scripted runs")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError("threshold must be in [0, 1]")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        c = self.cognitive
        checks = [
            ("tau_sal", lambda v: v > 0, "must be positive"),
            ("theta_conf", lambda v: 0.0 <= v <= 1.0, "must be in [0, 1]"),
            ("kappa_conf", lambda v: 0.0 <= v <= 1.0, "must be in [0, 1]"),
            ("epsilon", lambda v: v > 0, "must be positive"),
            ("max_iterations", lambda v: v >= 1, "must be >= 1"),
            ("eta", lambda v: 0.0 < v <= 1.0, "must be in (0, 1]"),
        ]
        for key, ok, why in checks:
            if key in c and not ok(c[key]):
                raise ConfigError(f"cognitive.{key} {why}")

    @staticmethod
    def from_dict(doc: dict) -> "RunConfig":
        known = {"provider", "context", "batch_size", "threshold", "workers",
                 "full_final_round", "seed", "cognitive"}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}; valid: {sorted(known)}")
        return RunConfig(**doc)

    @staticmethod
    def from_file(path: str) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return RunConfig.from_dict(json.load(fh))

    def effective_seed(self) -> int:
        seed = self.seed if self.seed is not None else self.provider.get("seed")
        return int(seed or 0)

    def cognitive_config(self) -> CognitiveConfig:
        c = dict(self.cognitive)
        alpha = c.get("alpha", 0.0)
        if isinstance(alpha, (int, float)):
            alpha = {m: float(alpha) for m in MODULE_ORDER}
        salience = SalienceConfig(
            alpha=alpha,
            beta_confidence=c.get("beta_confidence", 1.0),
            beta_trait=c.get("beta_trait", 1.0),
            beta_recency=c.get("beta_recency", 1.0),
            tau=c.get("tau_sal", 1.0),
        )
        table = {
            tuple(k.split("|")): v for k, v in c["cross_key_table"].items()
        } if "cross_key_table" in c else dict(DEFAULT_CROSS_KEY_TABLE)
        conflict = ConflictConfig(
            threshold=c.get("theta_conf", 0.3),
            kappa=c.get("kappa_conf", 0.2),
            table=table,
        )
        return CognitiveConfig(
            salience=salience,
            conflict=conflict,
            epsilon=c.get("epsilon", 0.05),
            max_iterations=c.get("max_iterations", 3),
            eta=c.get("eta", 0.1),
            retrieval_k=c.get("retrieval_k", 4),
        )

    def make_provider(self):
        p = dict(self.provider)
        kind = p.pop("kind")
        if kind == "scripted":
            entries = [
                ScriptEntry(e["matcher"], e["response_text"], e.get("payload", {}))
                for e in p.get("script", [])
            ] or default_simulation_script()
            return ScriptedProvider(
                entries,
                strict=p.get("strict", False),
                seed=self.effective_seed(),
                embed_dim=p.get("embed_dim", 64),
            )
        if kind == "replay":
            if "tape" not in p:
                raise ConfigError("replay provider needs a tape path")
            return ReplayProvider(p["tape"], seed=self.effective_seed())
        return RemoteProvider(
            base_url=p.get("base_url", "http://localhost:8000/v1"),
            model=p.get("model", "default"),
            token_env=p.get("token_env", "GWPAIR_API_TOKEN"),
            embed_model=p.get("embed_model"),
        )
