"""Exception hierarchy shared across the engine."""


class GwpairError(Exception):
    """Base class for all engine errors."""


class ContractViolation(GwpairError):
    """An operation was called with inputs that break its preconditions."""


class ConfigError(GwpairError):
    """Invalid configuration (unknown keys, out-of-range parameters)."""


class SchemaError(GwpairError):
    """An input file is missing a required column or field."""


class ProviderError(GwpairError):
    """Base class for text-generation / embedding provider failures."""


class RetryableProviderError(ProviderError):
    """Transient provider failure (network, timeout). Safe to retry.

    ``module_kind`` is set when the failure happened inside a cognitive
    module call, so callers can re-dispatch just that module.
    """

    def __init__(self, message: str, module_kind: str | None = None):
        super().__init__(message)
        self.module_kind = module_kind


class PayloadParseError(ProviderError):
    """Provider returned text whose structured payload could not be parsed.

    Carries the raw text for diagnosis.
    """

    def __init__(self, message: str, raw_text: str = ""):
        super().__init__(message)
        self.raw_text = raw_text


class ScriptMissError(ProviderError):
    """Strict-mode scripted provider received a prompt no entry matches."""

    def __init__(self, prompt: str):
        super().__init__(f"no script entry matches prompt: {prompt[:200]!r}")
        self.prompt = prompt
