from .baselines import BASELINES, run_baseline
from .llm import AuthError, LlmClient, LlmConfig, LlmError, NetworkError, ResponseCache
from .parsing import ParseError
from .prompts import METHODS, PROBLEMS, PromptContext, build_prompt
from .protocol import Estimate, GenerationContext, GenerationSpec, InsufficientValidResponses, run_generation

__all__ = [
    "BASELINES",
    "METHODS",
    "PROBLEMS",
    "AuthError",
    "Estimate",
    "GenerationContext",
    "GenerationSpec",
    "InsufficientValidResponses",
    "LlmClient",
    "LlmConfig",
    "LlmError",
    "NetworkError",
    "ParseError",
    "PromptContext",
    "ResponseCache",
    "build_prompt",
    "run_baseline",
    "run_generation",
]
