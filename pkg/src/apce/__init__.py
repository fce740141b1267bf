"""Commit-message generation and evaluation toolkit.

Core pieces: sentence-level text metrics (:mod:`apce.metrics`), the
approach registry and prompt rendering (:mod:`apce.approaches`), the
two-agent generation pipeline (:mod:`apce.pipeline`), clients for the LLM
provider and the git host (:mod:`apce.llm`, :mod:`apce.github`), the
submission store (:mod:`apce.store`), and the HTTP service and CLI on top
(:mod:`apce.service`, :mod:`apce.cli`).
"""

from apce.metrics import MetricScores, score_all

__version__ = "0.1.0"

__all__ = ["MetricScores", "score_all", "__version__"]
