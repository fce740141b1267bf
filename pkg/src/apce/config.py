"""Runtime configuration from environment variables and an optional JSON file.

Secrets (the completion API key, the research password) come from the
environment only. Paths and provider settings may come from a config file;
file values win over environment fallbacks, which win over defaults.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import httpx

from apce.github import DEFAULT_BASE_URL as GITHUB_DEFAULT_BASE_URL
from apce.llm import API_KEY_ENV, DEFAULT_BASE_URL, DEFAULT_MODEL_ID, DEFAULT_TIMEOUT_MS, LlmConfig
from apce.pipeline import RetryPolicy

ENV_RESEARCH_PASSWORD = "APCE_RESEARCH_PASSWORD"
ENV_DATA_DIR = "APCE_DATA_DIR"
ENV_CONSENT_PATH = "APCE_CONSENT_PATH"
ENV_GITHUB_TOKEN = "APCE_GITHUB_TOKEN"
ENV_GITHUB_USERNAME = "APCE_GITHUB_USERNAME"

DEFAULT_DATA_DIR = "apce-data"


class MissingConfigError(Exception):
    """Raised with the name of the missing setting or environment variable."""


@dataclass
class AppConfig:
    llm: LlmConfig
    data_dir: Path
    consent_path: Path | None = None
    research_password: str | None = None
    github_base_url: str = GITHUB_DEFAULT_BASE_URL
    config_dir: Path | None = None
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    session_ttl_s: float = 8 * 3600.0
    # test seams: deterministic shuffling, virtual clock, in-process transports
    shuffle_seed: int | None = None
    sleep: Callable[[float], None] = time.sleep
    llm_transport: httpx.BaseTransport | None = None
    github_transport: httpx.BaseTransport | None = None

    @property
    def approaches_dir(self) -> Path:
        return self.config_dir if self.config_dir is not None else self.data_dir / "approaches"


def load_config(config_file: str | Path | None = None) -> AppConfig:
    """Build an AppConfig from the environment plus an optional JSON file."""
    file_values: dict = {}
    if config_file is not None:
        path = Path(config_file)
        if not path.exists():
            raise MissingConfigError(f"config file not found: {path}")
        file_values = json.loads(path.read_text(encoding="utf-8"))

    api_key = os.environ.get(API_KEY_ENV, "")
    if not api_key:
        raise MissingConfigError(f"environment variable {API_KEY_ENV} is not set")

    llm_values = file_values.get("llm", {})
    llm = LlmConfig(
        api_key=api_key,
        base_url=llm_values.get("base_url", DEFAULT_BASE_URL),
        model_id=llm_values.get("model_id", DEFAULT_MODEL_ID),
        timeout_ms=llm_values.get("timeout_ms", DEFAULT_TIMEOUT_MS),
    )

    retry_values = file_values.get("retry", {})
    retry = RetryPolicy(
        max_attempts=retry_values.get("max_attempts", 3),
        delay_ms=retry_values.get("delay_ms", 5000),
    )

    data_dir = Path(
        file_values.get("data_dir") or os.environ.get(ENV_DATA_DIR) or DEFAULT_DATA_DIR
    )
    consent_value = file_values.get("consent_path") or os.environ.get(ENV_CONSENT_PATH)
    config_dir_value = file_values.get("config_dir")

    return AppConfig(
        llm=llm,
        data_dir=data_dir,
        consent_path=Path(consent_value) if consent_value else None,
        research_password=os.environ.get(ENV_RESEARCH_PASSWORD) or None,
        github_base_url=file_values.get("github_base_url", GITHUB_DEFAULT_BASE_URL),
        config_dir=Path(config_dir_value) if config_dir_value else None,
        retry=retry,
    )
