from __future__ import annotations

import subprocess
import sys
from pathlib import Path

import pytest

from dsalign import load_file

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"
GOLDEN = FIXTURES / "golden"

FIXTURE_NAMES = [
    "faq_chatbot",
    "speech_assistant",
    "job_interview",
    "status_interview",
    "conv_recommender",
]


@pytest.fixture(scope="session")
def fixture_models():
    models = {}
    for name in FIXTURE_NAMES:
        result = load_file(FIXTURES / f"{name}.dsa")
        assert result.model is not None, [d.render() for d in result.diagnostics]
        models[name] = result.model
    return models


@pytest.fixture
def faq_model(fixture_models):
    # Independent parse so tests can mutate freely.
    return load_file(FIXTURES / "faq_chatbot.dsa").model


def run_cli(*args: str, env: dict | None = None) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "dsalign", *args],
        capture_output=True,
        text=True,
        cwd=str(REPO),
        env=env,
    )
