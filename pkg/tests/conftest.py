from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from fronfix.model import ModelParams


@pytest.fixture
def base_params() -> ModelParams:
    """The experiment parameter set used throughout: r=0.1, sigma=0.2, E=T=1."""
    return ModelParams(r=0.1, sigma=0.2, E=1.0, T=1.0, alpha=1.0)


@pytest.fixture
def fractional_params() -> ModelParams:
    return ModelParams(r=0.1, sigma=0.2, E=1.0, T=1.0, alpha=0.9)
