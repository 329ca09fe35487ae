import os
import sys

import pytest

# Add project root to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from domain.entities.caption_graph import CaptionParseGraph  # noqa: E402
from domain.value_objects.encoder_bank import EncoderBank  # noqa: E402
from infrastructure.encoders.encoder_bank import build_encoder_bank  # noqa: E402
from tests.helpers.mock_factories import (  # noqa: E402
    GraphFactory,
    MockServiceFactory,
    TraceFactory,
)


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch, tmp_path):
    """Keep the developer's SPLITDIT_* variables and .env out of every test"""
    for name in list(os.environ):
        if name.startswith("SPLITDIT_"):
            monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def teddy_graph() -> CaptionParseGraph:
    return GraphFactory.teddy()


@pytest.fixture
def toy_bank() -> EncoderBank:
    return build_encoder_bank(d_l=8, d_g=16, d=32, max_len=77, seed=0)


@pytest.fixture
def trace_factory() -> TraceFactory:
    return TraceFactory()


@pytest.fixture
def mock_service_factory() -> MockServiceFactory:
    return MockServiceFactory()
