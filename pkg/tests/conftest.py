import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "optlab",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "optlab"))


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("OPTLAB_CACHE_DIR", str(tmp_path / "cache"))
