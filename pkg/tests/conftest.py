from __future__ import annotations

import pytest


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Keep every test away from the user's real invariant cache."""
    path = tmp_path / "invariants.json"
    monkeypatch.setenv("ZEROSUM_CACHE", str(path))
    return path
