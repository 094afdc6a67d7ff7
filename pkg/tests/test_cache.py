from __future__ import annotations

import json

import pytest

from zerosum.cache import CACHE_ENV, InvariantCache, cache_key, default_cache_path
from zerosum.errors import CacheVerificationError
from zerosum.groups import make_group
from zerosum.lengths import LengthSet
from zerosum.search import compute_davenport, compute_egz, compute_eta


def filled(path):
    cache = InvariantCache(path)
    G = make_group([3, 3])
    for r in (compute_davenport(G), compute_eta(G), compute_egz(G), compute_egz(make_group([2, 2]))):
        cache.store(r)
    cache.save()
    return cache


def test_default_path_follows_env(isolated_cache):
    assert default_cache_path() == isolated_cache
    assert InvariantCache().path == isolated_cache


def test_default_path_without_env(monkeypatch):
    monkeypatch.delenv(CACHE_ENV)
    assert default_cache_path().name == "invariants.json"


def test_round_trip(tmp_path):
    path = tmp_path / "c.json"
    cache = filled(path)
    again = InvariantCache(path)
    assert again.to_dict() == cache.to_dict()
    again.save()
    assert json.loads(path.read_text()) == cache.to_dict()
    assert again.keys() == ["C2*C2|{2}", "C3*C3|N", "C3*C3|[1,3]", "C3*C3|{3}"]
    assert again.lookup(make_group([3, 3]), LengthSet.singleton(3)).value == 9
    assert cache_key("C3*C3", LengthSet.all()) in again
    assert path.read_text().startswith("{\n  ")


def test_tampered_witness_detected(tmp_path):
    path = tmp_path / "c.json"
    filled(path)
    data = json.loads(path.read_text())
    data["entries"]["C3*C3|{3}"]["witness"] = "(0,0)^3 (1,0)^2 (0,1)^2 (1,1)"
    path.write_text(json.dumps(data))
    with pytest.raises(CacheVerificationError):
        InvariantCache(path)
    lazy = InvariantCache(path, verify=False)
    assert lazy.verify() == ["C3*C3|{3}"]


def test_misfiled_entry_detected(tmp_path):
    path = tmp_path / "c.json"
    filled(path)
    data = json.loads(path.read_text())
    data["entries"]["C3*C3|{2}"] = data["entries"].pop("C3*C3|{3}")
    path.write_text(json.dumps(data))
    assert InvariantCache(path, verify=False).verify() == ["C3*C3|{2}"]
