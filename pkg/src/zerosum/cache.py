"""JSON file cache of computed invariants, keyed by group and length set."""

from __future__ import annotations

import json
import os
from pathlib import Path

from .errors import CacheVerificationError
from .groups import FiniteAbelianGroup
from .lengths import LengthSet, as_length_set
from .search import InvariantResult, verify_witness

CACHE_ENV = "ZEROSUM_CACHE"


def default_cache_path() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "zerosum" / "invariants.json"


def cache_key(G: FiniteAbelianGroup | str, L: LengthSet | str) -> str:
    group = G if isinstance(G, str) else G.canonical()
    return f"{group}|{as_length_set(L).descriptor()}"


class InvariantCache:
    """Entries ``"C3*C3|{3}" -> InvariantResult``; every witness is re-checked on load."""

    def __init__(self, path: str | Path | None = None, verify: bool = True):
        self.path = Path(path) if path is not None else default_cache_path()
        self.entries: dict[str, InvariantResult] = {}
        if self.path.exists():
            self.load(verify=verify)

    def load(self, verify: bool = True) -> None:
        data = json.loads(self.path.read_text())
        self.entries = {k: InvariantResult.from_dict(v) for k, v in data.get("entries", {}).items()}
        if verify:
            bad = self.verify()
            if bad:
                raise CacheVerificationError(f"witness check failed for {', '.join(bad)}")

    def verify(self) -> list[str]:
        """Keys whose entry is malformed or whose witness fails re-verification."""
        bad = []
        for key, result in sorted(self.entries.items()):
            if key != result.key() or (result.witness is not None and not verify_witness(result)):
                bad.append(key)
        return bad

    def to_dict(self) -> dict:
        return {"schema": 1, "entries": {k: self.entries[k].to_dict() for k in sorted(self.entries)}}

    def save(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    def store(self, result: InvariantResult) -> None:
        self.entries[result.key()] = result

    def lookup(self, G: FiniteAbelianGroup | str, L: LengthSet | str) -> InvariantResult | None:
        return self.entries.get(cache_key(G, L))

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def keys(self) -> list[str]:
        return sorted(self.entries)
