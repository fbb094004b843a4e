from __future__ import annotations

import pytest

import revpn as r


@pytest.fixture(scope="session")
def load():
    cache: dict[str, r.NetDocument] = {}

    def _load(name: str) -> r.NetDocument:
        if name not in cache:
            cache[name] = r.bundled_net(name)
        return cache[name]

    return _load


@pytest.fixture(scope="session")
def catalysis(load):
    return load("catalysis")


def fire_all(net, m0, names):
    """Replay a forward-only transition list."""
    return r.replay(net, m0, tuple(r.Action.forward(t) for t in names))
