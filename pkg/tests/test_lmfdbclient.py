import json
import shutil
import time

import pytest
import requests

from primegeo.errors import NetworkUnavailable, NotFound, SchemaMismatch
from primegeo.exactpoly import MonicIntPolynomial
from primegeo.lmfdbclient import (
    API_URL,
    USER_AGENT,
    FactCache,
    LMFDBClient,
    LocalRow,
    crosscheck,
)


class FakeResponse:
    def __init__(self, payload, status=200):
        self._payload = payload
        self.status_code = status

    def json(self):
        if isinstance(self._payload, Exception):
            raise self._payload
        return self._payload


class FakeSession:
    """Records calls; answers from a dict keyed by signed discriminant."""

    def __init__(self, answers=None, status=200, fail=False):
        self.headers = {}
        self.answers = answers or {}
        self.status = status
        self.fail = fail
        self.calls = []

    def get(self, url, params=None, timeout=None):
        self.calls.append((time.monotonic(), url, dict(params), dict(self.headers)))
        if self.fail:
            raise requests.ConnectionError("no route to host")
        disc = params["disc_sign"] * params["disc_abs"]
        return FakeResponse({"data": self.answers.get(disc, [])}, self.status)


REC_23 = {"label": "3.1.23.1", "coeffs": [1, 0, -1, 1], "disc_abs": 23, "disc_sign": -1,
          "class_number": 1, "regulator": 0.281199574322962}


@pytest.fixture
def client(fact_cache_path):
    return LMFDBClient(fact_cache_path, offline=True)


def test_fetch_from_fixture(client):
    f = client.fetch_field(-23)
    assert (f.label, f.h, f.source) == ("3.1.23.1", 1, "cache")
    assert f.R == pytest.approx(0.28119957432296183, abs=1e-12)
    assert client.fetch_field(-283).h == 2


def test_fetch_by_polynomial_disambiguates(client):
    # three fields share |D| = 1228; the polynomial picks one
    p = MonicIntPolynomial((-6, 4, 0))
    f = client.fetch_field(p)
    assert f.discriminant == -1228 and f.coeffs == (-6, 4, 0, 1)
    with pytest.raises(NotFound):
        client.fetch_field(-1228)


def test_repeated_fetch_idempotent(client):
    a, b = client.fetch_field(-31), client.fetch_field(-31)
    assert a.invariants() == b.invariants()


def test_offline_empty_cache(tmp_path):
    c = LMFDBClient(tmp_path / "facts.json", offline=True)
    with pytest.raises(NetworkUnavailable, match="offline"):
        c.fetch_field(-23)


def test_env_forces_offline(tmp_path, monkeypatch):
    monkeypatch.setenv("PRIMEGEO_OFFLINE", "1")
    s = FakeSession({-23: [REC_23]})
    c = LMFDBClient(tmp_path / "facts.json", session=s)
    with pytest.raises(NetworkUnavailable):
        c.fetch_field(-23)
    assert s.calls == []


def test_remote_write_through_and_round_trip(tmp_path):
    path = tmp_path / "facts.json"
    s = FakeSession({-23: [REC_23]})
    c = LMFDBClient(path, offline=False, session=s)
    remote = c.fetch_field(-23)
    assert remote.source == "remote" and len(s.calls) == 1
    _, url, params, headers = s.calls[0]
    assert url == API_URL and headers["User-Agent"] == USER_AGENT
    assert params["degree"] == 3 and params["disc_abs"] == 23 and params["disc_sign"] == -1
    again = c.fetch_field(-23)
    assert again.source == "cache" and len(s.calls) == 1
    assert again.invariants() == remote.invariants()
    # a fresh offline client sees the same facts
    assert LMFDBClient(path, offline=True).fetch_field(-23).invariants() == remote.invariants()
    assert json.loads(path.read_text())["schema"] == "primegeo.fieldfacts"


def test_rate_limit(tmp_path):
    s = FakeSession({-23: [REC_23], -31: [dict(REC_23, label="3.1.31.1", disc_abs=31, coeffs=[-1, 1, 0, 1])]})
    c = LMFDBClient(tmp_path / "facts.json", offline=False, session=s, min_interval=0.0)
    c.fetch_field(-23)
    c.fetch_field(-31)
    assert s.calls[1][0] - s.calls[0][0] >= 0.99


def test_remote_failures(tmp_path):
    c = LMFDBClient(tmp_path / "a.json", offline=False, session=FakeSession(fail=True))
    with pytest.raises(NetworkUnavailable):
        c.fetch_field(-23)
    c = LMFDBClient(tmp_path / "b.json", offline=False, session=FakeSession(status=503))
    with pytest.raises(NetworkUnavailable, match="503"):
        c.fetch_field(-23)
    c = LMFDBClient(tmp_path / "c.json", offline=False, session=FakeSession({-23: [{"label": "x"}]}))
    with pytest.raises(SchemaMismatch):
        c.fetch_field(-23)
    c = LMFDBClient(tmp_path / "d.json", offline=False, session=FakeSession())
    with pytest.raises(NotFound):
        c.fetch_field(-24)


def test_cache_schema_mismatch(tmp_path):
    p = tmp_path / "facts.json"
    p.write_text(json.dumps({"schema": "primegeo.fieldfacts", "version": 99, "entries": {}}))
    with pytest.raises(SchemaMismatch):
        FactCache(p).get(-23)


def test_crosscheck(fact_cache_path, tmp_path):
    client = LMFDBClient(fact_cache_path, offline=True)
    R = client.fetch_field(-23).R
    good = [LocalRow(-23, 1, R), LocalRow(-283, 2, client.fetch_field(-283).R)]
    rep = crosscheck(good, client)
    assert rep.ok and rep.checked == 2 and not rep.unverifiable
    rep = crosscheck([LocalRow(-23, 1, R + 1e-4)], client)
    assert len(rep.discrepancies) == 1 and rep.discrepancies[0]["label"] == "3.1.23.1"
    rep = crosscheck([LocalRow(-23, 2, R)], client)
    assert "h 2 != 1" in rep.discrepancies[0]["problems"]
    rep = crosscheck([LocalRow(-99991, 1, 1.0)], client)
    assert rep.ok and rep.checked == 0 and len(rep.unverifiable) == 1


def test_put_preserves_other_entries(fact_cache_path, tmp_path):
    p = tmp_path / "facts.json"
    shutil.copy(fact_cache_path, p)
    cache = FactCache(p)
    before = cache.get(-23)
    cache.put(-7, [])
    assert cache.get(-23) == before and cache.get(-7) == []
