import json
import time

import pytest

from sectobs.curve import Genus2Curve, family_curve
from sectobs.pipeline import (
    TOP_KEYS,
    CertificateError,
    CurveCertificate,
    InputError,
    analyze,
    certified_pairs,
    default_cache_dir,
    dumps,
    emit_certificate,
    family_pairs,
    load_certificate,
    parse_coeffs,
    parse_family,
    rational_points,
    search_family,
    verify,
)

from conftest import NO_Q2_POINT


@pytest.fixture(scope="module")
def cert711():
    return analyze(family_curve(7, -11), (7, -11))


def test_c711_certified(cert711):
    v = cert711.verdicts
    assert v["everywhere_locally_solvable"] and v["no_rational_deg1_class"]
    assert v["obstruction_certified"] and v["status"] == "certified"
    assert list(cert711.data) == list(TOP_KEYS)


def test_fraction_strings(cert711):
    q = cert711.data["quotients"]["E1"]
    assert all(isinstance(x, str) for x in q["raw"])
    assert all(isinstance(c, str) for c in cert711.data["curve"]["coeffs"])


def test_no_q2_fails_locally():
    cert = analyze(Genus2Curve.from_high(NO_Q2_POINT))
    v = cert.verdicts
    assert v["everywhere_locally_solvable"] is False
    assert v["obstruction_certified"] is False and v["status"] == "failed-local"
    assert cert.data["local"]["failures"] == [2]


def test_x6_plus_1_rational_point():
    C = Genus2Curve.from_high((1, 0, 0, 0, 0, 0, 1))
    pts = rational_points(C)
    assert {"x": "0", "y": "1"} in pts
    assert {"infinity": True, "y_over_x3": "1"} in pts
    cert = analyze(C)
    assert cert.verdicts["no_rational_deg1_class"] is False
    assert cert.status == "failed-independence"


def test_round_trip(tmp_path, cert711):
    path = emit_certificate(cert711, tmp_path / "c.json")
    loaded = load_certificate(path)
    assert loaded == cert711
    emit_certificate(loaded, tmp_path / "d.json")
    assert (tmp_path / "c.json").read_bytes() == (tmp_path / "d.json").read_bytes()


def test_version_bump(tmp_path, cert711):
    data = json.loads(dumps(cert711.data))
    data["schema_version"] += 1
    (tmp_path / "c.json").write_text(json.dumps(data))
    with pytest.raises(CertificateError, match="unsupported version"):
        load_certificate(tmp_path / "c.json")


@pytest.mark.parametrize("field", ["kernel", "verdicts"])
def test_missing_field_is_named(tmp_path, cert711, field):
    data = json.loads(dumps(cert711.data))
    del data[field]
    (tmp_path / "c.json").write_text(json.dumps(data))
    with pytest.raises(CertificateError, match=field):
        load_certificate(tmp_path / "c.json")


def test_corrupted_json(tmp_path):
    (tmp_path / "c.json").write_text('{"schema_version": 1, "curve": ')
    with pytest.raises(CertificateError, match="not valid JSON"):
        load_certificate(tmp_path / "c.json")


def test_bad_status_is_named(tmp_path, cert711):
    data = json.loads(dumps(cert711.data))
    data["verdicts"]["status"] = "maybe"
    (tmp_path / "c.json").write_text(json.dumps(data))
    with pytest.raises(CertificateError, match="verdicts.status"):
        load_certificate(tmp_path / "c.json")


def test_determinism(cert711):
    again = analyze(family_curve(7, -11), (7, -11))
    assert again.digest == cert711.digest
    a, b = dict(cert711.data), dict(again.data)
    a["meta"] = {k: v for k, v in a["meta"].items() if k != "seconds"}
    b["meta"] = {k: v for k, v in b["meta"].items() if k != "seconds"}
    assert dumps(a) == dumps(b)


def test_verify_accepts(cert711):
    rep = verify(cert711)
    assert rep.ok, rep.failures
    assert rep.checks > 20


@pytest.mark.parametrize("tamper", ["generator", "mu", "status", "point"])
def test_verify_rejects_tampering(cert711, tamper):
    data = json.loads(dumps(cert711.data))
    if tamper == "generator":
        data["quotients"]["E1"]["generators"][0][1] = "41"
    elif tamper == "mu":
        comp = data["mu"]["generators"][0]["image"][1]["rep"]
        comp["a"] = str(int(comp["a"]) * 3) if "/" not in comp["a"] else "3"
    elif tamper == "status":
        data["verdicts"]["obstruction_certified"] = False
    else:
        data["curve"]["rational_points"] = [{"x": "0", "y": "1"}]
    assert not verify(CurveCertificate(data)).ok


def test_family_pairs():
    pairs = family_pairs(50, -20, 20)
    assert {p for p, _ in pairs} == {7, 23, 31, 47}
    assert (7, 7) not in pairs and (7, 14) not in pairs and (7, 0) not in pairs
    assert family_pairs(7, 7, 7) == []
    with pytest.raises(InputError):
        family_pairs(5, 0, 1)


def test_small_search_and_cache(tmp_path):
    t0 = time.perf_counter()
    rows = search_family(7, -12, -10, cache=tmp_path / "cache", out=tmp_path / "out")
    cold = time.perf_counter() - t0
    assert certified_pairs(rows) == {(7, -11)}
    assert [(r.p, r.a) for r in rows] == [(7, -12), (7, -11), (7, -10)]
    t0 = time.perf_counter()
    warm_rows = search_family(7, -12, -10, cache=tmp_path / "cache")
    warm = time.perf_counter() - t0
    assert [r.to_json() for r in warm_rows] == [r.to_json() for r in rows]
    assert warm < 0.05 * cold
    assert json.loads((tmp_path / "out" / "rows.json").read_text())[1]["status"] == "certified"
    for r in rows:
        assert verify(load_certificate(tmp_path / "out" / r.certificate)).ok


def test_excluded_search_is_empty(tmp_path):
    assert search_family(7, 7, 7, cache=tmp_path) == []


def test_cache_env(monkeypatch, tmp_path):
    monkeypatch.setenv("SECTOBS_CACHE", str(tmp_path / "x"))
    assert default_cache_dir() == tmp_path / "x"


def test_parsers():
    assert parse_family("7,-11") == (7, -11)
    with pytest.raises(InputError):
        parse_family("7")
    C = parse_coeffs("3,0,8,0,2,0,-6")
    assert C.coeffs[6] == 3 and C.coeffs[0] == -6
    for bad in ("1,2,3", "a,b,c,d,e,f,g", "0,0,0,0,0,0,1", "1,0,-2,0,1,0,0"):
        with pytest.raises(InputError):
            parse_coeffs(bad)
