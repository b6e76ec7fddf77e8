import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sectobs import _accel


def _has_numba():
    try:
        import numba  # noqa: F401
        return True
    except ImportError:
        return False


@pytest.mark.skipif(not _has_numba(), reason="numba not installed")
@settings(max_examples=30)
@given(st.lists(st.integers(-60, 60), min_size=3, max_size=3, unique=True), st.integers(1, 9))
def test_backends_agree(e, d):
    w = d * d
    f = [-e[0] * e[1] * e[2] * w**3, (e[0] * e[1] + e[0] * e[2] + e[1] * e[2]) * w**2, -sum(e) * w, 1]
    tables = _accel.build_tables([f])
    lo, hi = min(e) * w, max(e) * w + 500
    a = np.asarray(_accel.scan(lo, hi, tables, "numpy"))
    b = np.asarray(_accel.scan(lo, hi, tables, "numba"))
    assert a.tolist() == b.tolist()


def test_backend_env(monkeypatch):
    monkeypatch.setenv("SECTOBS_BACKEND", "numpy")
    assert _accel._select_backend() == "numpy"


def test_analysis_is_backend_independent(tmp_path):
    import json
    import os
    import subprocess
    import sys

    digests = []
    for name in ("numpy", "numba"):
        out = tmp_path / f"{name}.json"
        env = dict(os.environ, SECTOBS_BACKEND=name)
        r = subprocess.run([sys.executable, "-m", "sectobs", "analyze", "--family", "7,-11", "--out", str(out)],
                           env=env, capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
        data = json.loads(out.read_text())
        assert data["meta"]["backend"] == name
        del data["meta"]
        digests.append(data)
    assert digests[0] == digests[1]
