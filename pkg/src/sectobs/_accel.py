"""Square-residue sieve used by every rational point search.

A search fixes a "row" (a denominator) and scans an integer variable ``v``
over a range, keeping only the ``v`` at which each of a few integer
polynomials takes a perfect-square value.  The scan rejects ``v`` as soon
as some polynomial value is a non-square modulo one of :data:`MODULI`;
survivors are confirmed exactly by the caller.

Two interchangeable backends exist: a numba ``@njit`` loop and a pure
numpy filter.  ``SECTOBS_BACKEND=numpy`` forces the fallback;
``SECTOBS_BACKEND=numba`` requires numba.
"""

from __future__ import annotations

import os
from typing import Sequence

import numpy as np

MODULI = (64, 63, 65, 17, 11, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)

try:  # pragma: no cover - exercised by whichever backend is installed
    import numba
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    _HAVE_NUMBA = False


def _select_backend() -> str:
    want = os.environ.get("SECTOBS_BACKEND", "").strip().lower()
    if want == "numpy":
        return "numpy"
    if want == "numba" and not _HAVE_NUMBA:
        raise ImportError("SECTOBS_BACKEND=numba but numba is not installed")
    return "numba" if _HAVE_NUMBA else "numpy"


BACKEND = _select_backend()


def _square_table(m: int) -> np.ndarray:
    t = np.zeros(m, dtype=np.bool_)
    t[(np.arange(m, dtype=np.int64) ** 2) % m] = True
    return t


_SQUARES = {m: _square_table(m) for m in MODULI}


def build_tables(polys: Sequence[Sequence[int]], power: int = 1):
    """Residue tables: ``allowed[m][r]`` iff every poly at v = r (mod m),
    evaluated at ``v**power``, is a square mod m."""
    offsets = np.zeros(len(MODULI), dtype=np.int64)
    flat = np.ones(sum(MODULI), dtype=np.bool_)
    pos = 0
    for j, m in enumerate(MODULI):
        offsets[j] = pos
        r = np.arange(m, dtype=np.int64)
        s = np.ones(m, dtype=np.int64)
        for _ in range(power):
            s = s * r % m
        ok = np.ones(m, dtype=np.bool_)
        for f in polys:
            acc = np.zeros(m, dtype=np.int64)
            for c in reversed(list(f)):
                acc = (acc * s + (int(c) % m)) % m
            ok &= _SQUARES[m][acc]
        flat[pos:pos + m] = ok
        pos += m
    mods = np.asarray(MODULI, dtype=np.int64)
    # most selective moduli first
    order = np.argsort([flat[offsets[j]:offsets[j] + m].mean() for j, m in enumerate(MODULI)], kind="stable")
    return mods[order], offsets[order], flat


def _scan_numpy(lo: int, hi: int, mods, offsets, flat) -> np.ndarray:
    cand = np.arange(lo, hi + 1, dtype=np.int64)
    for m, off in zip(mods, offsets):
        if cand.size == 0:
            break
        cand = cand[flat[off + cand % m]]
    return cand


if _HAVE_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def _scan_numba(lo, hi, mods, offsets, flat):  # pragma: no cover - compiled
        k = mods.shape[0]
        out = np.empty(max(hi - lo + 1, 0), dtype=np.int64)
        cnt = 0
        for v in range(lo, hi + 1):
            ok = True
            for j in range(k):
                m = mods[j]
                r = v % m
                if r < 0:
                    r += m
                if not flat[offsets[j] + r]:
                    ok = False
                    break
            if ok:
                out[cnt] = v
                cnt += 1
        return out[:cnt]

else:  # pragma: no cover
    _scan_numba = None


def scan(lo: int, hi: int, tables, backend: str | None = None) -> np.ndarray:
    """All v in [lo, hi] that pass every residue table."""
    if hi < lo:
        return np.empty(0, dtype=np.int64)
    mods, offsets, flat = tables
    backend = backend or BACKEND
    if backend == "numba":
        if _scan_numba is None:
            raise ImportError("numba backend unavailable")
        return _scan_numba(np.int64(lo), np.int64(hi), mods, offsets, flat)
    return _scan_numpy(lo, hi, mods, offsets, flat)


def sieve(polys: Sequence[Sequence[int]], lo: int, hi: int, power: int = 1,
          backend: str | None = None) -> np.ndarray:
    return scan(lo, hi, build_tables(polys, power), backend)
