import random

import numpy as np
import pytest

from discourse_lens import _backend, _pykernels

try:
    from discourse_lens import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def test_fallback_is_importable():
    assert _backend.load("python").NAME == "python"
    assert _backend.load().NAME in ("python", "cython")


def test_env_forces_fallback(monkeypatch):
    monkeypatch.setenv("DISCOURSE_LENS_PURE_PYTHON", "1")
    assert _backend.load().NAME == "python"


@needs_c
def test_compiled_backend_selected_by_default(monkeypatch):
    monkeypatch.delenv("DISCOURSE_LENS_PURE_PYTHON", raising=False)
    assert _backend.load().NAME == "cython"


def _random_codes(rng, n):
    # codes 0..11 with 6 = T-None and 11 = S-None, T-None heavy
    return np.array([rng.choice([6, 6, 6, 11] + list(range(12))) for _ in range(n)], dtype=np.int32)


MASK = np.zeros(12, dtype=np.uint8)
MASK[[6, 11]] = 1


@needs_c
@pytest.mark.parametrize("seed", range(20))
def test_backends_agree(seed):
    rng = random.Random(seed)
    codes = _random_codes(rng, rng.randint(0, 400))
    a = np.zeros((12, 12), dtype=np.int64)
    b = np.zeros((12, 12), dtype=np.int64)
    _pykernels.add_bigrams(codes, a)
    _ckernels.add_bigrams(codes, b)
    assert np.array_equal(a, b)
    ga = _pykernels.gap_instances(codes, MASK, 6)
    gb = _ckernels.gap_instances(codes, MASK, 6)
    assert ga.shape[1] == 3 and np.array_equal(ga, gb)


@pytest.mark.parametrize("n", [0, 1])
def test_short_inputs(n):
    codes = np.zeros(n, dtype=np.int32)
    counts = np.zeros((12, 12), dtype=np.int64)
    for k in filter(None, [_pykernels, _ckernels]):
        k.add_bigrams(codes, counts)
        assert counts.sum() == 0
        assert k.gap_instances(codes, MASK, 6).shape == (0, 3)
