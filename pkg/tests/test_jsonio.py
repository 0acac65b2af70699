import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zenolab import jsonio
from zenolab.sampling import random_gkls, random_kraus

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50)
@given(st.integers(1, 3).flatmap(lambda d: st.lists(st.tuples(finite, finite), min_size=d * d, max_size=d * d)))
def test_operator_roundtrip_is_bit_exact(pairs):
    d = int(round(len(pairs) ** 0.5))
    a = np.array([complex(r, i) for r, i in pairs]).reshape(d, d)
    back = jsonio.operator_from_json(json.loads(jsonio.dumps(jsonio.operator_to_json(a))))
    assert np.array_equal(back.view(float), a.view(float))


def test_kraus_and_gkls_roundtrip(rng):
    k = random_kraus(3, rng)
    k2 = jsonio.kraus_from_json(json.loads(jsonio.dumps(jsonio.kraus_to_json(k))))
    assert all(np.array_equal(a, b) for a, b in zip(k.operators, k2.operators))
    g = random_gkls(2, rng, n_jumps=2)
    g2 = jsonio.gkls_from_json(json.loads(jsonio.dumps(jsonio.gkls_to_json(g))))
    assert np.array_equal(g.hamiltonian, g2.hamiltonian)
    assert all(np.array_equal(a, b) for a, b in zip(g.jumps, g2.jumps))


def test_malformed_operator():
    with pytest.raises(ValueError):
        jsonio.operator_from_json({"dim": 2, "entries": [[[1, 0]]]})
    with pytest.raises(ValueError):
        jsonio.operator_from_json({"entries": []})
