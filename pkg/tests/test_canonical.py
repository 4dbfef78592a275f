from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from agentassist import canonical


def test_sorted_keys_and_bare_ints():
    assert canonical.dumps({"b": 2, "a": 1}) == '{"a":1,"b":2}'


def test_float_six_decimals():
    assert canonical.dumps(0.5) == "0.500000"
    assert canonical.dumps(11.7) == "11.700000"
    assert canonical.dumps(-0.0) == "0.000000"


def test_bool_not_rendered_as_int():
    assert canonical.dumps({"x": True, "y": 1}) == '{"x":true,"y":1}'


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        canonical.dumps(float("nan"))
    with pytest.raises(ValueError):
        canonical.dumps(float("inf"))


def test_serialize_twice_identical_bytes():
    doc = {"z": [1, 2.5, "a"], "a": {"nested": None, "ok": False}}
    assert canonical.dumps(doc) == canonical.dumps(doc)


# floats restricted to 6-decimal representables, matching the canonical form
_sixdec = st.integers(min_value=-10_000_000, max_value=10_000_000).map(lambda n: n / 1e6)

_docs = st.recursive(
    st.none() | st.booleans() | st.integers(-10**9, 10**9) | _sixdec | st.text(max_size=20),
    lambda children: st.lists(children, max_size=4)
    | st.dictionaries(st.text(max_size=8), children, max_size=4),
    max_leaves=20,
)


@given(_docs)
def test_round_trip_identity(doc):
    line = canonical.dumps(doc)
    parsed = canonical.loads(line)
    assert parsed == _normalize(doc)
    # canonical form is a fixed point
    assert canonical.dumps(parsed) == line


def _normalize(doc):
    # lists come back as lists; tuples were never generated here
    if isinstance(doc, dict):
        return {k: _normalize(v) for k, v in doc.items()}
    if isinstance(doc, list):
        return [_normalize(v) for v in doc]
    return doc
