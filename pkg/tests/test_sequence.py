import json
import re

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpforge.catalog import get_entry
from cpforge.metrics import populations_from_ground
from cpforge.model import ContractError, Pulse, SystemParams, pulse_propagator, unitarity_error
from cpforge.sequence import (
    CompositeSequence,
    SequenceFormatError,
    compose,
    load_sequence,
    sequence_from_dict,
    sequence_to_dict,
    shift_all_phases,
    total_area,
)

from . import oracle

PI = np.pi


def random_sequence(rng, n=None, delta=None):
    n = n or int(rng.integers(1, 9))
    delta = delta or float(rng.choice([0.5, 2.0, 20.0]))
    return CompositeSequence.from_arrays(rng.uniform(0, 2 * PI, n), rng.uniform(0, 2 * PI, n), delta)


def test_empty_sequence_rejected():
    with pytest.raises(ContractError):
        CompositeSequence((), SystemParams(0.5))


def test_single_pulse_compose_is_propagate():
    p = Pulse(1.3, 0.4)
    seq = CompositeSequence((p,), SystemParams(0.5))
    np.testing.assert_array_equal(compose(seq, 0.05), pulse_propagator(p, 0.05, SystemParams(0.5)))


def test_two_zero_pulses():
    seq = CompositeSequence((Pulse(0.0), Pulse(0.0)), SystemParams(0.5))
    np.testing.assert_allclose(compose(seq), np.diag([1, 1, np.exp(1j)]), atol=1e-14)


def test_compose_order_first_pulse_acts_first():
    a, b = Pulse(1.1, 0.2), Pulse(0.7, 1.9)
    params = SystemParams(0.5)
    seq = CompositeSequence((a, b), params)
    expect = pulse_propagator(b, 0.0, params) @ pulse_propagator(a, 0.0, params)
    np.testing.assert_allclose(compose(seq), expect, atol=1e-15)


def test_compose_rejects_bad_eps():
    seq = CompositeSequence((Pulse(1.0),), SystemParams(0.5))
    with pytest.raises(ContractError):
        compose(seq, -1.0)


def test_catalog_p1_against_oracle():
    seq = get_entry("P1").sequence
    U = compose(seq, 0.0)
    ref = oracle.sequence_propagator(seq.rabis, seq.phases, 0.0, 0.5)
    np.testing.assert_allclose(U, ref, atol=1e-10)
    assert abs(U[1, 0]) ** 2 >= 0.99


def test_total_area():
    assert total_area(CompositeSequence((Pulse(PI),), SystemParams(20))) == pytest.approx(PI)
    assert total_area(get_entry("H").sequence) / PI == pytest.approx(7.55, abs=0.01)
    assert total_area(get_entry("T").sequence) / PI == pytest.approx(3.44, abs=0.01)


def test_shift_zero_is_identity():
    seq = get_entry("X").sequence
    assert shift_all_phases(seq, 0.0) == seq


def test_shift_pi_keeps_populations():
    rng = np.random.default_rng(11)
    seq = random_sequence(rng)
    a = populations_from_ground(compose(seq, 0.07))
    b = populations_from_ground(compose(shift_all_phases(seq, PI), 0.07))
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_catalog_p1_profile_gauge_invariant():
    seq = get_entry("P1").sequence
    shifted = shift_all_phases(seq, 0.37)
    for e in np.linspace(-0.5, 0.5, 11):
        np.testing.assert_allclose(
            populations_from_ground(compose(seq, e)),
            populations_from_ground(compose(shifted, e)),
            atol=1e-12,
        )


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-10, 10), st.floats(-0.5, 0.5))
def test_gauge_invariance_property(seed, chi, eps):
    rng = np.random.default_rng(seed)
    seq = random_sequence(rng)
    U = compose(seq, eps)
    V = compose(shift_all_phases(seq, chi), eps)
    np.testing.assert_allclose(np.abs(V[:, 0]), np.abs(U[:, 0]), atol=1e-12)
    assert total_area(shift_all_phases(seq, chi)) == total_area(seq)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-0.5, 0.5))
def test_concatenation_is_matrix_product(seed, eps):
    rng = np.random.default_rng(seed)
    s1 = random_sequence(rng, delta=0.5)
    s2 = random_sequence(rng, delta=0.5)
    both = s1.then(s2)
    np.testing.assert_allclose(compose(both, eps), compose(s2, eps) @ compose(s1, eps), atol=1e-12)
    assert unitarity_error(compose(both, eps)) < 1e-12


def test_concatenation_requires_same_delta():
    rng = np.random.default_rng(0)
    with pytest.raises(ContractError):
        random_sequence(rng, delta=0.5).then(random_sequence(rng, delta=2.0))


def test_json_round_trip(tmp_path):
    seq = get_entry("P1half").sequence
    doc = sequence_to_dict(seq)
    assert set(doc) == {"name", "delta_T", "pulses"}
    assert set(doc["pulses"][0]) == {"rabi_over_pi", "phase_over_pi", "duration_T"}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc))
    back = load_sequence(path)
    assert len(back) == len(seq) and back.params == seq.params and back.name == seq.name
    np.testing.assert_allclose(compose(back, 0.02), compose(seq, 0.02), atol=1e-14)


@pytest.mark.parametrize(
    "doc, msg",
    [
        ({"pulses": [{"rabi_over_pi": 1, "phase_over_pi": 0}]}, "delta_T"),
        ({"delta_T": 0.5, "pulses": []}, "pulses"),
        ({"delta_T": 0.5, "pulses": [{"phase_over_pi": 0}]}, "rabi_over_pi"),
        ({"delta_T": 0.5, "pulses": [{"rabi_over_pi": "x", "phase_over_pi": 0}]}, "rabi_over_pi"),
        ({"delta_T": 0.5, "pulses": [{"rabi_over_pi": -1, "phase_over_pi": 0}]}, "pulses[0]"),
        ({"delta_T": -0.5, "pulses": [{"rabi_over_pi": 1, "phase_over_pi": 0}]}, "delta_T"),
    ],
)
def test_malformed_documents(doc, msg):
    with pytest.raises(SequenceFormatError, match=re.escape(msg)):
        sequence_from_dict(doc)
