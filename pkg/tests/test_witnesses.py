from __future__ import annotations

import math

import numpy as np
import pytest

from steercert.engine import lhs_feasibility_qubit
from steercert.errors import InputError
from steercert.scenario import (
    assemblage_from_povms,
    pauli_observable,
    pauli_povm,
    singlet,
    werner_state,
)
from steercert.witnesses import CorrelatorSet, cjwr, correlators_from_assemblage, s_m

RNG = np.random.default_rng(7103)

AXES = {2: ("x", "z"), 3: ("x", "y", "z")}


def matched(p, m):
    axes = AXES[m]
    asm = assemblage_from_povms(werner_state(p), [pauli_povm(ax) for ax in axes])
    obs = [pauli_observable(ax) for ax in axes]
    return correlators_from_assemblage(asm, obs)


def test_correlator_set_validation():
    c = CorrelatorSet(2, (-1.0, 0.5))
    assert c.values == (-1.0, 0.5)
    with pytest.raises(InputError):
        CorrelatorSet(2, (-1.0,))
    with pytest.raises(InputError):
        CorrelatorSet(1, (1.5,))


def test_singlet_matched_correlators_are_minus_one():
    c = matched(1.0, 2)
    np.testing.assert_allclose(c.values, [-1.0, -1.0], atol=1e-12)
    assert abs(s_m(c) + 1.0) < 1e-12


def test_werner_matched_correlators_scale_linearly():
    for p in (0.0, 0.3, 0.8):
        for m in (2, 3):
            c = matched(p, m)
            np.testing.assert_allclose(c.values, [-p] * m, atol=1e-12)
    assert abs(s_m(matched(0.8, 2)) + 0.8) < 1e-12


def test_cjwr_known_values():
    r = cjwr(matched(0.75, 2))
    assert abs(r.F - 0.75 * math.sqrt(2.0)) < 1e-12 and r.violated
    r = cjwr(matched(0.6, 3))
    assert abs(r.F - 0.6 * math.sqrt(3.0)) < 1e-12 and r.violated
    r = cjwr(matched(0.5, 2))
    assert abs(r.F - 0.5 * math.sqrt(2.0)) < 1e-12 and not r.violated


def test_f_equals_sqrt_m_times_mean_identity():
    for _ in range(200):
        m = int(RNG.integers(1, 7))
        values = RNG.uniform(-1.0, 1.0, size=m)
        c = CorrelatorSet(m, tuple(values))
        f = cjwr(c).F
        assert abs(f - math.sqrt(m) * abs(s_m(c))) <= 1e-15


def test_observable_validation():
    asm = assemblage_from_povms(singlet(), [pauli_povm("x"), pauli_povm("z")])
    with pytest.raises(InputError):
        correlators_from_assemblage(asm, [pauli_observable("x")])  # wrong count
    with pytest.raises(InputError):
        correlators_from_assemblage(asm, [0.5 * np.eye(2), pauli_observable("z")])
    with pytest.raises(InputError):
        correlators_from_assemblage(asm, [np.array([[0, 1], [0, 0]]), pauli_observable("z")])


def test_witness_never_violated_on_certified_local_models():
    # soundness: an inner-feasible assemblage cannot beat the local bound
    for p in (0.0, 0.25, 0.5, 0.65):
        for m in (2, 3):
            axes = AXES[m]
            asm = assemblage_from_povms(werner_state(p), [pauli_povm(ax) for ax in axes])
            if lhs_feasibility_qubit(asm, mesh=162).is_feasible:
                f = cjwr(matched(p, m)).F
                assert f <= 1.0 + 1e-8


def test_random_axis_correlators_stay_in_range():
    for _ in range(20):
        v = RNG.normal(size=3)
        v /= np.linalg.norm(v)
        asm = assemblage_from_povms(werner_state(0.9), [pauli_povm(tuple(v))])
        c = correlators_from_assemblage(asm, [pauli_observable(tuple(v))])
        assert abs(c.values[0]) <= 1.0 + 1e-12
