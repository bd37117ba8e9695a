from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from steercert import linalg
from steercert.boxworld import (
    GptAssemblage,
    mix_assemblages,
    prbox_assemblage,
    uniform_assemblage,
)
from steercert.engine import (
    DeterministicStrategy,
    check_value_assignment,
    deterministic_bloch_set,
    enumerate_strategies,
    joint_measurability,
    lhs_feasibility_boxworld,
    lhs_feasibility_qubit,
    pv_feasibility,
    threshold_scan,
)
from steercert.errors import InputError, NonMonotoneFamilyError
from steercert.scenario import (
    Assemblage,
    Povm,
    assemblage_from_povms,
    noisy_pauli_povm,
    pauli_povm,
    singlet,
    werner_state,
)
from helpers import random_unit_vector

RNG = np.random.default_rng(55101)

XZ = [pauli_povm("x"), pauli_povm("z")]


def werner_assemblage(p, axes=("x", "z")):
    return assemblage_from_povms(werner_state(p), [pauli_povm(ax) for ax in axes])


def test_enumerate_strategies_lexicographic_and_cap():
    strategies = enumerate_strategies(2, 2)
    assert [s.responses for s in strategies] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    with pytest.raises(InputError):
        enumerate_strategies(10, 4, cap=4096)


def test_werner_low_weight_is_feasible_with_tight_model():
    asm = werner_assemblage(0.4)
    verdict = lhs_feasibility_qubit(asm, mesh=162)
    assert verdict.is_feasible
    model = verdict.lhs_model
    assert model.max_deviation(asm) <= 1e-8
    assert abs(model.total_weight() - 1.0) <= 1e-8
    assert np.min(model.weights) >= -1e-12
    for omega in model.hidden_states:
        assert linalg.psd_check(omega)
        assert abs(omega.trace().real - 1.0) < 1e-9


def test_singlet_matched_paulis_is_infeasible_with_witness_certificate():
    asm = werner_assemblage(1.0)
    verdict = lhs_feasibility_qubit(asm, mesh=162)
    assert verdict.is_infeasible
    # re-verify the certificate as a steering witness from first principles:
    # every deterministic strategy on every qubit state must score >= 0
    # while the assemblage scores < 0.
    c = np.asarray(verdict.certificate, dtype=float)

    def rows_for(blocks):
        rows = []
        for x in range(asm.settings):
            for a in range(asm.outcomes):
                t, rx, ry, rz = linalg.bloch_components(blocks[(x, a)])
                rows.extend([t, rx, ry, rz])
        return np.asarray(rows)

    assert c @ rows_for(asm.sigma) < -1e-10
    for strat in enumerate_strategies(2, 2):
        for _ in range(40):
            n = random_unit_vector(RNG)
            omega = linalg.bloch_state(n)
            blocks = {
                (x, a): (omega if strat.responses[x] == a else np.zeros((2, 2)))
                for x in range(2)
                for a in range(2)
            }
            assert c @ rows_for(blocks) >= -1e-9


def test_mesh_ladder_verdicts():
    coarse = lhs_feasibility_qubit(werner_assemblage(0.72), mesh=12)
    assert coarse.is_undecided
    assert coarse.gap is not None
    fine = lhs_feasibility_qubit(werner_assemblage(0.72), mesh=642)
    assert fine.is_infeasible


def test_inner_feasibility_is_monotone_in_mesh():
    for mesh in (12, 42, 162):
        assert lhs_feasibility_qubit(werner_assemblage(0.4), mesh=mesh).is_feasible


def test_outer_infeasibility_persists_on_finer_meshes():
    for mesh in (42, 162, 642):
        assert lhs_feasibility_qubit(werner_assemblage(0.85), mesh=mesh).is_infeasible


def test_feasible_set_is_convex():
    a1 = werner_assemblage(0.30)
    a2 = werner_assemblage(0.55)
    lam = 0.37
    sigma = {
        k: lam * a1.sigma[k] + (1 - lam) * a2.sigma[k] for k in a1.sigma
    }
    mixed = Assemblage(settings=2, outcomes=2, dim_b=2, sigma=sigma)
    assert lhs_feasibility_qubit(mixed, mesh=162).is_feasible


def test_three_setting_assemblage():
    asm = werner_assemblage(0.5, axes=("x", "y", "z"))
    assert lhs_feasibility_qubit(asm, mesh=162).is_feasible
    asm = werner_assemblage(0.7, axes=("x", "y", "z"))
    assert lhs_feasibility_qubit(asm, mesh=162).is_infeasible


def test_verdict_serialization():
    import json

    verdict = lhs_feasibility_qubit(werner_assemblage(0.4), mesh=42)
    doc = verdict.to_dict()
    json.dumps(doc)
    assert doc["status"] == "feasible" and "lhs_model" in doc
    assert doc["meta"]["mesh_size"] >= 42


# ---------------------------------------------------------------------------
# box-world engine

def test_prbox_is_infeasible_with_exact_certificate():
    verdict = lhs_feasibility_boxworld(prbox_assemblage())
    assert verdict.is_infeasible
    c = verdict.certificate
    assert all(isinstance(v, Fraction) for v in c)
    # re-verify exactly: rows are the stacked tables of each (x, a) entry
    asm = prbox_assemblage()

    def rows_for(entry_table):
        rows = []
        for x in range(2):
            for a in range(2):
                cell = entry_table[(x, a)]
                for y in range(2):
                    for b in range(2):
                        rows.append(cell.get((y, b), Fraction(0)))
        return rows

    rhs = {
        (x, a): {
            (y, b): asm.weight(x, a) * asm.state(x, a).prob(y, b)
            for y in range(2)
            for b in range(2)
        }
        for x in range(2)
        for a in range(2)
    }
    assert sum(ci * ri for ci, ri in zip(c, rows_for(rhs))) < 0
    for alice in enumerate_strategies(2, 2):
        for bob in enumerate_strategies(2, 2):
            col = {
                (x, a): {
                    (y, b): Fraction(1)
                    if alice.responses[x] == a and bob.responses[y] == b
                    else Fraction(0)
                    for y in range(2)
                    for b in range(2)
                }
                for x in range(2)
                for a in range(2)
            }
            assert sum(ci * ri for ci, ri in zip(c, rows_for(col))) >= 0


def test_uniform_box_is_feasible_with_exact_model():
    verdict = lhs_feasibility_boxworld(uniform_assemblage())
    assert verdict.is_feasible
    assert verdict.lhs_model is not None  # reconstruction was verified exactly


def test_isotropic_box_boundary():
    half = mix_assemblages(Fraction(1, 2), prbox_assemblage(), uniform_assemblage())
    assert lhs_feasibility_boxworld(half).is_feasible
    above = mix_assemblages(
        Fraction(1, 2) + Fraction(1, 1000), prbox_assemblage(), uniform_assemblage()
    )
    assert lhs_feasibility_boxworld(above).is_infeasible


def test_exact_box_threshold_bisection():
    def family(lam):
        return mix_assemblages(lam, prbox_assemblage(), uniform_assemblage())

    feas, infeas = threshold_scan(
        family, lhs_feasibility_boxworld, Fraction(0), Fraction(1), Fraction(1, 256)
    )
    assert feas == Fraction(1, 2)
    assert infeas is not None and Fraction(0) < infeas - feas <= Fraction(1, 256)


# ---------------------------------------------------------------------------
# predetermined values

def test_deterministic_bloch_set_shapes():
    det = deterministic_bloch_set([pauli_povm("z")])
    assert det.shape == (2, 3)
    np.testing.assert_allclose(np.abs(det[:, 2]), [1.0, 1.0], atol=1e-12)

    det = deterministic_bloch_set(XZ)
    assert det.shape == (0, 3)  # no state answers both x and z deterministically

    det = deterministic_bloch_set([noisy_pauli_povm("z", 0.9)])
    assert det.shape == (0, 3)  # noisy effects are never certain

    trivial = Povm(label="coin", effects=(linalg.I2, np.zeros((2, 2))), dim=2)
    assert deterministic_bloch_set([trivial]) is None  # unconstrained


def test_pv_single_matched_test_is_feasible():
    asm = assemblage_from_povms(singlet(), [pauli_povm("z")])
    verdict = pv_feasibility(asm, [pauli_povm("z")], mesh=162)
    assert verdict.is_feasible
    assert verdict.meta["deterministic_vertices"] == 2


def test_pv_incompatible_tests_are_infeasible():
    asm = werner_assemblage(1.0)
    verdict = pv_feasibility(asm, XZ, mesh=162)
    assert verdict.is_infeasible
    # empty deterministic set and a nonzero assemblage: exact, not mesh-limited
    assert verdict.meta["deterministic_vertices"] == 0


def test_pv_requires_test_family_for_quantum_input():
    with pytest.raises(InputError):
        pv_feasibility(werner_assemblage(0.4))


def test_pv_box_matches_lhs():
    v1 = pv_feasibility(prbox_assemblage())
    v2 = lhs_feasibility_boxworld(prbox_assemblage())
    assert v1.status == v2.status == "infeasible"


def test_pv_feasible_implies_lhs_feasible_on_samples():
    # hidden states pinned to a test family are a special local model
    for p in (0.0, 0.2, 0.4):
        asm = werner_assemblage(p)
        for tests in ([pauli_povm("z")], [pauli_povm("x")]):
            pv = pv_feasibility(asm, tests, mesh=162)
            if pv.is_feasible:
                assert not lhs_feasibility_qubit(asm, mesh=162).is_infeasible


def test_check_value_assignment_rules():
    z = pauli_povm("z")
    assert check_value_assignment([z], [[1, 0]])
    assert not check_value_assignment([z], [[1, 1]])
    assert not check_value_assignment([z], [[0, 0]])
    with pytest.raises(InputError):
        check_value_assignment([z], [[1]])
    with pytest.raises(InputError):
        check_value_assignment([z], [[2, 0]])

    # the same effect appearing in two groups must get one value
    e = np.diag([0.5, 0.0])
    g1 = Povm(label="g1", effects=(e, linalg.I2 - e), dim=2)
    g2 = Povm(label="g2", effects=(e, linalg.I2 - e), dim=2)
    assert check_value_assignment([g1, g2], [[1, 0], [1, 0]])
    assert not check_value_assignment([g1, g2], [[1, 0], [0, 1]])


def test_check_value_assignment_coarse_graining():
    effects = (np.diag([0.5, 0.0]), np.diag([0.3, 0.2]), np.diag([0.2, 0.8]))
    povm = Povm(label="three", effects=effects, dim=2)
    assignment = [[0, 1, 0]]
    assert check_value_assignment([povm], assignment, coarse_grainings=[(0, (1, 2), 1)])
    assert not check_value_assignment([povm], assignment, coarse_grainings=[(0, (1, 2), 0)])
    assert not check_value_assignment([povm], assignment, coarse_grainings=[(0, (0,), 1)])


# ---------------------------------------------------------------------------
# joint measurability

def test_identical_projective_tests_are_jointly_measurable():
    verdict = joint_measurability([pauli_povm("z"), pauli_povm("z")], mesh=162)
    assert verdict.is_feasible
    parents = verdict.parent_effects
    total = sum(parents)
    np.testing.assert_allclose(total, linalg.I2, atol=1e-7)
    for g in parents:
        assert linalg.psd_check(g, tol=1e-7)


def test_sharp_x_and_z_are_incompatible():
    assert joint_measurability(XZ, mesh=162).is_infeasible


def test_noisy_x_and_z_compatibility_threshold():
    noisy = lambda eta: [noisy_pauli_povm("x", eta), noisy_pauli_povm("z", eta)]
    assert joint_measurability(noisy(0.5), mesh=162).is_feasible
    assert joint_measurability(noisy(0.9), mesh=162).is_infeasible


# ---------------------------------------------------------------------------
# threshold scanning

def test_threshold_scan_brackets_werner_two_setting():
    checker = lambda a: lhs_feasibility_qubit(a, mesh=162)
    feas, infeas = threshold_scan(
        lambda p: werner_assemblage(p), checker, 0.0, 1.0, 0.02
    )
    assert feas < 1.0 / math.sqrt(2.0) < infeas
    assert infeas - feas <= 0.05


def test_threshold_scan_constant_feasible_family():
    checker = lhs_feasibility_boxworld
    feas, infeas = threshold_scan(
        lambda lam: uniform_assemblage(), checker, Fraction(0), Fraction(1), Fraction(1, 16)
    )
    assert feas == Fraction(1) and infeas is None


def test_threshold_scan_rejects_non_monotone_family():
    class Fake:
        def __init__(self, status):
            self.status = status
            self.is_feasible = status == "feasible"
            self.is_infeasible = status == "infeasible"
            self.is_undecided = False

    # feasible above an infeasible point: not a one-crossing family
    checker = lambda p: Fake("feasible" if p > 0.6 else "infeasible")
    with pytest.raises(NonMonotoneFamilyError):
        threshold_scan(lambda p: p, checker, 0.0, 1.0, 0.01)


def test_threshold_scan_input_validation():
    with pytest.raises(InputError):
        threshold_scan(lambda p: p, lambda a: None, 1.0, 0.0, 0.1)
