import itertools
import math

import numpy as np
import pytest

import sideinfo as si
from sideinfo.errors import AlphabetTooLarge, ParameterOutOfRange

from conftest import random_joint

LN2 = math.log(2)


class TestCheckSufficient:
    def test_witness_merge_sufficient(self, witness_joint):
        t = si.Transform((0, 0, 1))
        cert = si.check_sufficient(t, witness_joint)
        assert cert.is_sufficient
        assert cert.max_class_tv <= 1e-15

    def test_bad_merge_not_sufficient(self, witness_joint):
        t = si.Transform((0, 1, 0))  # merge x1 with x3
        cert = si.check_sufficient(t, witness_joint)
        assert not cert.is_sufficient
        assert cert.max_class_tv == pytest.approx(1.0, abs=1e-12)

    def test_identity_always_sufficient(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            j = random_joint(rng, 4, 3)
            assert si.check_sufficient(si.Transform.identity(4), j).is_sufficient

    def test_zero_mass_symbols_exempt(self):
        j = si.validate_joint([[0.5, 0.0], [0.0, 0.5], [0.0, 0.0]])
        cert = si.check_sufficient(si.Transform((0, 1, 1)), j)
        assert cert.is_sufficient
        assert cert.zero_mass_symbols == (2,)

    def test_monotone_under_refinement(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            # joints with duplicated rows so coarse sufficient merges exist
            rows = rng.dirichlet(np.ones(3), size=2)
            assign = np.array([0, 0, 1, 1])
            px = rng.dirichlet(np.ones(4))
            j = si.Joint(px[:, None] * rows[assign])
            coarse = si.Transform((0, 0, 1, 1))
            assert si.check_sufficient(coarse, j).is_sufficient
            for refined in (si.Transform((0, 1, 2, 2)), si.Transform((0, 0, 1, 2)), si.Transform.identity(4)):
                assert si.check_sufficient(refined, j).is_sufficient


class TestEnumerateSufficient:
    def test_witness_joint_merges(self, witness_joint):
        suff = si.enumerate_sufficient(witness_joint)
        mappings = sorted(t.mapping for t in suff.merges)
        assert mappings == [(0, 0, 1), (0, 1, 2)]
        assert suff.permutations_exhaustive
        assert len(suff.permutations) == 6

    def test_product_joint_all_partitions(self):
        px = np.array([0.2, 0.3, 0.5])
        py = np.array([0.4, 0.6])
        j = si.Joint(px[:, None] * py[None, :])
        suff = si.enumerate_sufficient(j)
        assert len(suff.merges) == 5  # Bell(3)

    def test_distinct_rows_identity_only(self):
        j = si.validate_joint([[0.3, 0.0], [0.0, 0.3], [0.2, 0.2]])
        suff = si.enumerate_sufficient(j)
        assert [t.mapping for t in suff.merges] == [(0, 1, 2)]

    def test_every_enumerated_merge_verifies(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            rows = rng.dirichlet(np.ones(2), size=2)
            assign = rng.integers(0, 2, size=4)
            px = rng.dirichlet(np.ones(4))
            j = si.Joint(px[:, None] * rows[assign])
            for t in si.enumerate_sufficient(j).merges:
                assert si.check_sufficient(t, j).is_sufficient

    def test_alphabet_bound(self):
        j = si.Joint(np.full((13, 2), 1.0 / 26))
        with pytest.raises(AlphabetTooLarge):
            si.enumerate_sufficient(j)


class TestPushForward:
    def test_witness_merge(self, witness_joint):
        out = si.push_forward(witness_joint, si.Transform((0, 0, 1)))
        assert np.allclose(out.table, [[0.0, 0.5], [0.5, 0.0]])

    def test_identity_unchanged(self, witness_joint):
        out = si.push_forward(witness_joint, si.Transform.identity(3))
        assert np.array_equal(out.table, witness_joint.table)

    def test_constant_map(self, witness_joint):
        out = si.push_forward(witness_joint, si.Transform((0, 0, 0)))
        assert out.table.shape == (1, 2)
        assert np.allclose(out.table[0], [0.5, 0.5])

    def test_padded_keeps_alphabet(self, witness_joint):
        out = si.padded_push_forward(witness_joint, si.Transform((0, 0, 1)))
        assert out.table.shape == (3, 2)
        assert np.allclose(out.table, [[0.0, 0.5], [0.0, 0.0], [0.5, 0.0]])

    def test_mi_preserved_under_sufficient_merge(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            rows = rng.dirichlet(np.ones(3), size=2)
            assign = np.array([0, 0, 1, 1])
            px = rng.dirichlet(np.ones(4))
            j = si.Joint(px[:, None] * rows[assign])
            for t in si.enumerate_sufficient(j).merges:
                assert si.mutual_information(si.push_forward(j, t)) == pytest.approx(
                    si.mutual_information(j), abs=1e-9
                )


class TestAuditDpa:
    def test_log_clean_on_witness(self, witness_joint):
        rep = si.audit_dpa(si.builtin_loss("log", 3), witness_joint)
        assert rep.clean
        merged = [e for e in rep.entries if e.transform.mapping == (0, 0, 1)]
        assert merged[0].c_after == pytest.approx(LN2, abs=1e-12)

    def test_zero_one_violation(self, witness_joint):
        rep = si.audit_dpa(si.builtin_loss("zero_one", 3), witness_joint)
        kinds = {w.kind for w in rep.violations}
        assert "dpa_violation" in kinds
        w = next(w for w in rep.violations if w.kind == "dpa_violation")
        assert w.c_before == pytest.approx(0.25, abs=1e-15)
        assert w.c_after == pytest.approx(0.5, abs=1e-15)

    def test_brier_violation(self, witness_joint):
        rep = si.audit_dpa(si.builtin_loss("brier", 3), witness_joint)
        w = next(w for w in rep.violations if w.kind == "dpa_violation")
        assert w.c_before == pytest.approx(0.375, abs=1e-15)
        assert w.c_after == pytest.approx(0.5, abs=1e-15)

    def test_log_clean_on_random_instances(self):
        # joints built with duplicated conditional rows so nontrivial merges exist
        rng = np.random.default_rng(4)
        for _ in range(1000):
            n = int(rng.integers(2, 6))
            rows = rng.dirichlet(np.ones(3), size=max(1, n // 2))
            assign = rng.integers(0, rows.shape[0], size=n)
            px = rng.dirichlet(np.ones(n))
            j = si.Joint(px[:, None] * rows[assign])
            assert si.audit_dpa(si.builtin_loss("log", n), j).clean

    def test_workers_agree(self, witness_joint):
        l = si.builtin_loss("zero_one", 3)
        r1 = si.audit_dpa(l, witness_joint, workers=1)
        r4 = si.audit_dpa(l, witness_joint, workers=4)
        assert [e.c_after for e in r1.entries] == [e.c_after for e in r4.entries]
        assert len(r1.violations) == len(r4.violations)

    def test_symmetric_g_no_asymmetry_witness(self):
        rng = np.random.default_rng(5)
        rule = si.savage_from_G(si.sum_squares_oracle(), n=2)
        for _ in range(20):
            j = random_joint(rng, 2, 2)
            assert si.audit_dpa(rule, j).clean

    def test_asymmetric_g_yields_asymmetry_witness(self):
        # q1^2 would not do: on the binary simplex it differs from the
        # symmetric -q1*q2 by a linear term, which Jensen gaps ignore.
        g = si.ConvexOracle(
            value=lambda q: float(q[0] ** 3),
            subgradient=lambda q: np.array([3.0 * q[0] ** 2, 0.0]),
            symmetric=False,
        )
        rule = si.savage_from_G(g, n=2)
        j = si.validate_joint([[0.5, 0.2], [0.1, 0.2]])
        rep = si.audit_dpa(rule, j)
        assert any(w.kind == "asymmetry" for w in rep.violations)

    def test_equality_deviations_reported_separately(self, witness_joint):
        # zero-one's merge strictly raises C, so it appears in both lists
        rep = si.audit_dpa(si.builtin_loss("zero_one", 3), witness_joint)
        assert rep.equality_deviations
        assert all(
            e.transform.image_size < witness_joint.nx for e in rep.equality_deviations
        )


class TestProofFamily:
    def test_spec_instance(self, witness_joint):
        j = si.proof_family(3, t=0.5, lambda1=0.0, lambda2=1.0, alpha=0.5)
        assert np.allclose(j.table, witness_joint.table, atol=1e-15)

    def test_equal_lambdas_rejected(self):
        with pytest.raises(ParameterOutOfRange):
            si.proof_family(3, t=0.5, lambda1=0.5, lambda2=0.5, alpha=0.5)

    def test_t_one_endpoint(self):
        j = si.proof_family(3, t=1.0, lambda1=0.0, lambda2=1.0, alpha=0.5)
        assert np.allclose(j.table[1], 0.0)  # x2 carries no mass at t=1
        cert = si.check_sufficient(si.Transform((0, 0, 1)), j)
        assert cert.is_sufficient

    def test_merge_sufficient_by_construction(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            tail = rng.dirichlet(np.ones(2)) * rng.uniform(0.05, 0.5)
            r = 1.0 - tail.sum()
            lam = np.sort(rng.uniform(0.0, r, size=2))
            if lam[0] == lam[1]:
                continue
            j = si.proof_family(
                5,
                t=float(rng.uniform()),
                lambda1=float(lam[0]),
                lambda2=float(lam[1]),
                alpha=float(rng.uniform()),
                tail=tuple(tail),
            )
            assert si.check_sufficient(si.Transform((0, 0, 1, 2, 3)), j, tol=1e-9).is_sufficient

    def test_tail_validation(self):
        with pytest.raises(ParameterOutOfRange):
            si.proof_family(4, t=0.5, lambda1=0.0, lambda2=0.5, alpha=0.5, tail=(0.7, 0.4))
        with pytest.raises(ParameterOutOfRange):
            si.proof_family(3, t=1.5, lambda1=0.0, lambda2=1.0, alpha=0.5)


class TestFindViolation:
    def test_zero_one_finds_witness(self):
        w = si.find_violation(si.builtin_loss("zero_one", 3), 3, budget=10_000, seed=0)
        assert w is not None and w.kind == "dpa_violation"
        assert si.verify_witness(si.builtin_loss("zero_one", 3), w)

    def test_brier_finds_witness(self):
        w = si.find_violation(si.builtin_loss("brier", 3), 3, budget=10_000, seed=0)
        assert w is not None
        assert si.verify_witness(si.builtin_loss("brier", 3), w)

    def test_log_returns_none(self):
        w = si.find_violation(si.builtin_loss("log", 3), 3, budget=1_500, seed=0)
        assert w is None

    def test_brier_none_on_binary(self):
        w = si.find_violation(si.builtin_loss("brier", 2), 2, budget=1_500, seed=0)
        assert w is None

    def test_deterministic_across_workers(self):
        l = si.builtin_loss("zero_one", 3)
        w1 = si.find_violation(l, 3, budget=2_000, seed=7, workers=1)
        w4 = si.find_violation(l, 3, budget=2_000, seed=7, workers=4)
        assert w1.transform.mapping == w4.transform.mapping
        assert np.array_equal(w1.joint.table, w4.joint.table)
        assert (w1.c_before, w1.c_after) == (w4.c_before, w4.c_after)

    def test_witness_reverification_exact(self):
        l = si.builtin_loss("zero_one", 4)
        w = si.find_violation(l, 4, budget=5_000, seed=1)
        assert w is not None
        before = si.benefit(l, w.joint).c_value
        assert abs(before - w.c_before) <= 1e-12


def test_permutation_invariance_for_symmetric_losses():
    # losses whose normalized G is permutation symmetric keep C under relabeling
    rng = np.random.default_rng(8)
    for name in ("log", "zero_one", "brier", "spherical"):
        l = si.builtin_loss(name, 3)
        for _ in range(20):
            j = random_joint(rng, 3, 3)
            c = si.benefit(l, j).c_value
            for perm in itertools.permutations(range(3)):
                pj = si.push_forward(j, si.Transform(perm))
                assert si.benefit(l, pj).c_value == pytest.approx(c, abs=1e-9)
