import math

import numpy as np
import pytest

import sideinfo as si
from sideinfo.errors import NotProper, UnboundedBelow, UnknownLoss
from sideinfo.losses import simplex_grid

LN2 = math.log(2)


class TestBuiltinLoss:
    def test_log_value(self):
        l = si.builtin_loss("log", 2)
        assert l.eval_fn(0, np.array([0.5, 0.5])) == pytest.approx(LN2, abs=1e-12)

    def test_log_infinite_at_zero_mass(self):
        l = si.builtin_loss("log", 2)
        assert l.eval_fn(1, np.array([1.0, 0.0])) == math.inf

    def test_zero_one_diagonal(self):
        l = si.builtin_loss("zero_one", 3)
        assert l.matrix[1, 1] == 0.0
        assert l.matrix[0, 1] == 1.0

    def test_brier_perfect_forecast(self):
        l = si.builtin_loss("brier", 2)
        assert l.eval_fn(0, np.array([1.0, 0.0])) == 0.0

    def test_spherical(self):
        l = si.builtin_loss("spherical", 2)
        assert l.eval_fn(0, np.array([0.5, 0.5])) == pytest.approx(-0.5 / math.sqrt(0.5))

    def test_absolute_ordered(self):
        l = si.builtin_loss("absolute_ordered", 4)
        assert l.matrix[0, 3] == 3.0
        assert l.matrix[2, 2] == 0.0

    def test_hyphenated_name(self):
        assert si.builtin_loss("zero-one", 3).name == "zero_one"

    def test_unknown(self):
        with pytest.raises(UnknownLoss):
            si.builtin_loss("hinge", 3)


class TestBayesRisk:
    def test_log_attains_entropy(self):
        r = si.bayes_risk(si.builtin_loss("log", 3), [0.25, 0.25, 0.5])
        assert r.risk == pytest.approx(1.5 * LN2, abs=1e-12)
        assert r.method == "proper-fixed-point"

    def test_zero_one_column_min(self):
        r = si.bayes_risk(si.builtin_loss("zero_one", 3), [0.25, 0.25, 0.5])
        assert r.risk == pytest.approx(0.5, abs=1e-15)
        assert r.minimizer == 2
        assert r.method == "column-min"

    def test_brier_value(self):
        r = si.bayes_risk(si.builtin_loss("brier", 2), [0.5, 0.5])
        assert r.risk == pytest.approx(0.5, abs=1e-12)

    def test_tie_break_lowest_index(self):
        r = si.bayes_risk(si.builtin_loss("zero_one", 2), [0.5, 0.5])
        assert r.minimizer == 0

    def test_matrix_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            n, k = int(rng.integers(2, 6)), int(rng.integers(2, 7))
            mat = rng.normal(size=(n, k))
            p = rng.dirichlet(np.ones(n))
            r = si.bayes_risk(si.ActionMatrixLoss(matrix=mat), p)
            brute = min(float(np.dot(mat[:, a], p)) for a in range(k))
            assert r.risk == brute

    def test_infinite_entries_zero_weight(self):
        mat = np.array([[0.0, math.inf], [math.inf, 0.0]])
        r = si.bayes_risk(si.ActionMatrixLoss(matrix=mat), [1.0, 0.0])
        assert r.risk == 0.0
        assert r.minimizer == 0

    def test_no_finite_action(self):
        mat = np.array([[0.0, math.inf], [math.inf, 0.0]])
        with pytest.raises(UnboundedBelow):
            si.bayes_risk(si.ActionMatrixLoss(matrix=mat), [0.5, 0.5])

    def test_numeric_search_matches_proper_answer(self):
        # Brier minus its proper flag goes through the numeric tier; the true
        # minimum is still at q = p with risk 1 - sum p^2.
        p = np.array([0.2, 0.3, 0.5])
        proper = si.builtin_loss("brier", 3)
        blind = si.ScoringRuleLoss(eval_fn=proper.eval_fn, n=3, proper=False)
        r = si.bayes_risk(blind, p)
        assert r.method == "numeric-search"
        assert r.risk == pytest.approx(1 - float((p * p).sum()), abs=1e-6)
        assert r.grid_gap is not None

    def test_numeric_search_improper_rule(self):
        # linear score -Q(x): optimal report is the vertex at argmax p
        rule = si.ScoringRuleLoss(eval_fn=lambda x, q: -float(q[x]), n=2, proper=False)
        r = si.bayes_risk(rule, [0.6, 0.4])
        assert r.risk == pytest.approx(-0.6, abs=1e-9)


class TestVEnvelope:
    def test_log_is_neg_entropy(self):
        assert si.v_envelope(si.builtin_loss("log", 2), [0.5, 0.5]) == pytest.approx(-LN2)

    def test_zero_one(self):
        v = si.v_envelope(si.builtin_loss("zero_one", 3), [0.25, 0.25, 0.5])
        assert v == pytest.approx(-0.5, abs=1e-15)

    def test_finite_at_vertices(self):
        for name in ("log", "zero_one", "brier", "spherical", "absolute_ordered"):
            l = si.builtin_loss(name, 3)
            for i in range(3):
                assert math.isfinite(si.v_envelope(l, si.point_mass(i, 3)))

    def test_convexity_sampled(self):
        rng = np.random.default_rng(1)
        for name in ("log", "zero_one", "brier", "spherical", "absolute_ordered"):
            l = si.builtin_loss(name, 4)
            for _ in range(50):
                p = rng.dirichlet(np.ones(4))
                q = rng.dirichlet(np.ones(4))
                lam = float(rng.uniform())
                left = si.v_envelope(l, lam * p + (1 - lam) * q)
                right = lam * si.v_envelope(l, p) + (1 - lam) * si.v_envelope(l, q)
                assert left <= right + 1e-9

    def test_bounded_by_vertex_max(self):
        rng = np.random.default_rng(2)
        for name in ("log", "zero_one", "brier", "spherical", "absolute_ordered"):
            l = si.builtin_loss(name, 4)
            cap = max(si.v_envelope(l, si.point_mass(i, 4)) for i in range(4))
            for _ in range(50):
                assert si.v_envelope(l, rng.dirichlet(np.ones(4))) <= cap + 1e-9


class TestSavage:
    def test_neg_entropy_gives_log_loss(self):
        rule = si.savage_from_G(si.neg_entropy_oracle(), n=3)
        rng = np.random.default_rng(3)
        for _ in range(50):
            q = rng.dirichlet(np.ones(3))
            assert np.allclose(rule.loss_vector(q), -np.log(q), atol=1e-9)

    def test_sum_squares_gives_brier_minus_one(self):
        rule = si.savage_from_G(si.sum_squares_oracle(), n=3)
        brier = si.builtin_loss("brier", 3)
        rng = np.random.default_rng(4)
        for _ in range(50):
            q = rng.dirichlet(np.ones(3))
            assert np.allclose(rule.loss_vector(q), brier.loss_vector(q) - 1.0, atol=1e-9)

    def test_linear_gives_constant(self):
        c = np.array([1.0, -0.5, 2.0])
        rule = si.savage_from_G(si.linear_oracle(c), n=3)
        rng = np.random.default_rng(5)
        for _ in range(20):
            q = rng.dirichlet(np.ones(3))
            assert np.allclose(rule.loss_vector(q), -c, atol=1e-12)

    def test_envelope_recovers_g(self):
        g = si.sum_squares_oracle()
        rule = si.savage_from_G(g, n=3)
        rng = np.random.default_rng(6)
        for _ in range(50):
            p = rng.dirichlet(np.ones(3))
            assert si.v_envelope(rule, p) == pytest.approx(g.value(p), abs=1e-9)


class TestAuditPropriety:
    def test_log_passes(self):
        rep = si.audit_propriety(si.builtin_loss("log", 3), trials=100, seed=0)
        assert rep.worst_margin >= -1e-9

    def test_brier_passes(self):
        rep = si.audit_propriety(si.builtin_loss("brier", 3), trials=100, seed=0)
        assert rep.worst_margin >= -1e-9

    def test_linear_score_not_proper(self):
        rule = si.ScoringRuleLoss(eval_fn=lambda x, q: -float(q[x]), n=2, proper=False)
        with pytest.raises(NotProper) as exc:
            si.audit_propriety(rule, trials=100, seed=0)
        assert exc.value.margin < -1e-9
        assert exc.value.p is not None and exc.value.q is not None


def test_simplex_grid_counts():
    assert simplex_grid(2, 4).shape == (5, 2)
    g = simplex_grid(3, 10)
    assert g.shape == (66, 3)
    assert np.allclose(g.sum(axis=1), 1.0)
