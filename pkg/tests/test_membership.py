"""Local-polytope membership: vertices, verdicts, certificates, CHSH."""

import numpy as np
import pytest

from corrsets.errors import DimensionCapError, ShapeError
from corrsets.linalg import philox_rng
from corrsets.membership import (
    BellFunctional,
    bell_value,
    chsh_game_functional,
    chsh_optimal_rep,
    enumerate_deterministic,
    is_local,
)
from corrsets.operators import eval_max_ent, validate_measure
from corrsets.tensors import (
    Correlation,
    convex_combine,
    marginals,
    pr_box,
    sup_distance,
    uniform_correlation,
    validate_correlation,
)

CHSH_VALUE = (2 + np.sqrt(2)) / 4


class TestEnumerateDeterministic:
    def test_counts(self):
        assert len(enumerate_deterministic(1, 1, 2)) == 4
        assert len(enumerate_deterministic(2, 2, 2)) == 16
        assert len(enumerate_deterministic(2, 2, 3)) == 81

    def test_every_vertex_valid_and_nonsignalling(self):
        for vertex in enumerate_deterministic(2, 2, 2):
            assert validate_correlation(vertex).ok
            assert marginals(vertex).max_signalling_defect == 0.0

    def test_cap(self):
        with pytest.raises(DimensionCapError):
            enumerate_deterministic(4, 4, 4, max_vertices=1000)


class TestBellValue:
    def test_zero_functional_returns_offset(self):
        f = BellFunctional(np.zeros((2, 2, 2, 2)), offset=0.25)
        assert bell_value(uniform_correlation(2, 2, 2), f) == 0.25

    def test_chsh_game_on_uniform(self):
        value = bell_value(uniform_correlation(2, 2, 2), chsh_game_functional())
        assert value == pytest.approx(0.5)

    def test_chsh_game_on_pr_box(self):
        assert bell_value(pr_box(), chsh_game_functional()) == pytest.approx(1.0)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            bell_value(uniform_correlation(2, 2, 3), chsh_game_functional())


class TestChshOptimalRep:
    def test_valid_pvms(self):
        rep = chsh_optimal_rep()
        for meas in rep.alice + rep.bob:
            assert validate_measure(meas).ok

    def test_marginals_are_half(self):
        pair = marginals(eval_max_ent(chsh_optimal_rep()))
        np.testing.assert_allclose(pair.alice, 0.5, atol=1e-12)
        np.testing.assert_allclose(pair.bob, 0.5, atol=1e-12)

    def test_game_value(self):
        value = bell_value(eval_max_ent(chsh_optimal_rep()), chsh_game_functional())
        assert abs(value - CHSH_VALUE) < 1e-9


class TestIsLocal:
    def test_vertex_is_inside_with_unit_weight(self):
        vertices = enumerate_deterministic(2, 2, 2)
        verdict = is_local(vertices[5])
        assert verdict.inside
        weights = dict(verdict.weights)
        assert weights.get(5, 0.0) == pytest.approx(1.0, abs=1e-9)

    def test_uniform_inside_with_sound_reconstruction(self):
        verdict = is_local(uniform_correlation(2, 2, 2))
        assert verdict.inside
        vertices = enumerate_deterministic(2, 2, 2)
        rebuilt = np.zeros((2, 2, 2, 2))
        for v, w in verdict.weights:
            rebuilt += w * vertices[v].values
        assert np.max(np.abs(rebuilt - 0.25)) <= 1e-8

    def test_chsh_outside_with_verified_certificate(self):
        p = eval_max_ent(chsh_optimal_rep())
        verdict = is_local(p)
        assert verdict.status == "outside"
        f = verdict.certificate
        vertices = enumerate_deterministic(2, 2, 2)
        remax = max(bell_value(v, f) for v in vertices)
        assert remax == pytest.approx(verdict.classical_bound, abs=1e-12)
        assert bell_value(p, f) == pytest.approx(verdict.achieved_value, abs=1e-12)
        assert verdict.achieved_value > verdict.classical_bound + 1e-9

    def test_pr_box_outside(self):
        assert is_local(pr_box()).status == "outside"

    def test_mixture_of_inside_points_stays_inside(self):
        vertices = enumerate_deterministic(2, 2, 2)
        rng = philox_rng(8)
        for _ in range(5):
            i, j = rng.integers(0, 16, size=2)
            w = float(rng.uniform(0, 1))
            mixed = convex_combine([vertices[i], vertices[j]], [w, 1 - w])
            assert is_local(mixed).inside

    def test_barely_nonlocal_point(self):
        """Points just past the boundary on the PR-box ray get certificates."""
        u = uniform_correlation(2, 2, 2)
        for t in (0.52, 0.6):
            mixed = convex_combine([pr_box(), u], [t, 1 - t])
            verdict = is_local(mixed)
            assert verdict.status == "outside"
        # at t = 0.5 the mixture sits exactly on the local boundary
        boundary = convex_combine([pr_box(), u], [0.5, 0.5])
        assert is_local(boundary).inside

    def test_isotropic_visibility_threshold(self):
        """Mixing the optimal quantum point with uniform noise crosses the
        local boundary exactly at visibility 1/sqrt(2): the game value
        t*(2+sqrt2)/4 + (1-t)/2 hits the classical bound 3/4 there, and the
        correlation-form facets are the only nontrivial ones in the 2x2x2
        scenario."""
        p = eval_max_ent(chsh_optimal_rep())
        u = uniform_correlation(2, 2, 2)
        threshold = 1 / np.sqrt(2)
        for t, expected in ((threshold - 1e-3, "inside"), (threshold + 1e-3, "outside")):
            verdict = is_local(convex_combine([p, u], [t, 1 - t]))
            assert verdict.status == expected, (t, verdict.status)

    def test_random_quantum_points_never_indeterminate(self):
        from corrsets.operators import random_max_ent_rep

        vertices = enumerate_deterministic(2, 2, 2)
        for seed in range(20):
            rep = random_max_ent_rep(1 + seed % 3, 2, 2, 2, 95_000 + seed)
            p = eval_max_ent(rep)
            verdict = is_local(p)
            assert verdict.status != "indeterminate"
            if verdict.inside:
                rebuilt = sum(w * vertices[v].values for v, w in verdict.weights)
                assert np.max(np.abs(rebuilt - p.values)) <= 1e-8

    def test_iteration_cap_gives_indeterminate(self):
        verdict = is_local(uniform_correlation(2, 2, 2), max_iterations=1)
        assert verdict.status == "indeterminate"

    def test_three_outcomes_scenario(self):
        verdict = is_local(uniform_correlation(2, 2, 3))
        assert verdict.inside
