"""POVM evaluation, commuting checks, rational spectra, dilation, rounding."""

from fractions import Fraction

import numpy as np
import pytest

from corrsets.dilation import (
    check_pairwise_commuting,
    dilate_commuting_rational,
    eval_almost_max_ent,
    predicted_dilation_dim,
    rational_spectrum,
    round_to_rational_spectrum,
)
from corrsets.errors import CommutationError, DimensionCapError, SpectrumError
from corrsets.linalg import haar_unitary, philox_rng
from corrsets.operators import (
    MaxEntRep,
    MeasureKind,
    OperatorMeasure,
    eval_max_ent,
    random_max_ent_rep,
    validate_measure,
)
from corrsets.tensors import marginals, sup_distance, uniform_correlation


def povm(mats):
    return OperatorMeasure(
        np.stack([np.asarray(m, complex) for m in mats]), MeasureKind.POVM
    )


def commuting_rational_family(d, m, den, seed):
    """POVM with a common eigenbasis and all eigenvalues multiples of 1/den."""
    rng = philox_rng(seed)
    u = haar_unitary(d, rng)
    lam = np.zeros((m, d))
    for k in range(d):
        cuts = np.sort(rng.integers(0, den + 1, size=m - 1))
        lam[:, k] = np.diff(np.concatenate([[0], cuts, [den]])) / den
    return povm([(u * lam[i]) @ u.conj().T for i in range(m)])


def projector(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c * c, c * s], [c * s, s * s]], complex)


class TestEvalAlmostMaxEnt:
    def test_pvm_input_matches_eval_max_ent(self):
        rep = random_max_ent_rep(3, 2, 2, 2, seed=7)
        assert sup_distance(eval_almost_max_ent(rep), eval_max_ent(rep)) == 0.0

    def test_trivial_povm_gives_uniform(self):
        m, d = 3, 4
        meas = povm([np.eye(d) / m] * m)
        rep = MaxEntRep(alice=(meas,), bob=(meas,))
        assert sup_distance(eval_almost_max_ent(rep), uniform_correlation(1, 1, m)) < 1e-15

    def test_scalar_povm_products(self):
        alice = (povm([[[1 / 3]], [[2 / 3]]]),)
        bob = (povm([[[1 / 2]], [[1 / 2]]]),)
        p = eval_almost_max_ent(MaxEntRep(alice=alice, bob=bob))
        assert p.values[0, 0, 0, 0] == pytest.approx(1 / 6)
        assert p.values[0, 0, 1, 0] == pytest.approx(1 / 3)


class TestCheckPairwiseCommuting:
    def test_two_outcome_povms_always_commute(self):
        for seed in range(5):
            rng = philox_rng(seed)
            u = haar_unitary(3, rng)
            lam = rng.uniform(0, 1, size=3)
            p1 = (u * lam) @ u.conj().T
            ok, worst = check_pairwise_commuting(povm([p1, np.eye(3) - p1]))
            assert ok and worst < 1e-12

    def test_simultaneously_diagonal_commute(self):
        meas = povm([np.diag([0.2, 0.7]), np.diag([0.8, 0.3])])
        ok, _ = check_pairwise_commuting(meas)
        assert ok

    def test_crafted_noncommuting_three_outcomes(self):
        a = 0.5 * projector(0.0)
        b = 0.5 * projector(np.pi / 4)
        c = np.eye(2) - a - b
        meas = povm([a, b, c])
        assert validate_measure(meas).ok
        ok, worst = check_pairwise_commuting(meas)
        assert not ok and worst > 1e-2


class TestRationalSpectrum:
    def test_half_identity(self):
        meas = povm([np.eye(2) / 2, np.eye(2) / 2])
        spectrum = rational_spectrum(meas, max_den=10)
        assert spectrum[0] == [Fraction(1, 2), Fraction(1, 2)]

    def test_pvm_spectra_are_binary(self):
        from corrsets.operators import random_pvm

        meas = random_pvm(3, 2, (1, 2), seed=5)
        spectrum = rational_spectrum(
            OperatorMeasure(meas.elements, MeasureKind.POVM), max_den=3
        )
        for row in spectrum:
            assert set(row) <= {Fraction(0), Fraction(1)}

    def test_irrational_eigenvalue_fails(self):
        lam = 1 / np.sqrt(2)
        meas = povm([np.diag([lam, lam]), np.diag([1 - lam, 1 - lam])])
        with pytest.raises(SpectrumError) as info:
            rational_spectrum(meas, max_den=10)
        assert abs(info.value.offending - lam) < 1e-9

    def test_noncommuting_rejected(self):
        a = 0.5 * projector(0.0)
        b = 0.5 * projector(np.pi / 4)
        meas = povm([a, b, np.eye(2) - a - b])
        with pytest.raises(CommutationError):
            rational_spectrum(meas, max_den=10)


class TestDilation:
    def test_pvm_input_correlation_unchanged(self):
        rep = random_max_ent_rep(2, 2, 2, 2, seed=9)
        as_povm = MaxEntRep(
            alice=tuple(
                OperatorMeasure(m.elements, MeasureKind.POVM) for m in rep.alice
            ),
            bob=tuple(
                OperatorMeasure(m.elements, MeasureKind.POVM) for m in rep.bob
            ),
        )
        out = dilate_commuting_rational(as_povm)
        assert out.kind is MeasureKind.PVM
        assert sup_distance(eval_max_ent(out), eval_max_ent(rep)) <= 1e-12

    def test_scalar_case_dimension_and_values(self):
        """d=1: Alice (1/2,1/2) dilates through N=2, Bob (1/3,2/3) through 3."""
        alice = (povm([[[0.5]], [[0.5]]]),)
        bob = (povm([[[1 / 3]], [[2 / 3]]]),)
        rep = MaxEntRep(alice=alice, bob=bob)
        out = dilate_commuting_rational(rep)
        assert out.d == 6
        p = eval_max_ent(out)
        expected = np.array([[1 / 6, 1 / 3], [1 / 6, 1 / 3]])
        np.testing.assert_allclose(p.values[0, 0], expected, atol=1e-12)

    def test_diagonal_thirds_both_parties(self):
        alice = (povm([np.diag([1 / 3, 2 / 3]), np.diag([2 / 3, 1 / 3])]),)
        bob = (povm([np.diag([2 / 3, 1 / 3]), np.diag([1 / 3, 2 / 3])]),)
        rep = MaxEntRep(alice=alice, bob=bob)
        out = dilate_commuting_rational(rep)
        assert out.d == 18  # 2 * 3 * 3
        assert sup_distance(eval_max_ent(out), eval_almost_max_ent(rep)) <= 1e-10

    def test_random_commuting_reps_preserved_and_valid(self):
        for seed in range(8):
            rep = MaxEntRep(
                alice=tuple(
                    commuting_rational_family(2, 2, 4, 300 + 10 * seed + t)
                    for t in range(2)
                ),
                bob=tuple(
                    commuting_rational_family(2, 2, 3, 400 + 10 * seed + t)
                    for t in range(2)
                ),
            )
            out = dilate_commuting_rational(rep, max_dim=2000)
            assert out.d == predicted_dilation_dim(rep)
            assert sup_distance(eval_max_ent(out), eval_almost_max_ent(rep)) <= 1e-10
            for meas in out.alice + out.bob:
                assert validate_measure(meas).ok

    def test_marginals_rational_after_dilation(self):
        rep = MaxEntRep(
            alice=(commuting_rational_family(3, 2, 4, 991),),
            bob=(commuting_rational_family(3, 2, 2, 992),),
        )
        out = dilate_commuting_rational(rep)
        pair = marginals(eval_max_ent(out))
        d = out.d
        for value in np.concatenate([pair.alice.ravel(), pair.bob.ravel()]):
            assert abs(value * d - round(value * d)) <= 1e-9 * d

    def test_cap_mentions_blowup(self):
        alice = (povm([np.diag([1 / 5, 4 / 5]), np.diag([4 / 5, 1 / 5])]),)
        bob = (povm([np.diag([1 / 6, 5 / 6]), np.diag([5 / 6, 1 / 6])]),)
        rep = MaxEntRep(alice=alice, bob=bob)
        with pytest.raises(DimensionCapError):
            dilate_commuting_rational(rep, max_dim=16)


class TestRoundToRationalSpectrum:
    def test_rational_input_unchanged(self):
        rep = MaxEntRep(
            alice=(commuting_rational_family(2, 2, 4, 21),),
            bob=(commuting_rational_family(2, 2, 3, 22),),
        )
        out = round_to_rational_spectrum(rep, eps=1e-2, max_den=100)
        assert sup_distance(eval_almost_max_ent(out), eval_almost_max_ent(rep)) <= 1e-10
        for before, after in zip(rep.alice + rep.bob, out.alice + out.bob):
            assert np.max(np.abs(before.elements - after.elements)) <= 1e-9

    def test_output_is_valid_povm_with_rational_spectrum(self):
        rep = random_max_ent_rep(3, 2, 1, 1, seed=31, kind=MeasureKind.POVM)
        out = round_to_rational_spectrum(rep, eps=1e-2, max_den=500)
        for meas in out.alice + out.bob:
            assert validate_measure(meas).ok
            rational_spectrum(meas, max_den=500)  # must not raise

    def test_correlation_shift_bounded(self):
        for seed in range(5):
            rep = random_max_ent_rep(2, 2, 1, 1, seed=seed, kind=MeasureKind.POVM)
            before = eval_almost_max_ent(rep)
            for eps in (1e-2, 1e-3, 1e-4):
                out = round_to_rational_spectrum(rep, eps=eps, max_den=50_000, seed=seed)
                assert sup_distance(eval_almost_max_ent(out), before) < eps

    def test_full_pipeline_round_then_dilate(self):
        """Round + dilate one generic POVM rep whose rounded spectra stay
        small enough to materialize; the acceptance suite covers breadth."""
        eps = 1e-2
        for seed in range(100, 120):
            rep = random_max_ent_rep(2, 2, 1, 1, seed=seed, kind=MeasureKind.POVM)
            rounded = round_to_rational_spectrum(rep, eps=eps, max_den=400, seed=seed)
            if predicted_dilation_dim(rounded, max_den=400) > 1200:
                continue
            before = eval_almost_max_ent(rep)
            dilated = dilate_commuting_rational(rounded, max_den=400, max_dim=1200)
            assert dilated.kind is MeasureKind.PVM
            assert sup_distance(eval_max_ent(dilated), before) < eps
            break
        else:
            pytest.fail("no seed under the dimension budget")
