import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trimode import entanglement as ent
from trimode import phase_space as ps
from trimode import states as stf
from trimode.errors import InvalidArgumentError, InvalidStateError, UnsupportedStateError

from .conftest import random_state, random_symplectic, seeds


def local_scramble(rng, sigma):
    n = ps.n_modes_of(sigma)
    S = ps.local_symplectic([random_symplectic(rng, 1, depth=2) for _ in range(n)])
    return ps.apply_symplectic(sigma, S)


def fully_separable_by_noise(sigma, tol=1e-10):
    # sigma >= I means sigma = I + (positive), a mixture of coherent states
    return np.linalg.eigvalsh(sigma - np.eye(len(sigma))).min() >= -tol


class TestLogNegativity:
    def test_vacuum(self):
        for p in ent.THREE_MODE_PARTITIONS[:3]:
            assert ent.log_negativity(np.eye(6), p) == 0.0

    def test_basset_23_separable(self):
        assert ent.reduced_log_negativity(stf.basset_hound(3.0), "2|3") == 0.0
        assert ent.log_negativity(ps.reduce(stf.basset_hound(5.0), [2, 3]), "1|2") == 0.0

    @pytest.mark.parametrize("r", [0.1, 0.6, 1.5])
    def test_two_mode_squeezed(self, r):
        assert ent.log_negativity(stf.two_mode_squeezed(r), "1|2") == pytest.approx(2 * r, rel=1e-10)

    def test_partition_must_cover(self):
        with pytest.raises(InvalidArgumentError):
            ent.log_negativity(np.eye(6), "1|2")

    def test_accepts_partition_objects(self):
        sigma = stf.ghzw(0.4, 0.4)
        assert ent.log_negativity(sigma, ps.ModePartition([1], [2, 3])) == ent.log_negativity(sigma, "1|23")

    def test_no_spurious_negativity(self):
        # product of pure states: eigenvalues of the transpose are exactly 1 up to roundoff
        sigma = ps.tensor(stf.two_mode_squeezed(0.0), ps.vacuum(1))
        assert ent.log_negativity(sigma, "1|23") == 0.0


class TestTriangle:
    def test_examples(self):
        assert ent.triangle_check(1, 1, 1)
        assert not ent.triangle_check(2, 1, 1.5)
        assert ent.triangle_check(3, 2, 2)

    def test_allotment_outputs(self, rng):
        for _ in range(200):
            a = ps.local_mixednesses(stf.allotment(1 + 5 * rng.random(), rng.random(), rng.random()))
            assert ent.triangle_check(*a)


class TestContangles:
    def test_pure_product(self):
        assert ent.contangle_pure_bipartition(np.eye(6), "1|23") == 0.0

    @pytest.mark.parametrize("a", [1.5, 2.0, 4.0])
    def test_ghzw_one_vs_two(self, a):
        sigma = stf.GHZW.from_local_mixedness(a).covariance()
        expected = math.asinh(math.sqrt(a * a - 1)) ** 2
        assert ent.contangle_pure_bipartition(sigma, "1|23") == pytest.approx(expected, rel=1e-9)
        assert ent.ghzw_one_vs_two_contangle(a) == pytest.approx(expected, rel=1e-12)

    def test_mixed_rejected(self):
        with pytest.raises(InvalidStateError):
            ent.contangle_pure_bipartition(stf.noisy_ghzw(1.5, 0.3), "1|23")

    def test_local_invariance(self, rng):
        sigma = stf.allotment(2.5, 0.3, 0.6)
        before = ent.contangle_pure_bipartition(sigma, "2|13")
        after = ent.contangle_pure_bipartition(local_scramble(rng, sigma), "2|13")
        assert after == pytest.approx(before, rel=1e-8)

    def test_symmetric_separable(self):
        assert ent.contangle_symmetric_two_mode(2.0 * np.eye(4)) == 0.0

    def test_nonsymmetric_rejected(self):
        with pytest.raises(UnsupportedStateError):
            ent.contangle_symmetric_two_mode(ps.tensor(np.eye(2), 3 * np.eye(2)))

    def test_ghzw_reduction_approaches_limit(self):
        pair = ps.reduce(stf.GHZW.from_local_mixedness(200.0).covariance(), [1, 2])
        assert ent.contangle_symmetric_two_mode(pair) == pytest.approx(math.log(3) ** 2 / 4, rel=1e-3)

    def test_noisy_reduction_promiscuous(self):
        n = 1.2
        s = 1.5 * ent.promiscuity_threshold(n)
        pair = ps.reduce(stf.NoisyGHZW.from_s(n, s).covariance(), [1, 2])
        assert ent.contangle_symmetric_two_mode(pair) > 0


class TestLocalization:
    def test_separable_symmetric(self):
        two, single = ent.unitary_localization(2.0 * np.eye(6), 1)
        assert ent.log_negativity(two, "1|2") == 0.0
        assert np.allclose(single, 2.0 * np.eye(2))

    @pytest.mark.parametrize("probe", [1, 2, 3])
    def test_ghzw_preserves_bipartite_entanglement(self, probe):
        sigma = stf.ghzw(0.5, 0.5)
        j, k = (m for m in (1, 2, 3) if m != probe)
        before = ent.log_negativity(sigma, ps.ModePartition([probe], [j, k]))
        two, _ = ent.unitary_localization(sigma, probe)
        assert ent.log_negativity(two, "1|2") == pytest.approx(before, abs=1e-8)

    def test_basset_decouples(self):
        sigma = stf.basset_hound(3.0)
        out = ps.apply_symplectic(sigma, ps.beam_splitter(2, 3, 0.5, 3))
        assert np.max(np.abs(out[:4, 4:])) < 1e-8
        two, single = ent.unitary_localization(sigma, 1)
        assert np.allclose(single, np.eye(2))

    def test_requires_bisymmetry(self):
        with pytest.raises(UnsupportedStateError):
            ent.unitary_localization(stf.allotment(2.0, 0.3, 0.6), 1)


class TestGHZW:
    def test_vacuum_limit(self):
        assert ent.residual_contangle_ghzw(1.0) == 0.0

    def test_reduced_limit(self):
        assert ent.ghzw_reduced_contangle(1e6) == pytest.approx(math.log(3) ** 2 / 4, rel=1e-6)

    @pytest.mark.parametrize("a", [1.2, 2.0, 5.0])
    def test_closed_form_matches_construction(self, a):
        sigma = stf.GHZW.from_local_mixedness(a).covariance()
        whole = ent.contangle_pure_bipartition(sigma, "1|23")
        pair = ent.contangle_symmetric_two_mode(ps.reduce(sigma, [1, 2]))
        assert ent.residual_contangle_ghzw(a) == pytest.approx(whole - 2 * pair, rel=1e-8)
        assert ent.residual_gaussian_contangle(sigma) == pytest.approx(whole - 2 * pair, rel=1e-8)

    def test_reduced_argument_rewrite(self):
        # plain form of the log argument at moderate a, where it is still accurate
        a = 1.7
        plain = (3 * a * a - 1 - math.sqrt(9 * a**4 - 10 * a * a + 1)) / 2
        assert ent.ghzw_reduced_contangle(a) == pytest.approx(0.25 * math.log(plain) ** 2, rel=1e-12)

    def test_invalid(self):
        with pytest.raises(InvalidArgumentError):
            ent.residual_contangle_ghzw(0.9)


class TestNoisyGHZW:
    def test_vacuum(self):
        assert ent.residual_contangle_noisy_ghzw(1.0, 1.0) == 0.0

    def test_figure_value(self):
        s = ps.from_decibels(7.0)
        assert ent.residual_contangle_noisy_ghzw(1.0, s) == pytest.approx(1.9, abs=0.05)

    @pytest.mark.parametrize("n,s", [(1.0, 3.0), (1.3, 4.0), (1.1, 2.5), (2.0, 9.0)])
    def test_closed_form_matches_construction(self, n, s):
        sigma = stf.NoisyGHZW.from_s(n, s).covariance()
        numeric = max(0.0, ent.residual_gaussian_contangle(sigma))
        assert ent.residual_contangle_noisy_ghzw(n, s) == pytest.approx(numeric, rel=1e-7, abs=1e-10)

    def test_continuity_at_class1_boundary(self):
        n = 1.5
        bound = ent.class1_threshold(n)
        values = [ent.residual_contangle_noisy_ghzw(n, bound * (1 + eps)) for eps in (1e-2, 1e-4, 1e-6)]
        assert values[0] > values[1] > values[2] >= 0
        assert values[2] < 1e-6

    def test_monotone_in_s(self):
        for n in (1.0, 1.3, 1.8, 2.4):
            s_grid = np.linspace(ent.class1_threshold(n) * 1.0001, 8.0, 60)
            vals = [ent.residual_contangle_noisy_ghzw(n, s) for s in s_grid]
            assert np.all(np.diff(vals) >= -1e-12)

    def test_pure_limit_matches_ghzw(self):
        for s in (1.2, 2.0, 5.0):
            a = ent.noisy_ghzw_local_mixedness(1.0, s)
            assert ent.residual_contangle_noisy_ghzw(1.0, s) == pytest.approx(ent.residual_contangle_ghzw(a), rel=1e-9)
            assert ent.classify_noisy_ghzw(1.0, s) is ent.SeparabilityClass.FULLY_INSEPARABLE

    def test_one_vs_two_stable_branch(self):
        # both branches of the inner expression agree where both are accurate
        s = 1.3
        s2 = s * s
        direct = 4 * s2 * s2 + s2 + 4 - 2 * (s2 - 1) * math.sqrt(4 * s2 * s2 + 10 * s2 + 4)
        expected = 0.25 * math.log(direct / (9 * s2)) ** 2
        assert ent.noisy_ghzw_one_vs_two_contangle(1.0, s) == pytest.approx(expected, rel=1e-12)

    def test_invalid_pair(self):
        with pytest.raises(InvalidArgumentError):
            ent.residual_contangle_noisy_ghzw(0.5, 2.0)
        with pytest.raises(InvalidArgumentError):
            ent.classify_noisy_ghzw(1.5, 0.9)


class TestClassification:
    def test_n_equal_one(self):
        assert ent.class1_threshold(1.0) == pytest.approx(1.0)
        assert ent.classify_noisy_ghzw(1.0, 1.0001) is ent.SeparabilityClass.FULLY_INSEPARABLE

    def test_class5(self):
        assert ent.classify_noisy_ghzw(2.0, 2.0) is ent.SeparabilityClass.FULLY_SEPARABLE
        assert ent.classify_noisy_ghzw(2.0, 1.5) is ent.SeparabilityClass.FULLY_SEPARABLE

    def test_class4_midpoint(self):
        n = 2.0
        mid = 0.5 * (n + ent.class1_threshold(n))
        assert ent.classify_noisy_ghzw(n, mid) is ent.SeparabilityClass.BOUND_BISEPARABLE

    @pytest.mark.parametrize("n", [1.0, 1.2, 1.7, 2.5])
    def test_matches_independent_criteria(self, n):
        for s in np.linspace(1.0, 6.0, 40):
            sigma = stf.NoisyGHZW.from_s(n, s).covariance()
            cls = ent.classify_noisy_ghzw(n, s)
            npt = ent.log_negativity(sigma, "1|23") > 0
            assert npt == (cls is ent.SeparabilityClass.FULLY_INSEPARABLE)
            if s < n * (1 - 1e-9) or s > n * (1 + 1e-9):
                assert fully_separable_by_noise(sigma) == (cls is ent.SeparabilityClass.FULLY_SEPARABLE)


class TestPromiscuity:
    def test_noise_ceiling(self):
        for s in (1.5, 10.0, 1e3):
            assert not ent.promiscuity_predicate(math.sqrt(3), s)
            assert not ent.promiscuity_predicate(2.0, s)

    def test_example(self):
        assert ent.promiscuity_predicate(1.0, 2.0)

    def test_grid_against_ppt(self):
        for n in np.linspace(1.0, 2.0, 20):
            for s in np.linspace(1.0, 8.0, 20):
                pair = ps.reduce(stf.NoisyGHZW.from_s(n, s).covariance(), [1, 2])
                entangled = ent.log_negativity(pair, "1|2") > 0
                assert ent.promiscuity_predicate(n, s) == entangled

    def test_boundary_flips_pair_contangle(self):
        n = 1.4
        b = ent.promiscuity_threshold(n)
        below = ps.reduce(stf.NoisyGHZW.from_s(n, b * 0.999).covariance(), [1, 2])
        above = ps.reduce(stf.NoisyGHZW.from_s(n, b * 1.001).covariance(), [1, 2])
        assert ent.contangle_symmetric_two_mode(below) == 0.0
        assert ent.contangle_symmetric_two_mode(above) > 0.0


class TestBasset:
    def test_separable_at_one(self):
        assert ent.residual_contangle_basset(1.0) == 0.0

    def test_reduced_limit(self):
        assert ent.basset_reduced_contangle(1e6) == pytest.approx(math.log(3 + 2 * math.sqrt(2)) ** 2, rel=1e-4)

    @pytest.mark.parametrize("a", [2.0, 3.0, 5.0])
    def test_below_ghzw(self, a):
        assert ent.residual_contangle_basset(a) < ent.residual_contangle_ghzw(a)

    @pytest.mark.parametrize("a", [1.5, 3.0, 7.0])
    def test_probe_three_minimizes(self, a):
        res = ent.basset_probe_residuals(a)
        assert res[1] >= res[3] and res[2] >= res[3]

    @pytest.mark.parametrize("a", [1.5, 3.0, 7.0])
    def test_one_vs_two_matches_construction(self, a):
        sigma = stf.basset_hound(a)
        assert ent.basset_one_vs_two_contangle(a) == pytest.approx(
            ent.contangle_pure_bipartition(sigma, "3|12"), rel=1e-9
        )
        assert ent.ghzw_one_vs_two_contangle(a) == pytest.approx(
            ent.contangle_pure_bipartition(sigma, "1|23"), rel=1e-9
        )

    @pytest.mark.parametrize("a", [1.5, 3.0, 7.0])
    def test_reduced_bounded_by_logneg(self, a):
        # the Gaussian roof of E_N^2 can only exceed E_N^2 itself
        en = ent.reduced_log_negativity(stf.basset_hound(a), "1|2")
        assert ent.basset_reduced_contangle(a) >= en * en - 1e-12

    def test_reduced_rewrite(self):
        a = 2.5
        plain = math.sqrt((3 * a + 1) ** 2 / (a + 3) ** 2 - 1)
        assert ent.basset_reduced_contangle(a) == pytest.approx(math.asinh(plain) ** 2, rel=1e-12)


class TestMonogamy:
    @pytest.mark.parametrize("a", [1.1, 2.0, 10.0])
    def test_ghzw(self, a):
        assert ent.residual_gaussian_contangle(stf.GHZW.from_local_mixedness(a).covariance()) >= -1e-9

    @pytest.mark.parametrize("n,s", [(1.0, 2.0), (1.5, 5.0), (2.0, 12.0)])
    def test_noisy_class1(self, n, s):
        assert ent.classify_noisy_ghzw(n, s) is ent.SeparabilityClass.FULLY_INSEPARABLE
        assert ent.residual_gaussian_contangle(stf.NoisyGHZW.from_s(n, s).covariance()) >= -1e-9

    @pytest.mark.parametrize("a", [1.0, 3.0, 20.0])
    def test_basset(self, a):
        assert min(ent.basset_probe_residuals(a).values()) >= -1e-9


class TestReport:
    def test_basset_analysis(self):
        spec = stf.BassetHound(3.0)
        rep = ent.analyze(spec.covariance(), spec)
        assert rep.logneg["2|3"] == 0.0
        assert rep.contangle["2|3"] == 0.0
        assert rep.residual_gaussian_contangle == pytest.approx(ent.residual_contangle_basset(3.0))
        assert all(v >= 0 for v in rep.logneg.values())

    def test_noisy_class(self):
        spec = stf.NoisyGHZW.from_s(2.0, 1.5)
        rep = ent.analyze(spec.covariance(), spec)
        assert rep.separability_class is ent.SeparabilityClass.FULLY_SEPARABLE

    def test_json_round_trip(self):
        spec = stf.NoisyGHZW.from_s(1.0, 3.0)
        rep = ent.analyze(spec.covariance(), spec)
        again = ent.EntanglementReport.from_dict(json.loads(json.dumps(rep.to_dict())))
        assert again == rep

    def test_two_mode_rejected(self):
        with pytest.raises(InvalidArgumentError):
            ent.analyze(np.eye(4))


@given(seeds, st.sampled_from(["1|23", "2|13", "3|12"]))
def test_logneg_local_invariance(seed, partition):
    rng = np.random.default_rng(seed)
    sigma = random_state(rng, 3)
    before = ent.log_negativity(sigma, partition)
    after = ent.log_negativity(local_scramble(rng, sigma), partition)
    assert after == pytest.approx(before, abs=1e-8)
