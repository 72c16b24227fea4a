import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellkit.errors import DomainError, ProductRequiredError, WeightError
from bellkit.hilbert import random_unit
from bellkit.measurement import make_measurement
from bellkit.mixtures import (
    LocalMeasurement,
    ProductMixture,
    lemma1_check,
    mixture_delta_breakdown,
    mixture_joint_probabilities,
    product_mixture_density,
    shared_local_observables,
)
from bellkit.refmodels import analyzer_basis, nnmb2
from bellkit.scenario import SETTINGS, QuantumModel, chsh_delta, marginal_deviation, scenario_probabilities
from bellkit.schmidt import product_measurement

from conftest import local_basis, random_product_model_measurements

UP, DOWN = np.array([1.0, 0.0]), np.array([0.0, 1.0])


def random_mixture(rng, k):
    w = rng.dirichlet(np.ones(k))
    return ProductMixture(tuple((wi, random_unit(2, rng), random_unit(2, rng)) for wi in w))


class TestDensity:
    def test_single_component(self):
        d = product_mixture_density(ProductMixture(((1.0, UP, UP),)))
        assert np.array_equal(d.matrix, np.diag([1, 0, 0, 0]))

    def test_equal_mix(self):
        d = product_mixture_density(ProductMixture(((0.5, UP, DOWN), (0.5, DOWN, UP))))
        assert np.array_equal(d.matrix, np.diag([0, 0.5, 0.5, 0]))

    def test_weighted_orthogonal(self):
        # |01> sits at index 1, |10> at index 2
        d = product_mixture_density(ProductMixture(((0.3, UP, DOWN), (0.7, DOWN, UP))))
        assert np.allclose(d.matrix, np.diag([0, 0.3, 0.7, 0]))

    def test_weights_must_sum_to_one(self):
        with pytest.raises(WeightError):
            product_mixture_density(ProductMixture(((0.3, UP, DOWN), (0.3, DOWN, UP))))

    def test_weight_range(self):
        with pytest.raises(WeightError):
            ProductMixture(((1.5, UP, DOWN),))


class TestJointProbabilities:
    def test_single_component_factorizes(self, rng):
        a, b = random_unit(2, rng), random_unit(2, rng)
        la, lb = LocalMeasurement(local_basis(rng)), LocalMeasurement(local_basis(rng))
        t = mixture_joint_probabilities(ProductMixture(((1.0, a, b),)), la, lb)
        assert np.allclose(t, np.outer(la.probabilities(a), lb.probabilities(b)).reshape(4))

    def test_diag_mixture_canonical(self):
        m = ProductMixture(((0.5, UP, DOWN), (0.5, DOWN, UP)))
        t = mixture_joint_probabilities(m, LocalMeasurement(np.eye(2)), LocalMeasurement(np.eye(2)))
        assert np.allclose(t, [0, 0.5, 0.5, 0])

    def test_matches_born_rule(self, rng):
        for _ in range(20):
            mix = random_mixture(rng, 4)
            la, lb = local_basis(rng), local_basis(rng)
            t = mixture_joint_probabilities(mix, LocalMeasurement(la), LocalMeasurement(lb))
            ms = {tag: product_measurement(la, lb, tag=tag) for tag in SETTINGS}
            born = scenario_probabilities(QuantumModel(product_mixture_density(mix), ms))["AB"]
            assert np.allclose(t, born, atol=1e-13)


class TestLemma1:
    def test_corners(self):
        assert lemma1_check(1, 1, 1, 1) == 2
        assert lemma1_check(1, 1, -1, 1) == 2
        assert lemma1_check(0, 0, 0, 0) == 0

    def test_all_sixteen_corners(self):
        for x, xp, y, yp in itertools.product((-1, 1), repeat=4):
            d = lemma1_check(x, xp, y, yp)
            assert abs(d) == 2

    def test_domain(self):
        with pytest.raises(DomainError):
            lemma1_check(1.5, 0, 0, 0)

    @settings(max_examples=300, deadline=None)
    @given(*[st.floats(-1, 1)] * 4)
    def test_bound(self, x, xp, y, yp):
        assert abs(lemma1_check(x, xp, y, yp)) <= 2 + 1e-12


class TestBreakdown:
    def test_single_component_singlet_angles(self):
        a, ap, b, bp = -3 * math.pi / 4, 3 * math.pi / 4, -math.pi / 2, 0.0
        pairs = {"AB": (a, b), "ABp": (a, bp), "ApB": (ap, b), "ApBp": (ap, bp)}
        ms = {t: product_measurement(analyzer_basis(x), analyzer_basis(y), tag=t) for t, (x, y) in pairs.items()}
        mix = ProductMixture(((1.0, UP, np.array([math.sqrt(0.5), math.sqrt(0.5)])),))
        br = mixture_delta_breakdown(mix, ms)
        assert abs(br.per_component[0]) <= 2

    def test_two_components_at_two(self):
        ms = {t: make_measurement(np.eye(4), tag=t) for t in SETTINGS}
        # canonical observables Z everywhere; |00> gives x=x'=y=y'=1, delta 2
        mix = ProductMixture(((0.4, UP, UP), (0.6, UP, UP)))
        br = mixture_delta_breakdown(mix, ms)
        assert br.per_component == pytest.approx((2.0, 2.0), abs=1e-14)
        assert br.total == pytest.approx(2.0)

    def test_total_equals_table_delta(self, rng):
        for _ in range(20):
            mix = random_mixture(rng, 5)
            ms = random_product_model_measurements(rng)
            br = mixture_delta_breakdown(mix, ms)
            t = scenario_probabilities(QuantumModel(product_mixture_density(mix), ms))
            assert br.total == pytest.approx(chsh_delta(t), abs=1e-12)
            assert abs(br.total) <= 2 + 1e-9
            assert marginal_deviation(t).max <= 1e-12

    def test_requires_product_measurements(self):
        with pytest.raises(ProductRequiredError):
            shared_local_observables(nnmb2().measurements)

    def test_requires_shared_observables(self, rng):
        ms = random_product_model_measurements(rng)
        ms["ABp"] = product_measurement(local_basis(rng), local_basis(rng), tag="ABp")
        with pytest.raises(ProductRequiredError):
            shared_local_observables(ms)

    def test_recovers_observables(self, rng):
        ms = random_product_model_measurements(rng)
        obs = shared_local_observables(ms)
        assert np.allclose(np.kron(obs["A"], obs["B"]), ms["AB"].observable, atol=1e-12)
        assert np.allclose(np.kron(obs["A"], obs["Bp"]), ms["ABp"].observable, atol=1e-12)
        assert np.allclose(np.kron(obs["Ap"], obs["B"]), ms["ApB"].observable, atol=1e-12)
        assert np.allclose(np.kron(obs["Ap"], obs["Bp"]), ms["ApBp"].observable, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_mixture_bound_property(seed, k):
    rng = np.random.default_rng(seed)
    br = mixture_delta_breakdown(random_mixture(rng, k), random_product_model_measurements(rng))
    assert all(abs(d) <= 2 + 1e-9 for d in br.per_component)
    assert abs(br.total) <= 2 + 1e-9
