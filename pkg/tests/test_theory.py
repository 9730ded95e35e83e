"""
Tests for the analysis constants, the optimal aggregation probability, the
convergence bounds and the theory report.

Closed forms are compared against brute-force oracles: grid minimization for p*,
full enumeration of compressor outcomes for beta, simulated runs for the bounds.
"""
import itertools
import json
import math

import numpy as np
import pytest

from src.l2gd.compressors import CompressorKind, CompressorSpec
from src.l2gd.engine import L2gdParams, run_l2gd, run_states
from src.l2gd.errors import ConfigError
from src.l2gd.loader.dataset import LabeledExample, PartitionedDataset
from src.l2gd.loader.synth import synth_instance
from src.l2gd.objective import LogisticObjective, ProblemSpec, SigmoidObjective, StackedModel, solve_optimum
from src.l2gd.theory import constants as c
from src.l2gd.theory.bounds import (
    aggregation_error_check,
    iterate_norm_check,
    nonconvex_budget,
    recursion_bound_check,
    strongly_convex_bound,
)
from src.l2gd.theory.estimators import beta_estimate, gradient_second_moment
from src.l2gd.theory.optimal_p import (
    ALPHA_ZERO,
    NO_COMMUNICATION,
    P_A_OUTSIDE,
    check_communication_on_grid,
    check_rate_on_grid,
    grid_minimizer,
    optimal_p_communication,
    optimal_p_rate,
    optimal_p_rate_upper,
    p_A_candidates,
    p_e,
)
from src.l2gd.theory.report import BIASED_COMPRESSOR, NOT_STRONGLY_CONVEX, STEPSIZE_ABOVE_BOUND, build_theory_report
from tests.conftest import BERNOULLI_HALF, IDENTITY, NATURAL


def _random_setting(rng: np.random.Generator) -> tuple[float, float, int, float]:
    lam = float(10 ** rng.uniform(-1, 1))
    L = float(10 ** rng.uniform(-1, 1))
    n = int(rng.integers(1, 21))
    alpha = 0. if rng.random() < 0.3 else float(10 ** rng.uniform(-2, 2))
    return lam, L, n, alpha


class TestConstants:

    def test_gamma_example(self):
        """p = 1/2, lambda = n = L_f = 1, alpha = 0 gives gamma = 5."""
        assert c.gamma(0.5, 1., 1, 1., 0.) == pytest.approx(5.)

    def test_gamma_uncompressed_form(self):
        """relaxation = 1 reduces to max{L / (n (1-p)), lambda / (n p)}."""
        rng = np.random.default_rng(0)
        for _ in range(50):
            p, lam, n, L_f = rng.uniform(0.01, 0.99), rng.uniform(0, 10), int(rng.integers(1, 10)), rng.uniform(0.1, 5)
            expected = max(n * L_f / (n * (1. - p)), lam / (n * p))
            assert c.gamma(p, lam, n, L_f, 0., relaxation=1.) == pytest.approx(expected)

    def test_gamma_without_penalty(self):
        assert c.gamma(0.3, 0., 4, 2., 7.) == pytest.approx(2. / 0.7)

    def test_gamma_below_relaxed_form(self):
        """gamma <= gamma_u for every p, lambda, n, L_f, alpha."""
        rng = np.random.default_rng(1)
        ps = np.linspace(1e-3, 1. - 1e-3, 999)
        for _ in range(200):
            lam, L, n, alpha = _random_setting(rng)
            assert np.all(c.gamma(ps, lam, n, L / n, alpha) <= c.gamma_upper(ps, lam, n, L / n, alpha) * (1. + 1e-12))

    def test_vectorized_matches_scalar(self):
        ps = np.array([0.1, 0.5, 0.9])
        values = c.gamma(ps, 2., 3, 0.5, 1.5)
        assert [c.gamma(float(p), 2., 3, 0.5, 1.5) for p in ps] == pytest.approx(list(values))

    @pytest.mark.parametrize('p', [0., 1., -0.5, 1.5])
    def test_p_outside_unit_interval(self, p):
        with pytest.raises(ConfigError):
            c.gamma(p, 1., 1, 1., 0.)
        with pytest.raises(ConfigError):
            c.delta(1., 1., 1, p, 1.)

    def test_alpha(self):
        """alpha = 4 (4 omega + 4 omega_M (1 + omega)) / mu; zero without compression."""
        assert c.compression_factor(1., 1. / 8.) == pytest.approx(5.)
        assert c.alpha(1., 1. / 8., 0.5) == pytest.approx(40.)
        assert c.alpha(0., 0., 0.) == 0.
        with pytest.raises(ConfigError):
            c.alpha(1., 0., 0.)

    def test_delta(self):
        assert c.delta(0., 3., 2, 0.5, 1.25) == pytest.approx(2.5)
        assert c.delta(1., 2., 2, 0.5, 0.) == pytest.approx(2. * 4. * 0.5 / (4. * 0.5))

    def test_communication_cost(self):
        assert c.communication_cost(0.25, 1., 2, 1., 3.) == pytest.approx(0.25 * 0.75 * c.gamma(0.25, 1., 2, 1., 3.))
        assert c.stepsize_bound(5.) == pytest.approx(0.1)


class TestOptimalProbability:

    def test_p_e_at_equal_constants(self):
        """lambda = L gives p_e = 2/3 and the relaxed optimum 4/5."""
        assert p_e(1., 1.) == pytest.approx(2. / 3.)
        assert optimal_p_rate_upper(1., 1.) == pytest.approx(0.8)

    def test_p_e_is_crossing_point(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            lam, L = float(10 ** rng.uniform(-2, 2)), float(10 ** rng.uniform(-2, 2))
            p = p_e(lam, L)
            assert 0. < p < 1.
            assert L / (1. - p) == pytest.approx(lam * (1. + 4. * (1. - p) / p), rel=1e-6)

    def test_p_e_limits(self):
        """p_e -> 1 as lambda dominates, -> 0 as L dominates."""
        assert p_e(1000., 1.) > 0.99
        assert p_e(1e-3, 1000.) < 1e-4
        assert p_e(0., 1.) == 0.

    @pytest.mark.parametrize('lam, L', [(1e-9, 1.), (1e-12, 1.), (1e-6, 1e4)])
    def test_p_e_tiny_penalty_stays_positive(self, lam, L):
        """For lambda << L the crossing point behaves like 4 lambda / L, never exactly 0."""
        assert p_e(lam, L) == pytest.approx(4. * lam / L, rel=1e-6)
        rate = optimal_p_rate(lam, L, 5, 0.)
        assert 0. < rate.p_star < 1.
        assert math.isfinite(c.gamma(rate.p_star, lam, 5, L / 5, 0.))

    def test_p_e_increases_with_penalty_ratio(self):
        """p_e depends on lambda / L only and increases with it."""
        ratios = np.logspace(-8, 6, 200)
        values = [p_e(float(r), 1.) for r in ratios]
        assert all(0. < v < 1. for v in values)
        assert all(b > a for a, b in zip(values, values[1:]))
        assert p_e(3., 7.) == pytest.approx(p_e(30., 70.))

    def test_no_penalty(self):
        rate = optimal_p_rate(0., 1., 5, 0.)
        assert rate.p_star == 0.
        assert NO_COMMUNICATION in rate.flags
        assert NO_COMMUNICATION in optimal_p_communication(0., 1., 5, 1.).flags

    def test_alpha_zero(self):
        rate = optimal_p_rate(1., 1., 5, 0.)
        assert rate.p_star == pytest.approx(2. / 3.)
        assert rate.p_A is None
        assert ALPHA_ZERO in rate.flags

    def test_equal_quadratic_coefficients(self):
        """alpha lambda^2 = 2 n L: the stationary point is 1/2."""
        assert p_A_candidates(1., 1., 1, 2.) == (0.5,)
        rate = optimal_p_rate(1., 1., 1, 2.)
        assert rate.p_A == 0.5
        assert rate.p_star == pytest.approx(2. / 3.)

    def test_single_candidate_is_stationary(self):
        """Exactly one root lies in (0, 1) and it zeroes the derivative of the compression part."""
        lam, L, n, alpha = 2., 1., 1, 1.
        inside = [p for p in p_A_candidates(lam, L, n, alpha) if 0. < p < 1.]
        assert len(inside) == 1
        p = inside[0]
        derivative = -alpha * lam ** 2 / (2. * n ** 2 * p ** 2) + L / (n * (1. - p) ** 2)
        assert derivative == pytest.approx(0., abs=1e-9)

    def test_communication(self):
        """p_A = 1 - L n / (alpha lambda^2); p_A <= 0 falls back to p_e."""
        rate = optimal_p_communication(2., 1., 1, 1.)
        assert rate.p_A == pytest.approx(0.75)
        assert rate.p_star == pytest.approx(max(p_e(2., 1.), 0.75))
        low = optimal_p_communication(1., 1., 1, 1.)
        assert low.p_A == 0.
        assert low.p_star == pytest.approx(p_e(1., 1.))
        assert P_A_OUTSIDE in low.flags

    def test_large_penalty_pushes_p_up(self):
        assert optimal_p_rate(1000., 1., 5, 0.).p_star > 0.99

    def test_invalid_arguments(self):
        with pytest.raises(ConfigError):
            optimal_p_rate(-1., 1., 1, 0.)
        with pytest.raises(ConfigError):
            optimal_p_communication(1., 0., 1, 0.)

    def test_grid_minimizer(self):
        arg, value = grid_minimizer(lambda ps: (ps - 0.3) ** 2, points=10_001)
        assert arg == pytest.approx(0.3, abs=1e-4)
        assert value == pytest.approx(0., abs=1e-8)

    def test_closed_forms_match_grid(self):
        """Both optimal probabilities agree with the grid argmin within one grid step."""
        rng = np.random.default_rng(3)
        for _ in range(40):
            lam, L, n, alpha = _random_setting(rng)
            rate = check_rate_on_grid(lam, L, n, alpha)
            assert rate.agrees, (lam, L, n, alpha, rate)
            communication = check_communication_on_grid(lam, L, n, alpha)
            assert communication.agrees, (lam, L, n, alpha, communication)

    @pytest.mark.slow
    def test_closed_forms_match_grid_many(self):
        rng = np.random.default_rng(4)
        for _ in range(10_000):
            lam, L, n, alpha = _random_setting(rng)
            assert check_rate_on_grid(lam, L, n, alpha).agrees, (lam, L, n, alpha)
            assert check_communication_on_grid(lam, L, n, alpha).agrees, (lam, L, n, alpha)


class TestBeta:

    def test_identity_gives_zero(self, optimum):
        beta = beta_estimate(optimum.x, (IDENTITY,) * optimum.x.n, IDENTITY, 10_000, np.random.default_rng(0))
        assert beta.value == 0.
        assert beta.stderr == 0.

    def test_zero_optimum_gives_zero(self):
        x_star = StackedModel.zeros(3, 4)
        beta = beta_estimate(x_star, (BERNOULLI_HALF,) * 3, NATURAL, 10_000, np.random.default_rng(0))
        assert beta.value == 0.

    def test_matches_enumeration(self):
        """Bernoulli(1/2) everywhere, n = d = 2: the 64 equally likely outcomes give beta exactly."""
        x_star = StackedModel.of(np.array([[1., -2.], [0.5, 3.]]))
        masks = list(itertools.product((0., 1.), repeat=2))
        errors = []
        for m1, m2, mm in itertools.product(masks, masks, masks):
            uploaded = (np.array(m1) * x_star.blocks[0] / 0.5 + np.array(m2) * x_star.blocks[1] / 0.5) / 2.
            broadcast = np.array(mm) * uploaded / 0.5
            errors.append(float(np.sum((broadcast - x_star.average) ** 2)))
        factor = c.compression_factor(1., 1.)
        expected = 2. * factor * float(np.sum(x_star.blocks ** 2)) + 4. * 2 * float(np.mean(errors))

        beta = beta_estimate(x_star, (BERNOULLI_HALF,) * 2, BERNOULLI_HALF, 50_000, np.random.default_rng(5))
        assert abs(beta.value - expected) <= 5. * beta.stderr

    def test_biased_compressor_rejected(self, optimum):
        top_k = CompressorSpec(kind=CompressorKind.TOP_K, k=2)
        with pytest.raises(ConfigError):
            beta_estimate(optimum.x, (top_k,) * optimum.x.n, IDENTITY, 10_000, np.random.default_rng(0))

    @pytest.mark.parametrize('samples', [100, 9_999])
    def test_too_few_samples_rejected(self, optimum, samples):
        with pytest.raises(ConfigError, match='at least 10000'):
            beta_estimate(optimum.x, (BERNOULLI_HALF,) * optimum.x.n, NATURAL, samples, np.random.default_rng(0))

    def test_identity_second_moment_is_exact(self, objective, optimum):
        moment = gradient_second_moment(objective, optimum.x, 0.5, (IDENTITY,) * 3, IDENTITY, 10, np.random.default_rng(0))
        assert moment.stderr == pytest.approx(0., abs=1e-12)
        assert moment.value > 0.


class TestBounds:

    def test_strongly_convex_bound_shape(self, optimum):
        x0 = StackedModel.zeros(3, 4)
        bound = strongly_convex_bound(np.array([0, 10, 10_000_000]), x0, optimum.x, eta=0.1, mu=0.05, n=3, delta=2.)
        assert bound.values[0] == pytest.approx(x0.distance_sq(optimum.x) + bound.neighborhood)
        assert bound.values[1] < bound.values[0]
        assert bound.values[2] == pytest.approx(bound.neighborhood)
        assert bound.neighborhood == pytest.approx(3 * 0.1 * 2. / 0.05)
        assert bound.precondition_ok is None

    def test_strongly_convex_precondition(self, optimum):
        x0 = StackedModel.zeros(3, 4)
        assert strongly_convex_bound(0, x0, optimum.x, 0.1, 0.05, 3, 1., gamma=5.).precondition_ok
        assert not strongly_convex_bound(0, x0, optimum.x, 0.2, 0.05, 3, 1., gamma=5.).precondition_ok
        with pytest.raises(ConfigError):
            strongly_convex_bound(0, x0, optimum.x, 0.1, 0., 3, 1.)

    def test_nonconvex_budget_example(self):
        """L = gamma = gap = eps = 1, delta = 0: K = 72, eta = 1/12."""
        budget = nonconvex_budget(1., 1., 1., 0., 1.)
        assert budget.iterations == 72
        assert budget.eta == pytest.approx(1. / 12.)

    def test_nonconvex_budget_scales_with_eps(self):
        """Halving eps multiplies K by 16."""
        assert nonconvex_budget(0.5, 1., 1., 0., 1.).iterations == 72 * 16
        coarse = nonconvex_budget(0.5, 2., 3., 0., 0.7).iterations
        fine = nonconvex_budget(0.25, 2., 3., 0., 0.7).iterations
        assert fine / coarse == pytest.approx(16., rel=1e-3)

    def test_nonconvex_budget_noise_dominated(self):
        budget = nonconvex_budget(1., 1., 1., 100., 1.)
        assert budget.iterations == 600
        assert budget.eta == pytest.approx(0.01)

    def test_nonconvex_budget_invalid(self):
        with pytest.raises(ConfigError):
            nonconvex_budget(0., 1., 1., 0., 1.)
        with pytest.raises(ConfigError):
            nonconvex_budget(1., 1., 1., -1., 1.)

    def test_recursion_constant_sequences(self):
        """p_k = P, q_k = Q with b Q = a P + c: tight recursion, bound holds."""
        for a, b, c_ in [(0., 1., 0.), (0.1, 2., 0.5), (1., 0.5, 3.), (0.01, 10., 0.)]:
            P, Q = 2., (a * 2. + c_) / b
            assert recursion_bound_check(np.full(11, P), np.full(10, Q), a, b, c_)

    @staticmethod
    def _check_random_recursions(count: int, seed: int) -> None:
        rng = np.random.default_rng(seed)
        for _ in range(count):
            a, b, c_ = rng.uniform(0, 0.5), rng.uniform(0.1, 5), rng.uniform(0, 2)
            K = int(rng.integers(1, 30))
            p_seq, q_seq = [rng.uniform(0, 10)], []
            for _ in range(K):
                ceiling = (1. + a) * p_seq[-1] + c_
                q = rng.uniform(0, ceiling / b)
                q_seq.append(q)
                p_seq.append(rng.uniform(0, ceiling - b * q))
            assert recursion_bound_check(np.array(p_seq), np.array(q_seq), a, b, c_)

    def test_recursion_random_instances(self):
        self._check_random_recursions(1000, seed=6)

    @pytest.mark.slow
    def test_recursion_random_instances_many(self):
        self._check_random_recursions(10_000, seed=16)

    @pytest.mark.parametrize('a, b, c_, p0, K', [
        (0., 1., 0., 1., 1),
        (0., 2., 0.5, 3., 10),
        (0., 0.3, 1., 10., 50),
        (0., 5., 0., 0.1, 200),
        (0., 1., 2., 1., 1000),
        (0.01, 1., 0., 1., 10),
        (0.1, 2., 0.5, 3., 5),
        (0.05, 0.5, 1., 2., 40),
        (0.5, 3., 0., 1., 3),
        (0.001, 1., 0.1, 5., 500),
    ])
    def test_recursion_near_tight(self, a, b, c_, p0, K):
        """
        Constant q at the largest value that keeps p_K >= 0, with every step tight.

        For a = 0 that q is the bound itself.
        """
        growth = (1. + a) ** np.arange(K + 1)
        q = ((1. + a) ** K * p0 / growth[:K].sum() + c_) / b * (1. - 1e-9)
        p_seq = [p0]
        for _ in range(K):
            p_seq.append(max((1. + a) * p_seq[-1] - b * q + c_, 0.))
        assert recursion_bound_check(np.array(p_seq), np.full(K, q), a, b, c_)
        bound = (1. + a) ** K * p0 / (b * K) + c_ / b
        if a == 0.:
            assert q == pytest.approx(bound, rel=1e-6)

    def test_recursion_preconditions(self):
        with pytest.raises(ConfigError):
            recursion_bound_check(np.array([1.]), np.array([]), 0., 1., 0.)
        with pytest.raises(ConfigError):
            recursion_bound_check(np.array([1., 1.]), np.array([1.]), -0.1, 1., 0.)
        with pytest.raises(ConfigError):
            recursion_bound_check(np.array([1., 5.]), np.array([1.]), 0., 1., 0.)

    def test_iterate_norm(self, objective, optimum):
        rng = np.random.default_rng(7)
        for _ in range(100):
            x = StackedModel.of(rng.standard_normal((3, 4)) * 3.)
            assert iterate_norm_check(objective, x, optimum.x, optimum.value).holds

    def test_aggregation_error(self, objective, optimum):
        specs = (BERNOULLI_HALF,) * objective.n
        smooth = objective.smoothness_constants()
        alpha = c.alpha(1., 1. / 8., smooth.mu)
        rng = np.random.default_rng(8)
        beta = beta_estimate(optimum.x, specs, NATURAL, 10_000, rng)
        for _ in range(5):
            x = StackedModel.of(rng.standard_normal((3, 4)))
            check = aggregation_error_check(objective, x, optimum.x, specs, NATURAL, alpha, beta, 5_000, rng)
            assert check.holds, check

    def test_strongly_convex_bound_on_runs(self, objective, optimum):
        """Mean squared distance over 20 seeds stays below the bound at eta = 1/(2 gamma)."""
        p = 0.5
        specs = (BERNOULLI_HALF,) * objective.n
        smooth = objective.smoothness_constants()
        alpha = c.alpha(1., 1. / 8., smooth.mu)
        gamma = c.gamma(p, objective.lam, objective.n, smooth.L_f, alpha)
        eta = c.stepsize_bound(gamma)
        rng = np.random.default_rng(9)
        beta = beta_estimate(optimum.x, specs, NATURAL, 10_000, rng)
        grad_star = gradient_second_moment(objective, optimum.x, p, specs, NATURAL, 10_000, rng)
        delta = c.delta(beta.value, objective.lam, objective.n, p, grad_star.value)

        params = L2gdParams(eta=eta, p=p, iterations=200, client_compressors=specs, master_compressor=NATURAL,
                            record_every=50)
        distances = np.array([
            run_l2gd(objective, params, seed=seed, x_star=optimum.x).distances() for seed in range(20)
        ])
        ks = np.array([r.k for r in run_l2gd(objective, params, seed=0).records])
        x0 = StackedModel.zeros(objective.n, objective.d)
        bound = strongly_convex_bound(ks, x0, optimum.x, eta, smooth.mu, objective.n, delta, gamma)
        assert bound.precondition_ok
        stderr = distances.std(axis=0, ddof=1) / np.sqrt(len(distances))
        assert np.all(distances.mean(axis=0) <= bound.values + 3. * stderr + 1e-12)


class TestTheoryReport:

    def test_identity_compressors(self, objective, optimum):
        report = build_theory_report(objective, (IDENTITY,) * 3, IDENTITY, 0.5, optimum, np.random.default_rng(0),
                                     samples=10_000, grid_points=10_001)
        constants = report.constants
        assert constants.alpha == 0.
        assert constants.beta == 0.
        assert constants.gamma == pytest.approx(c.gamma(0.5, objective.lam, 3, constants.L_f, 0.))
        assert constants.gamma_uncompressed <= constants.gamma
        assert constants.stepsize_bound == pytest.approx(1. / (2. * constants.gamma))
        assert f"rate:{ALPHA_ZERO}" in report.flags
        assert report.strongly_convex['precondition_ok']
        assert report.nonconvex['iterations'] >= 1
        json.dumps(report.to_dict())

    def test_no_penalty(self, synth_dataset):
        objective = LogisticObjective(ProblemSpec(dataset=synth_dataset, l2=0.1, lam=0.))
        report = build_theory_report(objective, (IDENTITY,) * 3, IDENTITY, 0.5, solve_optimum(objective),
                                     np.random.default_rng(0), samples=10_000, grid_points=10_001)
        assert report.rate.p_star == 0.
        assert f"rate:{NO_COMMUNICATION}" in report.flags

    def test_biased_compressor(self, objective, optimum):
        top_k = CompressorSpec(kind=CompressorKind.TOP_K, k=2)
        report = build_theory_report(objective, (top_k,) * 3, IDENTITY, 0.5, optimum, np.random.default_rng(0),
                                     samples=10_000, grid_points=10_001)
        assert BIASED_COMPRESSOR in report.flags
        assert report.constants.alpha is None
        assert report.constants.gamma is None
        assert report.communication is None
        assert report.strongly_convex is None

    def test_nonconvex_objective(self, synth_dataset):
        objective = SigmoidObjective(ProblemSpec(dataset=synth_dataset, l2=0., lam=1.))
        report = build_theory_report(objective, (BERNOULLI_HALF,) * 3, IDENTITY, 0.5, None, np.random.default_rng(0),
                                     samples=10_000, grid_points=10_001)
        assert NOT_STRONGLY_CONVEX in report.flags
        assert report.constants.alpha is None

    def test_stepsize_above_bound(self, objective, optimum):
        report = build_theory_report(objective, (IDENTITY,) * 3, IDENTITY, 0.5, optimum, np.random.default_rng(0),
                                     samples=10_000, eta=100., grid_points=10_001)
        assert STEPSIZE_ABOVE_BOUND in report.flags
        assert not report.strongly_convex['precondition_ok']

    def test_invalid_probability(self, objective, optimum):
        with pytest.raises(ConfigError):
            build_theory_report(objective, (IDENTITY,) * 3, IDENTITY, 1., optimum, np.random.default_rng(0))


@pytest.mark.slow
class TestNonconvexBudgetOnRuns:

    def test_sigmoid_reaches_target(self):
        """Sigmoid loss, identity compressors: within K budgeted steps min_k mean ||grad F(x^k)|| <= eps."""
        base = synth_instance(n=2, d=2, per_client=50, heterogeneity=0.5, seed=3)
        dataset = PartitionedDataset(
            clients=tuple(
                tuple(LabeledExample(e.indices, tuple(3. * v for v in e.values), e.label) for e in client)
                for client in base.clients
            ),
            d=2,
        )
        objective = SigmoidObjective(ProblemSpec(dataset=dataset, l2=0., lam=0.5))
        p, epsilon = 0.5, 0.3
        specs = (IDENTITY,) * 2
        smooth = objective.smoothness_constants()
        gamma = c.gamma(p, objective.lam, 2, smooth.L_f, 0.)
        stationary = solve_optimum(objective, tol=1e-6, max_iter=20_000)
        grad_star = gradient_second_moment(objective, stationary.x, p, specs, IDENTITY, 10, np.random.default_rng(0))
        delta = c.delta(0., objective.lam, 2, p, grad_star.value)
        x0 = StackedModel.zeros(2, 2)
        # the sigmoid loss is bounded below by 0
        budget = nonconvex_budget(epsilon, smooth.L_F, gamma, delta, objective.value(x0))

        params = L2gdParams(eta=budget.eta, p=p, iterations=budget.iterations, client_compressors=specs,
                            master_compressor=IDENTITY)
        norms = np.zeros(budget.iterations)
        for seed in range(20):
            for state, _ in run_states(objective, params, seed=seed):
                norms[state.k - 1] += math.sqrt(float(np.sum(objective.gradient(state.x) ** 2)))
        assert np.min(norms / 20.) <= epsilon
