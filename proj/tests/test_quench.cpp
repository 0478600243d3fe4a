#include "uhlq/quench.hpp"

#include "uhlq/spin_half.hpp"

#include "common/test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace uhlq;

namespace {

constexpr double kPi = std::numbers::pi;

QuenchScenario random_scenario(std::mt19937_64& rng, Eigen::Index dim, double beta = 1.0)
{
    return QuenchScenario(HermitianMatrix(test::random_hermitian(rng, dim)),
                          HermitianMatrix(test::random_hermitian(rng, dim)), beta);
}

} // namespace

TEST_CASE("QuenchScenario: dimension gate and the commuting flag")
{
    std::mt19937_64 rng(71);
    CHECK_THROWS_AS(QuenchScenario(HermitianMatrix(test::random_hermitian(rng, 2)),
                                   HermitianMatrix(test::random_hermitian(rng, 3)), 1.0),
                    DimensionError);

    // quench along the same axis: trivial Uhlmann process, flagged not rejected
    const SpinHalfParams aligned(1.0, 1.0, 0.0);
    CHECK(make_scenario(aligned).commuting());
    const SpinHalfParams tilted(1.0, 1.0, 1.0);
    CHECK_FALSE(make_scenario(tilted).commuting());
}

TEST_CASE("evolve_density: fixed point at t = 0 and spectrum conservation")
{
    std::mt19937_64 rng(73);
    const QuenchScenario s = random_scenario(rng, 3);
    CHECK((evolve_density(s, 0.0).matrix() - s.rho0().matrix()).norm() < 1e-12);

    for (double t : {0.4, 2.7, 9.1}) {
        const DensityMatrix rho_t = evolve_density(s, t);
        // independent spectral oracle: re-diagonalize the evolved matrix
        const SpectralDecomposition sd = hermitian_eig(HermitianMatrix(rho_t.matrix()));
        for (Eigen::Index i = 0; i < 3; ++i)
            CHECK(std::abs(sd.eigenvalues(i) - s.rho0().eigenvalues()(i)) < 1e-12);
        CHECK(std::abs(rho_t.matrix().trace().real() - 1.0) < 1e-12);
    }
}

TEST_CASE("evolve_density: equator quench is a Gibbs state of the rotated Hamiltonian")
{
    // rho(t) = e^{-beta H(t)}/Z with H(t) = (w0/2)[cos(w0 t) sz - sin(w0 t) sy]
    const SpinHalfParams p(1.0, 1.3, 0.5 * kPi, 0.0);
    const QuenchScenario s = make_scenario(p);
    for (double t : {0.3, 1.9, 5.0}) {
        const Matrix h_t =
            0.5 * (std::cos(t) * pauli_z() - std::sin(t) * pauli_y());
        const DensityMatrix expected = thermal_state(HermitianMatrix(h_t), p.beta());
        CHECK((evolve_density(s, t).matrix() - expected.matrix()).norm() < 1e-12);
    }
}

TEST_CASE("evolve_purification: initial state and the purification consistency")
{
    std::mt19937_64 rng(79);
    const QuenchScenario s = random_scenario(rng, 3);
    const TrajectoryEvaluator eval(s);

    const PurificationState init = evolve_purification(s, 0.0, eval.holonomy(0.0));
    CHECK((init.w - s.sqrt_rho0()).norm() < 1e-12);
    CHECK((init.u - Matrix::Identity(3, 3)).norm() < 1e-12);
    CHECK((init.cal_u - Matrix::Identity(3, 3)).norm() < 1e-12);

    for (double t : {0.5, 1.7, 4.4, 8.8}) {
        const PurificationState st = evolve_purification(s, t, eval.holonomy(t));
        CHECK((st.w * st.w.adjoint() - evolve_density(s, t).matrix()).norm() < 1e-9);
        CHECK(unitarity_error(st.u) < 1e-9);
        CHECK(unitarity_error(st.cal_u) < 1e-9);
        // cal U(t) = e^{iHt} U(t)
        const Matrix e_iht = unitary_evolution(s.h_eig(), -t);
        CHECK((st.cal_u - e_iht * st.u).norm() < 1e-9);
    }
}

TEST_CASE("evolve_purification: equator closed form W(t) = e^{-iHt} sqrt(rho0) e^{i(1+chi)Ht}")
{
    const SpinHalfParams p(1.0, 0.8, 0.5 * kPi, 0.0);
    const QuenchScenario s = make_scenario(p);
    const TrajectoryEvaluator eval(s);
    for (double t : {0.9, 3.3, 6.1}) {
        const PurificationState st = evolve_purification(s, t, eval.holonomy(t));
        const Matrix expected = unitary_evolution(s.h_eig(), t) * s.sqrt_rho0() *
                                unitary_evolution(s.h_eig(), -(1.0 + chi(p)) * t);
        CHECK((st.w - expected).norm() < 1e-9);
    }
}

TEST_CASE("evolve_purification: mismatched holonomy is rejected")
{
    std::mt19937_64 rng(83);
    const QuenchScenario s = random_scenario(rng, 2);
    const TrajectoryEvaluator eval(s);
    const Holonomy g1 = eval.holonomy(1.0);
    CHECK_THROWS_AS(evolve_purification(s, 2.0, g1), ConsistencyError);
    Holonomy broken = g1;
    broken.g(0, 0) += 0.1; // not unitary any more
    CHECK_THROWS_AS(evolve_purification(s, 1.0, broken), ConsistencyError);
}

TEST_CASE("ancilla_correction: identity, commuting limit, equator form")
{
    std::mt19937_64 rng(89);
    const QuenchScenario s = random_scenario(rng, 3);
    const TrajectoryEvaluator eval(s);
    CHECK((ancilla_correction(s, 0.0, eval.holonomy(0.0)) - Matrix::Identity(3, 3)).norm() <
          1e-12);

    // commuting quench: g = 1, so cal U(t) = e^{iHt}
    const SpinHalfParams aligned(1.0, 0.7, 0.0);
    const QuenchScenario sc = make_scenario(aligned);
    const TrajectoryEvaluator eval_c(sc);
    for (double t : {1.1, 4.0}) {
        const Matrix cal_u = ancilla_correction(sc, t, eval_c.holonomy(t));
        CHECK((cal_u - unitary_evolution(sc.h_eig(), -t)).norm() < 1e-9);
    }

    // equator: cal U(t) = e^{i(1+chi)Ht}
    const SpinHalfParams eq(1.0, 1.0, 0.5 * kPi, 0.0);
    const QuenchScenario se = make_scenario(eq);
    const TrajectoryEvaluator eval_e(se);
    for (double t : {0.8, 2.9}) {
        const Matrix cal_u = ancilla_correction(se, t, eval_e.holonomy(t));
        const Matrix expected = unitary_evolution(se.h_eig(), -(1.0 + chi(eq)) * t);
        CHECK((cal_u - expected).norm() < 1e-9);
        CHECK(unitarity_error(cal_u) < 1e-10);
    }
}

TEST_CASE("loschmidt_amplitude: normalization, closed form, infinite-temperature limit")
{
    const SpinHalfParams eq(1.0, 1.0, 0.5 * kPi, 0.0);
    const TrajectoryEvaluator eval(make_scenario(eq));
    CHECK(std::abs(eval.amplitude(0.0) - 1.0) < 1e-12);

    // (chi+1) cross-check of the printed prefactor, then the closed form
    const double c = chi(eq);
    for (double t : {0.6, 2.0, 5.2, 9.7}) {
        const double expected = std::cos(0.5 * (c + 1.0) * t) * std::cos(0.5 * t) +
                                (c + 1.0) * std::sin(0.5 * (c + 1.0) * t) * std::sin(0.5 * t);
        CHECK(std::abs(eval.amplitude(t) - expected) < 1e-9);
    }

    // beta = 0: G(t) = 1 for all t
    const QuenchScenario hot(initial_hamiltonian(eq), quench_hamiltonian(eq), 0.0);
    const TrajectoryEvaluator hot_eval(hot);
    for (double t : {0.5, 3.0, 14.0}) CHECK(std::abs(hot_eval.amplitude(t) - 1.0) < 1e-12);
}

TEST_CASE("commuting quench: the amplitude stays at 1 and the geometric phase at 0")
{
    const SpinHalfParams aligned(1.0, 0.7, 0.0); // quench along the initial axis
    const QuenchScenario s = make_scenario(aligned);
    REQUIRE(s.commuting());
    CHECK(s.connection().at_zero().norm() < 1e-13);
    const TrajectoryEvaluator eval(s);
    for (double t : {0.5, 2.0, 7.7, 15.0}) {
        const TrajectorySample sample = eval(t);
        CHECK(std::abs(sample.g - 1.0) < 1e-12);
        CHECK(std::abs(sample.theta_g) < 1e-12);
    }
}

TEST_CASE("loschmidt_amplitude: |G| <= 1 across random scenarios")
{
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> ut(0.0, 10.0);
    for (int k = 0; k < 12; ++k) {
        const QuenchScenario s = random_scenario(rng, 2 + (k % 3), 0.5 + 0.2 * (k % 4));
        const TrajectoryEvaluator eval(s);
        for (int j = 0; j < 6; ++j) CHECK(std::abs(eval.amplitude(ut(rng))) <= 1.0 + 1e-10);
    }
}

TEST_CASE("phase_decomposition: zero at t = 0 and a vanishing dynamic phase")
{
    std::mt19937_64 rng(101);
    const QuenchScenario s = random_scenario(rng, 3);
    const TrajectoryEvaluator eval(s);
    const TrajectorySample at0 = eval(0.0);
    CHECK(at0.theta_tot == doctest::Approx(0.0));
    CHECK(at0.theta_d == doctest::Approx(0.0));
    CHECK(at0.theta_g == doctest::Approx(0.0));

    std::uniform_real_distribution<double> ut(0.0, 12.0);
    for (int k = 0; k < 30; ++k) {
        const TrajectorySample sample = eval(ut(rng));
        CHECK(std::abs(sample.theta_d) < 1e-9);
        if (sample.phase_defined)
            CHECK(sample.theta_g ==
                  doctest::Approx(principal_angle(sample.theta_tot - sample.theta_d)));
    }
}

TEST_CASE("phase_decomposition: geometric phase is pi between the first two zeros at low T")
{
    const SpinHalfParams cold(1.0, 0.01, 0.5 * kPi, 0.0);
    const TrajectoryEvaluator eval(make_scenario(cold));
    const double tau = period(cold);
    // strictly inside (tau/2, 3 tau/2); the endpoints are the zeros themselves
    for (double frac : {0.75, 1.0, 1.25}) {
        const TrajectorySample s = eval(frac * tau);
        REQUIRE(s.phase_defined);
        CHECK(std::abs(principal_angle(s.theta_g - kPi)) < 1e-9);
    }
}

TEST_CASE("rate_function: values and the divergent sentinel")
{
    CHECK(rate_function(Complex(1.0, 0.0)).value == doctest::Approx(0.0));
    CHECK_FALSE(rate_function(Complex(1.0, 0.0)).divergent);
    CHECK(rate_function(Complex(0.5, 0.0)).value == doctest::Approx(2.0 * std::log(2.0)));
    CHECK(rate_function(Complex(0.0, 0.5)).value == doctest::Approx(2.0 * std::log(2.0)));

    const Rate diverged = rate_function(Complex(1e-9, 0.0));
    CHECK(diverged.divergent);
    CHECK(std::isinf(diverged.value));

    // T -> 0 at the first critical time t*_0 = pi/w0
    const SpinHalfParams cold(1.0, 0.01, 0.5 * kPi, 0.0);
    const TrajectoryEvaluator eval(make_scenario(cold));
    CHECK(eval(kPi).r.divergent);
}

TEST_CASE("incompatibility_diagnostic: zero Hamiltonian moves nothing")
{
    Matrix h0(2, 2);
    h0 << 0.5, 0, 0, -0.5;
    const QuenchScenario s(HermitianMatrix(h0), HermitianMatrix::zero(2), 1.0);
    const IncompatibilityReport rep = incompatibility_diagnostic(s);
    CHECK(rep.anticommutator_norm == doctest::Approx(0.0));
    CHECK(rep.naive_residual == doctest::Approx(0.0));
    CHECK(rep.uhlmann_residual == doctest::Approx(0.0));
}

TEST_CASE("incompatibility_diagnostic: naive dynamics fails where the quench form transports")
{
    const SpinHalfParams p(1.0, 1.0, 0.5 * kPi, 0.0);
    const QuenchScenario s = make_scenario(p);
    const IncompatibilityReport rep = incompatibility_diagnostic(s);

    CHECK(rep.naive_residual > 0.1);   // > 0.1 w0
    CHECK(rep.uhlmann_residual < 1e-6);

    // exact oracle for the naive defect: 2 ||sqrt(rho0) H sqrt(rho0)||_F
    const double oracle = 2.0 * (s.sqrt_rho0() * s.h().matrix() * s.sqrt_rho0()).norm();
    CHECK(rep.naive_residual == doctest::Approx(oracle).epsilon(1e-6));

    // and the anticommutator lower bound for full-rank states
    const Matrix anti = s.h().matrix() * s.rho0().matrix() + s.rho0().matrix() * s.h().matrix();
    const double lower = s.rho0().eigenvalues()(0) * anti.norm();
    CHECK(rep.naive_residual > lower - 1e-9);
}

TEST_CASE("incompatibility_diagnostic: any non-anticommuting random quench shows the defect")
{
    std::mt19937_64 rng(103);
    const QuenchScenario s = random_scenario(rng, 3);
    const IncompatibilityReport rep = incompatibility_diagnostic(s);
    REQUIRE(rep.anticommutator_norm > 0.0);
    CHECK(rep.naive_residual > 0.0);
    CHECK(rep.uhlmann_residual < 1e-6);
}

TEST_CASE("transport_identity_check: commuting, equator, and random draws")
{
    // commuting quench
    const SpinHalfParams aligned(1.0, 0.9, 0.0);
    const QuenchScenario sc = make_scenario(aligned);
    CHECK(transport_identity_check(sc.rho0(), sc.h(), 1.7) < 1e-12);

    const SpinHalfParams eq(1.0, 1.0, 0.5 * kPi, 0.0);
    const QuenchScenario se = make_scenario(eq);
    for (double t : {0.0, 0.9, 4.2, 17.0})
        CHECK(transport_identity_check(se.rho0(), se.h(), t) < 1e-10);

    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> ut(0.0, 10.0);
    for (int k = 0; k < 100; ++k) {
        const Eigen::Index dim = 2 + (k % 3);
        const DensityMatrix rho0 = test::random_density(rng, dim);
        const HermitianMatrix h(test::random_hermitian(rng, dim));
        CHECK(transport_identity_check(rho0, h, ut(rng)) < 1e-10);
    }
}

TEST_CASE("near-degenerate spectra: identity and closed form stay conditioned at ratio 1e-6")
{
    std::mt19937_64 rng(109);
    for (Eigen::Index dim : {3, 4}) {
        const DensityMatrix rho0 = test::density_with_ratio(rng, dim, 1e-6);
        const HermitianMatrix h(test::random_hermitian(rng, dim));
        for (double t : {0.3, 2.1, 7.7})
            CHECK(transport_identity_check(rho0, h, t) < 1e-10);

        // generic formula against the closed form on the same trajectory
        const QuenchConnection conn(rho0, h);
        const double t = 1.9;
        const Matrix u = unitary_evolution(h, t);
        const DensityMatrix rho_t =
            DensityMatrix::from_spectrum(rho0.eigenvalues(), u * rho0.eigenvectors());
        const Matrix sr = psd_sqrt(rho_t).matrix();
        const HermitianMatrix dsr(Complex(0, -1) * (h.matrix() * sr - sr * h.matrix()));
        CHECK((uhlmann_connection_generic(rho_t, dsr, t).a - conn(t).a).norm() < 1e-9);
    }
}

TEST_CASE("degenerate post-quench spectra pass through the whole pipeline")
{
    // H with a repeated eigenvalue; only rho0's eigenvalue sums enter any
    // denominator, so degeneracy in H must be harmless
    std::mt19937_64 rng(211);
    Matrix h(3, 3);
    h.setZero();
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    h(2, 2) = -0.5;
    h(0, 2) = Complex(0.2, 0.1);
    h(2, 0) = Complex(0.2, -0.1);
    const QuenchScenario s(HermitianMatrix(test::random_hermitian(rng, 3)), HermitianMatrix(h),
                           0.9);
    const TrajectoryEvaluator eval(s);
    for (double t : {0.7, 3.0}) {
        CHECK(transport_identity_check(s.rho0(), s.h(), t) < 1e-10);
        const TrajectorySample sample = eval(t);
        CHECK(std::abs(sample.g) <= 1.0 + 1e-10);
        CHECK(std::abs(sample.theta_d) < 1e-9);
        const PurificationState st = evolve_purification(s, t, eval.holonomy(t));
        CHECK((st.w * st.w.adjoint() - evolve_density(s, t).matrix()).norm() < 1e-9);
    }
}

TEST_CASE("TrajectoryEvaluator: integrator grid defaults and off-grid consistency")
{
    const SpinHalfParams p(1.0, 0.8, 1.0, 0.3);
    const QuenchScenario s = make_scenario(p);
    const TrajectoryEvaluator eval(s);
    CHECK(eval.integrator_dt() == doctest::Approx(period(p) / 2000.0));

    // off-grid point evaluation agrees with a dedicated integration to t
    const double t = 1.23456;
    const ConnectionSampler sampler = [&](double tt) { return s.connection()(tt); };
    const Matrix direct = holonomy_integrate(sampler, TransportGrid(t, t / 2000.0)).back().g;
    CHECK((eval.holonomy(t).g - direct).norm() < 1e-10);
}
