#include "uhlq/uhlmann.hpp"

#include "uhlq/quench.hpp"
#include "uhlq/spin_half.hpp"

#include "common/test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace uhlq;

namespace {

constexpr double kPi = std::numbers::pi;

// d/dt sqrt(rho(t)) = -i [H, sqrt(rho(t))] along the quench trajectory
HermitianMatrix analytic_d_sqrt_rho(const QuenchScenario& s, double t)
{
    const Matrix sr = psd_sqrt(evolve_density(s, t)).matrix();
    const Matrix comm = s.h().matrix() * sr - sr * s.h().matrix();
    return HermitianMatrix(Complex(0, -1) * comm);
}

} // namespace

TEST_CASE("ConnectionSample rejects non-anti-Hermitian matrices")
{
    CHECK_THROWS_AS(ConnectionSample(0.0, pauli_x()), Error);
    CHECK_NOTHROW(ConnectionSample(0.0, Complex(0, 1) * pauli_x()));
}

TEST_CASE("TransportGrid: validation and sample count")
{
    CHECK_THROWS_AS(TransportGrid(1.0, 0.0), Error);
    CHECK_THROWS_AS(TransportGrid(1.0, -0.1), Error);
    const TransportGrid grid(1.0, 0.3);
    CHECK(grid.size() == 4); // 0, 0.3, 0.6, 0.9
    CHECK(grid.time(0) == 0.0);
    CHECK(grid.time(3) == doctest::Approx(0.9));
    CHECK(TransportGrid(0.0, 0.1).size() == 1);
}

TEST_CASE("generic connection vanishes when d sqrt(rho) commutes with sqrt(rho)")
{
    RealVector w(2);
    w << 0.3, 0.7;
    const DensityMatrix rho = DensityMatrix::from_spectrum(w, Matrix::Identity(2, 2));
    Matrix d(2, 2);
    d << 0.2, 0, 0, -0.1; // diagonal, so [d, sqrt(rho)] = 0
    const ConnectionSample a = uhlmann_connection_generic(rho, HermitianMatrix(d));
    CHECK(a.a.norm() < 1e-14);
}

TEST_CASE("generic connection at t = 0 reproduces -i chi H~ on the equator")
{
    const SpinHalfParams p(1.0, 0.7, 0.5 * kPi, 0.0);
    const QuenchScenario s = make_scenario(p);
    const ConnectionSample a = uhlmann_connection_generic(s.rho0(), analytic_d_sqrt_rho(s, 0.0));
    const Matrix expected = Complex(0, -1) * chi(p) * h_tilde(p).matrix();
    CHECK((a.a - expected).norm() < 1e-10);
}

TEST_CASE("generic connection equals the quench closed form along trajectories")
{
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ut(0.0, 6.0);
    for (Eigen::Index dim = 2; dim <= 4; ++dim) {
        for (int k = 0; k < 8; ++k) {
            const QuenchScenario s(HermitianMatrix(test::random_hermitian(rng, dim)),
                                   HermitianMatrix(test::random_hermitian(rng, dim)), 1.1);
            const double t = ut(rng);
            const DensityMatrix rho_t = evolve_density(s, t);
            const ConnectionSample generic =
                uhlmann_connection_generic(rho_t, analytic_d_sqrt_rho(s, t), t);
            const ConnectionSample closed = s.connection()(t);
            CHECK((generic.a - closed.a).norm() < 1e-9);
            CHECK((closed.a + closed.a.adjoint()).norm() < 1e-10);
        }
    }
}

TEST_CASE("generic connection accepts a finite-difference derivative")
{
    std::mt19937_64 rng(43);
    const QuenchScenario s(HermitianMatrix(test::random_hermitian(rng, 3)),
                           HermitianMatrix(test::random_hermitian(rng, 3)), 0.8);
    const double t = 1.3, h = 1e-5;
    const Matrix fd = (psd_sqrt(evolve_density(s, t + h)).matrix() -
                       psd_sqrt(evolve_density(s, t - h)).matrix()) /
                      (2.0 * h);
    const ConnectionSample generic = uhlmann_connection_generic(evolve_density(s, t),
                                                                HermitianMatrix(fd), t);
    CHECK((generic.a - s.connection()(t).a).norm() < 1e-7);
}

TEST_CASE("quench connection equals e^{-iHt} chi H~ e^{iHt} for the spin-1/2 family")
{
    for (double theta : {0.4, 1.1, kPi / 2.0}) {
        const SpinHalfParams p(1.0, 0.6, theta, 1.9);
        const QuenchScenario s = make_scenario(p);
        for (double t : {0.0, 1.3, 4.8}) {
            const Matrix u = unitary_evolution(s.h_eig(), t);
            const Matrix expected =
                Complex(0, -1) * (u * (chi(p) * h_tilde(p).matrix()) * u.adjoint());
            CHECK((s.connection()(t).a - expected).norm() < 1e-10);
        }
    }
}

TEST_CASE("quench connection carries the conjugation structure")
{
    std::mt19937_64 rng(47);
    const HermitianMatrix h(test::random_hermitian(rng, 3));
    const DensityMatrix rho0 = test::random_density(rng, 3);
    const QuenchConnection conn(rho0, h);
    const double t = 2.2;
    const Matrix u = unitary_evolution(h, t);
    CHECK((conn(t).a - u * conn.at_zero() * u.adjoint()).norm() < 1e-12);
}

TEST_CASE("holonomy of the zero connection is the identity")
{
    const ConnectionSampler zero = [](double t) {
        return ConnectionSample(t, Matrix::Zero(3, 3));
    };
    const auto gs = holonomy_integrate(zero, TransportGrid(2.0, 0.01));
    for (const Holonomy& g : gs) CHECK((g.g - Matrix::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("holonomy matches the spin-1/2 analytic closed form")
{
    const SpinHalfParams p(1.0, 0.5, kPi / 3.0, 0.7);
    const QuenchScenario s = make_scenario(p);
    const ConnectionSampler sampler = [&](double t) { return s.connection()(t); };
    const TransportGrid grid(10.0, period(p) / 2000.0);
    const auto gs = holonomy_integrate(sampler, grid);
    double worst = 0.0;
    for (const Holonomy& g : gs) {
        worst = std::max(worst, (g.g - holonomy_analytic(p, g.t)).norm());
        CHECK(unitarity_error(g.g) < 1e-9);
    }
    CHECK(worst < 1e-8);
    CHECK((gs.front().g - Matrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("midpoint rule is second order; the default rule is fourth order")
{
    std::mt19937_64 rng(53);
    const QuenchScenario s(HermitianMatrix(test::random_hermitian(rng, 3)),
                           HermitianMatrix(test::random_hermitian(rng, 3)), 1.0);
    const ConnectionSampler sampler = [&](double t) { return s.connection()(t); };
    const double t_end = 2.0;

    const auto end_state = [&](double dt, IntegratorScheme scheme) {
        const auto gs = holonomy_integrate(sampler, TransportGrid(t_end, dt), scheme);
        return gs.back().g;
    };
    const Matrix reference = end_state(t_end / 1024.0, IntegratorScheme::magnus4);

    const double e1 = (end_state(t_end / 32.0, IntegratorScheme::midpoint) - reference).norm();
    const double e2 = (end_state(t_end / 64.0, IntegratorScheme::midpoint) - reference).norm();
    const double e3 = (end_state(t_end / 128.0, IntegratorScheme::midpoint) - reference).norm();
    const double slope12 = std::log2(e1 / e2);
    const double slope23 = std::log2(e2 / e3);
    CHECK(slope12 == doctest::Approx(2.0).epsilon(0.1));
    CHECK(slope23 == doctest::Approx(2.0).epsilon(0.1));

    const double f1 = (end_state(t_end / 32.0, IntegratorScheme::magnus4) - reference).norm();
    const double f2 = (end_state(t_end / 64.0, IntegratorScheme::magnus4) - reference).norm();
    CHECK(std::log2(f1 / f2) == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("holonomy stays unitary and on the analytic curve over eighty periods")
{
    const SpinHalfParams p(1.0, 0.5, kPi / 3.0, 0.7);
    const QuenchScenario s = make_scenario(p);
    const ConnectionSampler sampler = [&](double t) { return s.connection()(t); };
    const auto gs = holonomy_integrate(sampler, TransportGrid(500.0, period(p) / 2000.0));
    double worst_unitarity = 0.0;
    for (std::size_t k = 0; k < gs.size(); k += 997)
        worst_unitarity = std::max(worst_unitarity, unitarity_error(gs[k].g));
    CHECK(worst_unitarity < 1e-9);
    CHECK((gs.back().g - holonomy_analytic(p, gs.back().t)).norm() < 1e-7);
}

TEST_CASE("the pipeline holds together at the dim = 16 desk-scale boundary")
{
    std::mt19937_64 rng(331);
    const DensityMatrix rho0 = test::random_density(rng, 16, 0.5);
    const HermitianMatrix h(test::random_hermitian(rng, 16, 0.5));
    for (double t : {0.4, 2.0}) CHECK(transport_identity_check(rho0, h, t) < 1e-10);

    const QuenchConnection conn(rho0, h);
    const auto gs = holonomy_integrate([&](double t) { return conn(t); },
                                       TransportGrid(1.0, 0.002));
    CHECK(unitarity_error(gs.back().g) < 1e-9);
    const PhaseResult phase = uhlmann_phase(rho0, gs.back());
    CHECK(phase.defined);
}

TEST_CASE("uhlmann_phase: identity holonomy, undefined trace, cyclic values")
{
    RealVector w(2);
    w << 0.5, 0.5;
    const DensityMatrix mixed = DensityMatrix::from_spectrum(w, Matrix::Identity(2, 2));

    const PhaseResult zero = uhlmann_phase(mixed, {0.0, Matrix::Identity(2, 2)});
    CHECK(zero.defined);
    CHECK(zero.angle == doctest::Approx(0.0));

    // Tr[rho g] = 0 for g = diag(1, -1): a genuine GDQPT-style node
    CHECK_FALSE(uhlmann_phase(mixed, {0.0, Matrix(pauli_z())}).defined);

    // equator quench at T = 0.01 w0: theta_U alternates pi, 0 at tau, 2 tau
    const SpinHalfParams p(1.0, 0.01, 0.5 * kPi, 0.0);
    const TrajectoryEvaluator eval(make_scenario(p));
    const double tau = period(p);
    const PhaseResult at_tau = uhlmann_phase(eval.scenario().rho0(), eval.holonomy(tau));
    REQUIRE(at_tau.defined);
    CHECK(std::abs(principal_angle(at_tau.angle - kPi)) < 1e-6);
    const PhaseResult at_2tau = uhlmann_phase(eval.scenario().rho0(), eval.holonomy(2.0 * tau));
    REQUIRE(at_2tau.defined);
    CHECK(std::abs(at_2tau.angle) < 1e-6);
}

TEST_CASE("uhlmann phase is invariant under eigenbasis reordering and rephasing")
{
    std::mt19937_64 rng(59);
    RealVector w(3);
    w << 0.2, 0.3, 0.5;
    const Matrix v = test::random_unitary(rng, 3);

    Matrix v_permuted(3, 3);
    v_permuted.col(0) = v.col(2) * std::exp(Complex(0.0, 0.9));
    v_permuted.col(1) = v.col(0) * std::exp(Complex(0.0, -1.7));
    v_permuted.col(2) = v.col(1);
    RealVector w_permuted(3);
    w_permuted << w(2), w(0), w(1);

    const DensityMatrix rho_a = DensityMatrix::from_spectrum(w, v);
    const DensityMatrix rho_b = DensityMatrix::from_spectrum(w_permuted, v_permuted);
    CHECK((rho_a.matrix() - rho_b.matrix()).norm() < 1e-13);

    // drive the connection and holonomy from both gauges
    const HermitianMatrix h(test::random_hermitian(rng, 3));
    const double t = 3.1;
    const QuenchConnection ca(rho_a, h);
    const QuenchConnection cb(rho_b, h);
    const ConnectionSampler sampler_a = [&](double tt) { return ca(tt); };
    const ConnectionSampler sampler_b = [&](double tt) { return cb(tt); };
    const TransportGrid grid(t, 0.002);
    const Holonomy ga = holonomy_integrate(sampler_a, grid).back();
    const Holonomy gb = holonomy_integrate(sampler_b, grid).back();

    const PhaseResult pa = uhlmann_phase(rho_a, ga);
    const PhaseResult pb = uhlmann_phase(rho_b, gb);
    REQUIRE(pa.defined);
    REQUIRE(pb.defined);
    CHECK(std::abs(principal_angle(pa.angle - pb.angle)) < 1e-9);
}

TEST_CASE("transport_residual: constant purification is exactly parallel")
{
    std::mt19937_64 rng(61);
    const Matrix w0 = psd_sqrt(test::random_density(rng, 3)).matrix();
    const PurificationSampler constant = [&](double) { return w0; };
    CHECK(transport_residual(constant, 1.0, 1e-4) < 1e-12);
}
