#include "uhlq/spin_half.hpp"

#include <cmath>
#include <numbers>

namespace uhlq {

namespace {
constexpr double kPi = std::numbers::pi;
}

Matrix pauli_x()
{
    Matrix s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}

Matrix pauli_y()
{
    Matrix s(2, 2);
    s << 0, Complex(0, -1), Complex(0, 1), 0;
    return s;
}

Matrix pauli_z()
{
    Matrix s(2, 2);
    s << 1, 0, 0, -1;
    return s;
}

SpinHalfParams::SpinHalfParams(double omega0_, double temperature_, double theta_, double phi_)
    : omega0(omega0_), temperature(temperature_), theta(theta_), phi(phi_)
{
    if (!(omega0 > 0.0) || !std::isfinite(omega0))
        throw Error("SpinHalfParams: omega0 must be positive");
    if (!(temperature > 0.0) || !std::isfinite(temperature))
        throw Error("SpinHalfParams: temperature must be positive");
    if (!(theta >= 0.0 && theta <= kPi)) throw Error("SpinHalfParams: theta must be in [0, pi]");
    if (!std::isfinite(phi)) throw Error("SpinHalfParams: phi must be finite");
    phi = std::fmod(phi, 2.0 * kPi);
    if (phi < 0.0) phi += 2.0 * kPi;
}

double chi(const SpinHalfParams& p)
{
    // 2 e^{x/2}/(e^x + 1) = sech(x/2); the sech form cannot overflow
    return 1.0 / std::cosh(0.5 * p.beta() * p.omega0) - 1.0;
}

HermitianMatrix initial_hamiltonian(const SpinHalfParams& p)
{
    return HermitianMatrix(0.5 * p.omega0 * pauli_z());
}

HermitianMatrix quench_hamiltonian(const SpinHalfParams& p)
{
    Matrix h(2, 2);
    const Complex phase = std::exp(Complex(0.0, -p.phi));
    h << std::cos(p.theta), std::sin(p.theta) * phase, std::sin(p.theta) * std::conj(phase),
        -std::cos(p.theta);
    return HermitianMatrix(0.5 * p.omega0 * h);
}

HermitianMatrix h_tilde(const SpinHalfParams& p)
{
    Matrix h = quench_hamiltonian(p).matrix();
    h(0, 0) = 0.0;
    h(1, 1) = 0.0;
    return HermitianMatrix(h);
}

Complex a_factor(const SpinHalfParams& p, double t)
{
    const double half = 0.5 * p.omega0 * t;
    return Complex(std::cos(half), std::cos(p.theta) * std::sin(half));
}

double b_factor(const SpinHalfParams& p)
{
    const double c = std::cos(p.theta);
    const double s = std::sin(p.theta);
    const double x = chi(p) + 1.0;
    return std::sqrt(c * c + x * x * s * s);
}

AnalyticIngredients analytic_ingredients(const SpinHalfParams& p)
{
    return {chi(p), h_tilde(p), b_factor(p)};
}

Matrix holonomy_analytic(const SpinHalfParams& p, double t)
{
    const HermitianMatrix h = quench_hamiltonian(p);
    const HermitianMatrix shifted(h.matrix() + chi(p) * h_tilde(p).matrix());
    return unitary_evolution(h, t) * unitary_evolution(shifted, -t);
}

Complex loschmidt_analytic(const SpinHalfParams& p, double t)
{
    const double bw = p.beta() * p.omega0;
    const double b = b_factor(p);
    const double ct = std::cos(p.theta);
    const double st = std::sin(p.theta);
    const double half = 0.5 * p.omega0 * t;
    const Complex a = a_factor(p, t);
    const double cosh2 = std::exp(0.5 * bw) + std::exp(-0.5 * bw);
    const double f_minus = 1.0 / (1.0 + std::exp(-bw)); // weight on |->
    const double f_plus = 1.0 / (1.0 + std::exp(bw));   // weight on |+>

    const Complex term1 = 4.0 * st * st * std::sin(half) * std::sin(half * b) / (cosh2 * cosh2 * b);
    const Complex term2 = std::cos(half * b) * (a * f_minus + std::conj(a) * f_plus);
    const Complex term3 = Complex(0.0, 1.0) * ct * std::sin(half * b) / b *
                          (std::conj(a) * f_plus - a * f_minus);
    return term1 + term2 + term3;
}

Complex loschmidt_equator(const SpinHalfParams& p, double t)
{
    if (std::abs(p.theta - 0.5 * kPi) > 1e-9)
        throw Error("loschmidt_equator: only defined on the equator branch (theta = pi/2)");
    const double bw = p.beta() * p.omega0;
    const double c = chi(p);
    const double half = 0.5 * p.omega0 * t;
    const double prefactor = 2.0 / (std::exp(0.5 * bw) + std::exp(-0.5 * bw));
    return Complex(std::cos((c + 1.0) * half) * std::cos(half) +
                       prefactor * std::sin((c + 1.0) * half) * std::sin(half),
                   0.0);
}

double period(const SpinHalfParams& p) { return 2.0 * kPi / p.omega0; }

QuenchScenario make_scenario(const SpinHalfParams& p)
{
    return QuenchScenario(initial_hamiltonian(p), quench_hamiltonian(p), p.beta(), period(p));
}

} // namespace uhlq
