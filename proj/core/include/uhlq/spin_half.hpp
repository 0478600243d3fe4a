#pragma once

#include "uhlq/matfun.hpp"
#include "uhlq/quench.hpp"

namespace uhlq {

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

/// Spin-1/2 paramagnet quench: field starts along +z, flips to the
/// direction (theta, phi) at t = 0+. Temperature and omega0 share units
/// (hbar = k_B = 1).
struct SpinHalfParams {
    SpinHalfParams(double omega0, double temperature, double theta, double phi = 0.0);

    double omega0;
    double temperature;
    double theta;
    double phi;

    double beta() const { return 1.0 / temperature; }
};

/// chi = 2 e^{beta w0/2} / (e^{beta w0} + 1) - 1, in (-1, 0] for T in (0, inf].
double chi(const SpinHalfParams& p);

/// H0 = (w0/2) sigma_z
HermitianMatrix initial_hamiltonian(const SpinHalfParams& p);

/// post-quench H with eigenvalues +-w0/2
HermitianMatrix quench_hamiltonian(const SpinHalfParams& p);

/// off-diagonal block of H in the H0 eigenbasis:
/// |-><-|H|+><+| + |+><+|H|-><-|
HermitianMatrix h_tilde(const SpinHalfParams& p);

/// A(t) = cos(w0 t/2) + i cos(theta) sin(w0 t/2)
Complex a_factor(const SpinHalfParams& p, double t);

/// sqrt(cos^2 theta + (chi+1)^2 sin^2 theta), in (0, 1] for T > 0.
/// (Dimensionless; unrelated to the field magnitude, which only enters
/// through omega0.)
double b_factor(const SpinHalfParams& p);

struct AnalyticIngredients {
    double chi;
    HermitianMatrix h_tilde;
    double b_factor;
};

AnalyticIngredients analytic_ingredients(const SpinHalfParams& p);

/// Closed-form holonomy g(t) = e^{-iHt} e^{i(H + chi H~)t}.
Matrix holonomy_analytic(const SpinHalfParams& p, double t);

/// Closed-form Loschmidt amplitude for general theta.
Complex loschmidt_analytic(const SpinHalfParams& p, double t);

/// The theta = pi/2 simplification (real-valued); requires the params to
/// sit on the equator.
Complex loschmidt_equator(const SpinHalfParams& p, double t);

/// Cyclic period tau = 2 pi / omega0 of rho(t).
double period(const SpinHalfParams& p);

/// The scenario the generic pipeline runs for these parameters.
QuenchScenario make_scenario(const SpinHalfParams& p);

} // namespace uhlq
