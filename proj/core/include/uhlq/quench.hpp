#pragma once

#include "uhlq/matfun.hpp"
#include "uhlq/uhlmann.hpp"

#include <optional>
#include <vector>

namespace uhlq {

/// Sudden quench H0 -> H at t = 0+ from the Gibbs state of H0.
/// A vanishing [H, rho0] makes the Uhlmann process trivial; that is
/// flagged, not rejected.
class QuenchScenario {
public:
    QuenchScenario(const HermitianMatrix& h0, const HermitianMatrix& h, double beta,
                   std::optional<double> period = std::nullopt);

    const HermitianMatrix& h0() const { return h0_; }
    const HermitianMatrix& h() const { return h_; }
    double beta() const { return beta_; }
    const DensityMatrix& rho0() const { return rho0_; }
    const Matrix& sqrt_rho0() const { return sqrt_rho0_; }
    const SpectralDecomposition& h_eig() const { return h_eig_; }
    const QuenchConnection& connection() const { return connection_; }
    bool commuting() const { return commuting_; }
    std::optional<double> period() const { return period_; }
    Eigen::Index dim() const { return h_.dim(); }

    // largest eigenvalue gap of H; sets the natural time scale
    double spectral_span() const;

private:
    HermitianMatrix h0_;
    HermitianMatrix h_;
    double beta_;
    DensityMatrix rho0_;
    Matrix sqrt_rho0_;
    SpectralDecomposition h_eig_;
    QuenchConnection connection_;
    bool commuting_;
    std::optional<double> period_;
};

/// W(t) = e^{-iHt} W(0) e^{iHt} U(t) with W(0) = sqrt(rho0), U(0) = 1.
/// u is the phase factor (equals the holonomy g), cal_u = e^{iHt} U(t)
/// the correction applied on the ancilla side.
struct PurificationState {
    double t = 0.0;
    Matrix w;
    Matrix u;
    Matrix cal_u;
};

/// Rate function value; divergent when |G| fell below the zero threshold.
struct Rate {
    bool divergent = false;
    double value = 0.0;
};

struct TrajectorySample {
    double t = 0.0;
    Complex g;
    bool phase_defined = false;
    double theta_tot = 0.0;
    double theta_d = 0.0;
    double theta_g = 0.0;
    Rate r;
};

/// Heisenberg evolution rho(t) = e^{-iHt} rho0 e^{iHt}; spectrum preserved
/// exactly (the eigenvalues are carried over, only the basis rotates).
DensityMatrix evolve_density(const QuenchScenario& s, double t);

PurificationState evolve_purification(const QuenchScenario& s, double t, const Holonomy& g);

/// cal U(t) = e^{iHt} T exp(-int A_U)
Matrix ancilla_correction(const QuenchScenario& s, double t, const Holonomy& g);

/// G(t) = Tr[sqrt(rho0) e^{-iHt} sqrt(rho0) e^{iHt} g(t)]
Complex loschmidt_amplitude(const QuenchScenario& s, double t, const Holonomy& g);

struct PhaseDecomposition {
    bool defined = false;
    double theta_tot = 0.0;
    double theta_d = 0.0;
    double theta_g = 0.0;
};

/// Splits arg G into dynamic and geometric parts. theta_d is computed
/// independently from arg Tr[sqrt(rho0) sqrt(rho(t))] and must vanish
/// (trace of a product of positive-definite Hermitians); |theta_d| >= 1e-9
/// is treated as an internal failure.
PhaseDecomposition phase_decomposition(const QuenchScenario& s, double t, Complex g_amp);

/// r = -ln |G|^2 per site; divergent below the zero threshold.
Rate rate_function(Complex g_amp);

struct IncompatibilityReport {
    double anticommutator_norm = 0.0;
    double naive_residual = 0.0;
    double uhlmann_residual = 0.0;
};

/// Transport residual of the naive W(t) = e^{-iHt} W(0) against the
/// quench-constructed W(t), plus ||{H, rho0}||_F. The naive choice can
/// only transport in parallel if {H, rho} = 0, impossible at full rank.
IncompatibilityReport incompatibility_diagnostic(const QuenchScenario& s, double fd_dt = 0.0);

/// Relative residual of 2 sqrt(rho0) H sqrt(rho0) = {rho0, H + e^{iHt} iA_U e^{-iHt}};
/// an identity for every (rho0, H, t).
double transport_identity_check(const DensityMatrix& rho0, const HermitianMatrix& h, double t);

/// Point evaluation along one trajectory. Owns a sequential holonomy
/// integration on an internal fine grid; off-grid queries take one extra
/// partial step, so refinement near zeros stays at integrator accuracy.
/// Not safe for concurrent use; run scenarios on separate evaluators.
class TrajectoryEvaluator {
public:
    explicit TrajectoryEvaluator(QuenchScenario scenario,
                                 IntegratorScheme scheme = IntegratorScheme::magnus4,
                                 double integrator_dt = 0.0);

    TrajectorySample operator()(double t) const;
    Holonomy holonomy(double t) const;
    Complex amplitude(double t) const;

    const QuenchScenario& scenario() const { return scenario_; }
    double integrator_dt() const { return dt_; }

private:
    void extend(double t) const;

    QuenchScenario scenario_;
    IntegratorScheme scheme_;
    double dt_;
    mutable std::vector<Matrix> cache_; // g at k*dt_
};

} // namespace uhlq
