#include "uhlq/quench.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace uhlq {

QuenchScenario::QuenchScenario(const HermitianMatrix& h0, const HermitianMatrix& h, double beta,
                               std::optional<double> period)
    : h0_(h0),
      h_(h),
      beta_(beta),
      rho0_(thermal_state(h0, beta)),
      sqrt_rho0_(psd_sqrt(rho0_).matrix()),
      h_eig_(hermitian_eig(h)),
      connection_(rho0_, h),
      period_(period)
{
    if (h0.dim() != h.dim()) throw DimensionError("QuenchScenario: H0 and H dimensions differ");
    if (period_ && !(*period_ > 0.0))
        throw Error("QuenchScenario: period must be positive when given");
    const Matrix comm = h_.matrix() * rho0_.matrix() - rho0_.matrix() * h_.matrix();
    commuting_ = comm.norm() <= 1e-12 * std::max(1.0, h_.matrix().norm());
}

double QuenchScenario::spectral_span() const
{
    return h_eig_.eigenvalues(h_eig_.dim() - 1) - h_eig_.eigenvalues(0);
}

DensityMatrix evolve_density(const QuenchScenario& s, double t)
{
    const Matrix u = unitary_evolution(s.h_eig(), t);
    return DensityMatrix::from_spectrum(s.rho0().eigenvalues(), u * s.rho0().eigenvectors());
}

namespace {

void check_holonomy_matches(const QuenchScenario& s, double t, const Holonomy& g, const char* who)
{
    if (g.g.rows() != s.dim()) throw DimensionError(std::string(who) + ": dimension mismatch");
    if (std::abs(g.t - t) > 1e-9 * std::max(1.0, std::abs(t)))
        throw ConsistencyError(std::string(who) + ": holonomy time does not match t");
    if (unitarity_error(g.g) > 1e-9)
        throw ConsistencyError(std::string(who) + ": holonomy is not unitary");
}

} // namespace

PurificationState evolve_purification(const QuenchScenario& s, double t, const Holonomy& g)
{
    check_holonomy_matches(s, t, g, "evolve_purification");
    const Matrix u_t = unitary_evolution(s.h_eig(), t);
    PurificationState st;
    st.t = t;
    st.u = g.g;
    st.cal_u = u_t.adjoint() * g.g;
    st.w = u_t * s.sqrt_rho0() * st.cal_u;

    const Matrix rho_t = evolve_density(s, t).matrix();
    const double mismatch = (st.w * st.w.adjoint() - rho_t).norm();
    if (mismatch > 1e-6) {
        std::ostringstream os;
        os << "evolve_purification: W W^dag differs from rho(t) by " << mismatch
           << "; holonomy does not belong to this scenario/time";
        throw ConsistencyError(os.str());
    }
    return st;
}

Matrix ancilla_correction(const QuenchScenario& s, double t, const Holonomy& g)
{
    check_holonomy_matches(s, t, g, "ancilla_correction");
    const Matrix u_t = unitary_evolution(s.h_eig(), t);
    return u_t.adjoint() * g.g;
}

Complex loschmidt_amplitude(const QuenchScenario& s, double t, const Holonomy& g)
{
    check_holonomy_matches(s, t, g, "loschmidt_amplitude");
    const Matrix u_t = unitary_evolution(s.h_eig(), t);
    return (s.sqrt_rho0() * u_t * s.sqrt_rho0() * u_t.adjoint() * g.g).trace();
}

PhaseDecomposition phase_decomposition(const QuenchScenario& s, double t, Complex g_amp)
{
    const Matrix u_t = unitary_evolution(s.h_eig(), t);
    const Matrix sqrt_rho_t = u_t * s.sqrt_rho0() * u_t.adjoint();
    const Complex dyn = (s.sqrt_rho0() * sqrt_rho_t).trace();
    const double theta_d = principal_angle(std::arg(dyn));
    if (std::abs(theta_d) >= 1e-9)
        throw ConsistencyError("phase_decomposition: dynamic phase failed to vanish");

    PhaseDecomposition pd;
    pd.theta_d = theta_d;
    pd.defined = std::abs(g_amp) > kZeroTol;
    if (pd.defined) {
        pd.theta_tot = principal_angle(std::arg(g_amp));
        pd.theta_g = principal_angle(pd.theta_tot - theta_d);
    }
    return pd;
}

Rate rate_function(Complex g_amp)
{
    const double mag = std::abs(g_amp);
    if (mag < kZeroTol) return {true, std::numeric_limits<double>::infinity()};
    return {false, -2.0 * std::log(mag)};
}

IncompatibilityReport incompatibility_diagnostic(const QuenchScenario& s, double fd_dt)
{
    IncompatibilityReport rep;
    const Matrix& h = s.h().matrix();
    const Matrix& rho0 = s.rho0().matrix();
    rep.anticommutator_norm = (h * rho0 + rho0 * h).norm();

    const double span = s.spectral_span();
    if (span <= 1e-14 && rep.anticommutator_norm <= 1e-14) return rep; // H = 0: nothing moves

    const double scale = std::max(span, 1e-14);
    if (fd_dt <= 0.0) fd_dt = 1e-4 / scale;
    const double t_ref = s.period() ? *s.period() : 2.0 * std::numbers::pi / scale;

    const PurificationSampler naive = [&](double t) {
        return Matrix(unitary_evolution(s.h_eig(), t) * s.sqrt_rho0());
    };
    const TrajectoryEvaluator eval(s);
    const PurificationSampler uhlmann = [&](double t) {
        const Holonomy g = eval.holonomy(t);
        const Matrix u_t = unitary_evolution(s.h_eig(), t);
        return Matrix(u_t * s.sqrt_rho0() * u_t.adjoint() * g.g);
    };

    for (int k = 1; k <= 8; ++k) {
        const double t = t_ref * static_cast<double>(k) / 8.0;
        rep.naive_residual = std::max(rep.naive_residual, transport_residual(naive, t, fd_dt));
        rep.uhlmann_residual = std::max(rep.uhlmann_residual, transport_residual(uhlmann, t, fd_dt));
    }
    return rep;
}

double transport_identity_check(const DensityMatrix& rho0, const HermitianMatrix& h, double t)
{
    const QuenchConnection conn(rho0, h);
    const Matrix u_t = unitary_evolution(h, t);
    const Matrix ia_back = u_t.adjoint() * (Complex(0.0, 1.0) * conn(t).a) * u_t;

    const Matrix sqrt_rho0 = psd_sqrt(rho0).matrix();
    const Matrix lhs = 2.0 * sqrt_rho0 * h.matrix() * sqrt_rho0;
    const Matrix inner = h.matrix() + ia_back;
    const Matrix rhs = rho0.matrix() * inner + inner * rho0.matrix();

    const double denom = lhs.norm();
    const double diff = (lhs - rhs).norm();
    return denom > 1e-300 ? diff / denom : diff;
}

// ---------------------------------------------------------------------------
// TrajectoryEvaluator
// ---------------------------------------------------------------------------

TrajectoryEvaluator::TrajectoryEvaluator(QuenchScenario scenario, IntegratorScheme scheme,
                                         double integrator_dt)
    : scenario_(std::move(scenario)), scheme_(scheme)
{
    if (integrator_dt > 0.0) {
        dt_ = integrator_dt;
    } else {
        const double span = scenario_.spectral_span();
        const double base = scenario_.period() ? *scenario_.period()
                            : span > 1e-14     ? 2.0 * std::numbers::pi / span
                                               : 1.0;
        dt_ = base / 2000.0;
    }
    cache_.push_back(Matrix::Identity(scenario_.dim(), scenario_.dim()));
}

void TrajectoryEvaluator::extend(double t) const
{
    const ConnectionSampler sampler = [this](double tt) { return scenario_.connection()(tt); };
    while (static_cast<double>(cache_.size() - 1) * dt_ < t - 1e-12 * std::max(1.0, t)) {
        const double t0 = static_cast<double>(cache_.size() - 1) * dt_;
        Matrix g = holonomy_step(sampler, t0, t0 + dt_, cache_.back(), scheme_);
        if (unitarity_error(g) > 1e-9)
            throw ConsistencyError("TrajectoryEvaluator: holonomy drifted from unitarity");
        cache_.push_back(std::move(g));
    }
}

Holonomy TrajectoryEvaluator::holonomy(double t) const
{
    if (!(t >= 0.0) || !std::isfinite(t))
        throw Error("TrajectoryEvaluator: time must be finite and non-negative");
    extend(t);
    std::size_t k = static_cast<std::size_t>(std::floor(t / dt_ + 1e-9));
    if (k >= cache_.size()) k = cache_.size() - 1;
    const double tk = static_cast<double>(k) * dt_;
    if (t - tk <= 1e-12 * std::max(1.0, t)) return {t, cache_[k]};
    const ConnectionSampler sampler = [this](double tt) { return scenario_.connection()(tt); };
    return {t, holonomy_step(sampler, tk, t, cache_[k], scheme_)};
}

Complex TrajectoryEvaluator::amplitude(double t) const
{
    return loschmidt_amplitude(scenario_, t, holonomy(t));
}

TrajectorySample TrajectoryEvaluator::operator()(double t) const
{
    const Holonomy g = holonomy(t);
    TrajectorySample sample;
    sample.t = t;
    sample.g = loschmidt_amplitude(scenario_, t, g);
    const PhaseDecomposition pd = phase_decomposition(scenario_, t, sample.g);
    sample.phase_defined = pd.defined;
    sample.theta_tot = pd.theta_tot;
    sample.theta_d = pd.theta_d;
    sample.theta_g = pd.theta_g;
    sample.r = rate_function(sample.g);
    return sample;
}

} // namespace uhlq
