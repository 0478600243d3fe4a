#pragma once

#include "uhlq/matfun.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace uhlq {

inline constexpr double kAntiHermTol = 1e-10;

/// One sample of the Uhlmann connection A_U along a trajectory.
/// The matrix is anti-Hermitian (units of inverse time); construction
/// rejects anything that would break holonomy unitarity.
struct ConnectionSample {
    ConnectionSample(double time, Matrix a_matrix);

    double t;
    Matrix a;
};

using ConnectionSampler = std::function<ConnectionSample(double)>;

/// Path-ordered exponential g(t) = T exp(-int_0^t A_U), g(0) = 1.
struct Holonomy {
    double t = 0.0;
    Matrix g;
};

/// Uniform time grid starting at 0; sample k sits at k*dt.
class TransportGrid {
public:
    TransportGrid(double t_max, double dt);

    double dt() const { return dt_; }
    std::size_t size() const { return n_; }
    double time(std::size_t k) const { return static_cast<double>(k) * dt_; }
    double t_max() const { return time(n_ - 1); }

private:
    double dt_;
    std::size_t n_;
};

/// Ordered-product rules for the time-ordered exponential.
///  - midpoint: one exponential per step, 2nd order.
///  - magnus4: commutator-free 4th-order Magnus (two exponentials per
///    step at Gauss nodes). Default: the midpoint rule cannot reach the
///    1e-8 holonomy tolerance at the standard step size.
enum class IntegratorScheme { midpoint, magnus4 };

/// Advance g across [t0, t1] with one step of the chosen rule.
Matrix holonomy_step(const ConnectionSampler& connection, double t0, double t1, const Matrix& g0,
                     IntegratorScheme scheme = IntegratorScheme::magnus4);

/// Integrate the holonomy over the whole grid. Every returned g is
/// checked unitary to 1e-9; g[0] = identity.
std::vector<Holonomy> holonomy_integrate(const ConnectionSampler& connection,
                                         const TransportGrid& grid,
                                         IntegratorScheme scheme = IntegratorScheme::magnus4);

/// Generic connection A_U = -sum |n><n| [d_sqrt_rho, sqrt_rho] |m><m| / (lambda_n + lambda_m)
/// evaluated at the point rho; the caller supplies d/dt sqrt(rho).
ConnectionSample uhlmann_connection_generic(const DensityMatrix& rho,
                                            const HermitianMatrix& d_sqrt_rho, double t = 0.0);

/// Closed-form connection for a sudden quench, A_U(t) = e^{-iHt} A_U(0) e^{iHt}
/// with the t-independent core built from the rho0 eigenbasis. Cache one of
/// these per scenario; calling it is cheap.
class QuenchConnection {
public:
    QuenchConnection(const DensityMatrix& rho0, const HermitianMatrix& h);

    ConnectionSample operator()(double t) const;
    const Matrix& at_zero() const { return a0_; }

private:
    SpectralDecomposition h_eig_;
    Matrix a0_;
};

ConnectionSample quench_connection(const DensityMatrix& rho0, const HermitianMatrix& h, double t);

/// arg Tr[rho0 g]; undefined (GDQPT point) when |trace| <= zero_tol.
struct PhaseResult {
    bool defined = false;
    double angle = 0.0; // radians in (-pi, pi]
};

PhaseResult uhlmann_phase(const DensityMatrix& rho0, const Holonomy& holonomy,
                          double zero_tol = kZeroTol);

using PurificationSampler = std::function<Matrix(double)>;

/// || W^dag W' - W'^dag W ||_F with W' by central difference: the
/// horizontality defect of the sampled purification (W^dag dW must be
/// Hermitian under parallel transport). Zero, up to O(dt^2), exactly when
/// the phase factor obeys dU/dt = -A_U U with the connection above.
double transport_residual(const PurificationSampler& w, double t, double dt);

} // namespace uhlq
