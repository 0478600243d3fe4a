#include "uhlq/uhlmann.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace uhlq {

namespace {

// e^{M} for anti-Hermitian M, through the Hermitian generator S = iM.
// Generators below ~0.05 ulp of the identity: exp(M) rounds to I, and
// returning it exactly keeps near-zero connections (beta -> 0) from
// accumulating eigensolver noise over thousands of steps.
Matrix expm_antihermitian(const Matrix& m)
{
    if (m.norm() < 1e-17) return Matrix::Identity(m.rows(), m.cols());
    Matrix s = Complex(0.0, 1.0) * m;
    s = 0.5 * (s + Matrix(s.adjoint()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.info() != Eigen::Success)
        throw Error("expm_antihermitian: eigensolver did not converge");
    ComplexVector phases(s.rows());
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        phases(i) = std::exp(Complex(0.0, -es.eigenvalues()(i)));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace

ConnectionSample::ConnectionSample(double time, Matrix a_matrix) : t(time), a(std::move(a_matrix))
{
    if (a.rows() != a.cols() || a.rows() == 0)
        throw DimensionError("ConnectionSample: matrix must be square and non-empty");
    if (!a.allFinite()) throw Error("ConnectionSample: non-finite entries");
    const double herm_part = (a + a.adjoint()).norm();
    if (herm_part > kAntiHermTol * std::max(1.0, a.norm())) {
        std::ostringstream os;
        os << "ConnectionSample: matrix is not anti-Hermitian (||A + A^dag|| = " << herm_part
           << "); integrating it would break holonomy unitarity";
        throw Error(os.str());
    }
}

TransportGrid::TransportGrid(double t_max, double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("TransportGrid: dt must be positive");
    if (!(t_max >= 0.0) || !std::isfinite(t_max))
        throw Error("TransportGrid: t_max must be non-negative");
    dt_ = dt;
    n_ = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
}

Matrix holonomy_step(const ConnectionSampler& connection, double t0, double t1, const Matrix& g0,
                     IntegratorScheme scheme)
{
    const double h = t1 - t0;
    if (h == 0.0) return g0;
    if (scheme == IntegratorScheme::midpoint) {
        const ConnectionSample mid = connection(t0 + 0.5 * h);
        return expm_antihermitian(-h * mid.a) * g0;
    }
    // CF4: Gauss nodes c = 1/2 -+ sqrt(3)/6, weights a = 1/4 + sqrt(3)/6, b = 1/4 - sqrt(3)/6
    static const double s3 = std::sqrt(3.0);
    const double c1 = 0.5 - s3 / 6.0;
    const double c2 = 0.5 + s3 / 6.0;
    const double wa = 0.25 + s3 / 6.0;
    const double wb = 0.25 - s3 / 6.0;
    const ConnectionSample a1 = connection(t0 + c1 * h);
    const ConnectionSample a2 = connection(t0 + c2 * h);
    const Matrix first = expm_antihermitian(-h * (wa * a1.a + wb * a2.a));
    const Matrix second = expm_antihermitian(-h * (wb * a1.a + wa * a2.a));
    return second * (first * g0);
}

std::vector<Holonomy> holonomy_integrate(const ConnectionSampler& connection,
                                         const TransportGrid& grid, IntegratorScheme scheme)
{
    std::vector<Holonomy> out;
    out.reserve(grid.size());

    const ConnectionSample probe = connection(0.0);
    const Eigen::Index dim = probe.a.rows();
    Matrix g = Matrix::Identity(dim, dim);
    out.push_back({0.0, g});

    for (std::size_t k = 1; k < grid.size(); ++k) {
        g = holonomy_step(connection, grid.time(k - 1), grid.time(k), g, scheme);
        if (unitarity_error(g) > 1e-9)
            throw ConsistencyError("holonomy_integrate: holonomy drifted from unitarity");
        out.push_back({grid.time(k), g});
    }
    return out;
}

ConnectionSample uhlmann_connection_generic(const DensityMatrix& rho,
                                            const HermitianMatrix& d_sqrt_rho, double t)
{
    if (d_sqrt_rho.dim() != rho.dim())
        throw DimensionError("uhlmann_connection_generic: dimension mismatch");
    const Matrix sqrt_rho = psd_sqrt(rho).matrix();
    const Matrix comm = d_sqrt_rho.matrix() * sqrt_rho - sqrt_rho * d_sqrt_rho.matrix();

    const SpectralDecomposition& sd = rho.spectrum();
    Matrix proj = sd.eigenvectors.adjoint() * comm * sd.eigenvectors;
    for (Eigen::Index n = 0; n < rho.dim(); ++n)
        for (Eigen::Index m = 0; m < rho.dim(); ++m)
            proj(n, m) /= sd.eigenvalues(n) + sd.eigenvalues(m);

    Matrix a = -(sd.eigenvectors * proj * sd.eigenvectors.adjoint());
    a = 0.5 * (a - Matrix(a.adjoint()));
    return ConnectionSample(t, std::move(a));
}

QuenchConnection::QuenchConnection(const DensityMatrix& rho0, const HermitianMatrix& h)
    : h_eig_(hermitian_eig(h))
{
    if (h.dim() != rho0.dim()) throw DimensionError("QuenchConnection: dimension mismatch");

    // i A_U(0) = sum_nm |n> <n|H|m> 2 sqrt(l_n l_m)/(l_n + l_m) <m| - H  in the rho0 eigenbasis
    const SpectralDecomposition& sd = rho0.spectrum();
    Matrix k = sd.eigenvectors.adjoint() * h.matrix() * sd.eigenvectors;
    for (Eigen::Index n = 0; n < rho0.dim(); ++n) {
        for (Eigen::Index m = 0; m < rho0.dim(); ++m) {
            const double ln = sd.eigenvalues(n);
            const double lm = sd.eigenvalues(m);
            k(n, m) *= 2.0 * std::sqrt(ln) * std::sqrt(lm) / (ln + lm);
        }
    }
    Matrix ia0 = sd.eigenvectors * k * sd.eigenvectors.adjoint() - h.matrix();
    a0_ = Complex(0.0, -1.0) * ia0;
    a0_ = 0.5 * (a0_ - Matrix(a0_.adjoint()));
}

ConnectionSample QuenchConnection::operator()(double t) const
{
    if (t == 0.0) return ConnectionSample(0.0, a0_);
    const Matrix u = unitary_evolution(h_eig_, t);
    Matrix a = u * a0_ * u.adjoint();
    a = 0.5 * (a - Matrix(a.adjoint()));
    return ConnectionSample(t, std::move(a));
}

ConnectionSample quench_connection(const DensityMatrix& rho0, const HermitianMatrix& h, double t)
{
    return QuenchConnection(rho0, h)(t);
}

PhaseResult uhlmann_phase(const DensityMatrix& rho0, const Holonomy& holonomy, double zero_tol)
{
    if (holonomy.g.rows() != rho0.dim())
        throw DimensionError("uhlmann_phase: dimension mismatch");
    const Complex tr = (rho0.matrix() * holonomy.g).trace();
    if (std::abs(tr) <= zero_tol) return {false, 0.0};
    return {true, principal_angle(std::arg(tr))};
}

double transport_residual(const PurificationSampler& w, double t, double dt)
{
    if (!(dt > 0.0)) throw Error("transport_residual: dt must be positive");
    const Matrix w0 = w(t);
    const Matrix wdot = (w(t + dt) - w(t - dt)) / (2.0 * dt);
    return (w0.adjoint() * wdot - wdot.adjoint() * w0).norm();
}

} // namespace uhlq
