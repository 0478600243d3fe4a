#include "uhlq/matfun.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

namespace uhlq {

double frobenius_norm(const Matrix& a) { return a.norm(); }

double unitarity_error(const Matrix& u)
{
    return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm();
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

double principal_angle(double a)
{
    a = std::remainder(a, 2.0 * std::numbers::pi);
    if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

namespace {

// rotate each column so its first component above threshold is real positive
void canonicalize_phases(Matrix& v)
{
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            const Complex x = v(r, c);
            if (std::abs(x) > 1e-12) {
                v.col(c) *= std::conj(x) / std::abs(x);
                break;
            }
        }
    }
}

void require_square_finite(const Matrix& a, const char* who)
{
    if (a.rows() != a.cols() || a.rows() == 0)
        throw DimensionError(std::string(who) + ": matrix must be square and non-empty");
    if (!a.allFinite())
        throw Error(std::string(who) + ": matrix has non-finite entries");
}

} // namespace

HermitianMatrix::HermitianMatrix(const Matrix& a, double tol)
{
    require_square_finite(a, "HermitianMatrix");
    const double scale = a.norm();
    const double asym = (a - a.adjoint()).norm();
    if (scale > 0.0 && asym > tol * scale) {
        std::ostringstream os;
        os << "HermitianMatrix: input is not Hermitian within tolerance; "
           << "relative asymmetry " << asym / scale << " exceeds " << tol;
        throw NonHermitianError(os.str(), asym);
    }
    m_ = 0.5 * (a + a.adjoint());
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index dim)
{
    return HermitianMatrix(Matrix::Zero(dim, dim));
}

SpectralDecomposition hermitian_eig(const HermitianMatrix& a)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
    if (es.info() != Eigen::Success)
        throw Error("hermitian_eig: eigensolver did not converge");
    SpectralDecomposition sd;
    sd.eigenvalues = es.eigenvalues();
    sd.eigenvectors = es.eigenvectors();
    canonicalize_phases(sd.eigenvectors);
    return sd;
}

DensityMatrix DensityMatrix::from_matrix(const Matrix& rho, double rank_tol)
{
    HermitianMatrix h(rho);
    const double tr = h.matrix().trace().real();
    if (std::abs(tr - 1.0) > 1e-12)
        throw Error("DensityMatrix: trace differs from 1 beyond 1e-12");
    SpectralDecomposition sd = hermitian_eig(h);
    const double lam_max = sd.eigenvalues(sd.dim() - 1);
    const double lam_min = sd.eigenvalues(0);
    if (lam_max <= 0.0 || lam_min <= rank_tol * lam_max) {
        std::ostringstream os;
        os << "DensityMatrix: not full rank; smallest eigenvalue " << lam_min
           << " is below the rank floor " << rank_tol * lam_max;
        throw FullRankError(os.str());
    }
    return DensityMatrix(h.matrix(), std::move(sd));
}

DensityMatrix DensityMatrix::from_spectrum(const RealVector& weights, const Matrix& basis)
{
    if (weights.size() != basis.rows() || basis.rows() != basis.cols())
        throw DimensionError("DensityMatrix::from_spectrum: dimension mismatch");
    if (!weights.allFinite() || !basis.allFinite())
        throw Error("DensityMatrix::from_spectrum: non-finite input");
    if (unitarity_error(basis) > 1e-10)
        throw Error("DensityMatrix::from_spectrum: basis is not unitary");
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (weights(i) <= 0.0)
            throw FullRankError("DensityMatrix::from_spectrum: weight underflowed to zero; "
                                "state is not full rank");
    }
    const double sum = weights.sum();
    if (std::abs(sum - 1.0) > 1e-12)
        throw Error("DensityMatrix::from_spectrum: weights do not sum to 1 within 1e-12");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(weights.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return weights(a) < weights(b); });

    SpectralDecomposition sd;
    sd.eigenvalues.resize(weights.size());
    sd.eigenvectors.resize(basis.rows(), basis.cols());
    for (Eigen::Index k = 0; k < weights.size(); ++k) {
        sd.eigenvalues(k) = weights(order[static_cast<std::size_t>(k)]) / sum;
        sd.eigenvectors.col(k) = basis.col(order[static_cast<std::size_t>(k)]);
    }
    canonicalize_phases(sd.eigenvectors);

    Matrix m = sd.eigenvectors * sd.eigenvalues.asDiagonal() * sd.eigenvectors.adjoint();
    m = 0.5 * (m + Matrix(m.adjoint()));
    return DensityMatrix(std::move(m), std::move(sd));
}

HermitianMatrix psd_sqrt(const DensityMatrix& rho)
{
    const SpectralDecomposition& sd = rho.spectrum();
    const RealVector roots = sd.eigenvalues.cwiseSqrt();
    Matrix m = sd.eigenvectors * roots.asDiagonal() * sd.eigenvectors.adjoint();
    m = 0.5 * (m + Matrix(m.adjoint()));
    return HermitianMatrix(m);
}

Matrix unitary_evolution(const SpectralDecomposition& h, double t)
{
    ComplexVector phases(h.dim());
    for (Eigen::Index i = 0; i < h.dim(); ++i)
        phases(i) = std::exp(Complex(0.0, -h.eigenvalues(i) * t));
    return h.eigenvectors * phases.asDiagonal() * h.eigenvectors.adjoint();
}

Matrix unitary_evolution(const HermitianMatrix& h, double t)
{
    return unitary_evolution(hermitian_eig(h), t);
}

DensityMatrix thermal_state(const HermitianMatrix& h, double beta)
{
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw Error("thermal_state: beta must be finite and non-negative");
    SpectralDecomposition sd = hermitian_eig(h);
    const double e_min = sd.eigenvalues(0);
    RealVector w(sd.dim());
    for (Eigen::Index i = 0; i < sd.dim(); ++i)
        w(i) = std::exp(-beta * (sd.eigenvalues(i) - e_min));
    const double z = w.sum();
    w /= z;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) <= 0.0)
            throw FullRankError("thermal_state: Boltzmann weight underflowed to zero; "
                                "the Gibbs state is no longer full rank at this beta");
    }
    return DensityMatrix::from_spectrum(w, sd.eigenvectors);
}

} // namespace uhlq
