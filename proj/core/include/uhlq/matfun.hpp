#pragma once

#include "uhlq/errors.hpp"

#include <Eigen/Dense>

#include <complex>

namespace uhlq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

// Hermiticity gate at construction (relative Frobenius)
inline constexpr double kHermTol = 1e-12;
// relative rank floor for externally supplied density matrices
inline constexpr double kRankTol = 1e-12;
// |trace| below which a phase is reported as undefined
inline constexpr double kZeroTol = 1e-6;

double frobenius_norm(const Matrix& a);
// ||U^dag U - I||_F
double unitarity_error(const Matrix& u);
bool all_finite(const Matrix& a);
// wraps an angle into (-pi, pi]
double principal_angle(double a);

/// Hermitian matrix, symmetrized as (A + A^dag)/2 at construction.
/// Inputs with relative asymmetry above `tol` are rejected with the
/// measured norm so drift cannot creep through long pipelines.
class HermitianMatrix {
public:
    explicit HermitianMatrix(const Matrix& a, double tol = kHermTol);

    static HermitianMatrix zero(Eigen::Index dim);

    const Matrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    explicit HermitianMatrix(Matrix&& symmetrized, int /*trusted tag*/) : m_(std::move(symmetrized)) {}
    Matrix m_;
};

/// Eigenvalues ascending; eigenvector columns unitary with a canonical
/// gauge (first component above 1e-12 made real positive) so repeated
/// runs produce identical output files.
struct SpectralDecomposition {
    RealVector eigenvalues;
    Matrix eigenvectors;

    Eigen::Index dim() const { return eigenvalues.size(); }
};

SpectralDecomposition hermitian_eig(const HermitianMatrix& a);

/// Full-rank, unit-trace, positive-definite density matrix with a cached
/// spectral decomposition.
///
/// Two construction routes with different rank gates:
///  - from_matrix: external input; eigenvalues must clear rank_tol
///    relative to the largest one (default 1e-12).
///  - from_spectrum: trusted pipeline route (thermal states, Heisenberg
///    evolution); weights must merely be strictly positive, which admits
///    the extreme low-temperature spectra the theory still allows.
class DensityMatrix {
public:
    static DensityMatrix from_matrix(const Matrix& rho, double rank_tol = kRankTol);
    static DensityMatrix from_spectrum(const RealVector& weights, const Matrix& basis);

    const Matrix& matrix() const { return matrix_; }
    const SpectralDecomposition& spectrum() const { return spec_; }
    const RealVector& eigenvalues() const { return spec_.eigenvalues; }
    const Matrix& eigenvectors() const { return spec_.eigenvectors; }
    Eigen::Index dim() const { return matrix_.rows(); }

private:
    DensityMatrix(Matrix m, SpectralDecomposition s) : matrix_(std::move(m)), spec_(std::move(s)) {}
    Matrix matrix_;
    SpectralDecomposition spec_;
};

/// Positive-definite square root via the cached spectrum.
HermitianMatrix psd_sqrt(const DensityMatrix& rho);

/// e^{-iHt}, exactly unitary up to roundoff (spectral route).
Matrix unitary_evolution(const HermitianMatrix& h, double t);
Matrix unitary_evolution(const SpectralDecomposition& h, double t);

/// Gibbs state e^{-beta H}/Z. Requires beta >= 0 and finite; errors if a
/// Boltzmann weight underflows to zero (the formalism needs full rank).
DensityMatrix thermal_state(const HermitianMatrix& h, double beta);

} // namespace uhlq
