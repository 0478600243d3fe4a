#include "uhlq/purified.hpp"

#include <cmath>
#include <numbers>

namespace uhlq {

namespace {

// row-major view of the amplitude vector as the dim_s x dim_a matrix W
Matrix as_matrix(const PurifiedState& psi)
{
    Matrix w(psi.dim_s, psi.dim_a);
    for (Eigen::Index i = 0; i < psi.dim_s; ++i)
        for (Eigen::Index j = 0; j < psi.dim_a; ++j) w(i, j) = psi.amplitudes(i * psi.dim_a + j);
    return w;
}

PurifiedState from_matrix(const Matrix& w)
{
    PurifiedState psi;
    psi.dim_s = w.rows();
    psi.dim_a = w.cols();
    psi.amplitudes.resize(psi.dim_s * psi.dim_a);
    for (Eigen::Index i = 0; i < psi.dim_s; ++i)
        for (Eigen::Index j = 0; j < psi.dim_a; ++j) psi.amplitudes(i * psi.dim_a + j) = w(i, j);
    return psi;
}

} // namespace

PurifiedState build_purified_state(const DensityMatrix& rho0, const Matrix& u)
{
    if (u.rows() != rho0.dim() || u.cols() != rho0.dim())
        throw DimensionError("build_purified_state: phase factor dimension mismatch");
    if (unitarity_error(u) > 1e-10)
        throw Error("build_purified_state: phase factor is not unitary");
    PurifiedState psi = from_matrix(psd_sqrt(rho0).matrix() * u);
    const double norm = psi.amplitudes.norm();
    if (std::abs(norm - 1.0) > 1e-10)
        throw ConsistencyError("build_purified_state: purified state is not normalized");
    return psi;
}

HermitianMatrix partial_trace_ancilla(const PurifiedState& psi)
{
    if (psi.amplitudes.size() != psi.dim_s * psi.dim_a || psi.dim_s == 0 || psi.dim_a == 0)
        throw DimensionError("partial_trace_ancilla: inconsistent dimensions");
    if (std::abs(psi.amplitudes.norm() - 1.0) > 1e-10)
        throw Error("partial_trace_ancilla: state is not normalized");
    const Matrix w = as_matrix(psi);
    Matrix rho = w * w.adjoint();
    return HermitianMatrix(rho);
}

ProtocolOps protocol_ops(const SpinHalfParams& p, double t)
{
    const HermitianMatrix h = quench_hamiltonian(p);
    ProtocolOps ops;
    ops.u_s = unitary_evolution(h, t);
    ops.u_a = unitary_evolution(h, -(1.0 + chi(p)) * t); // e^{i(1+chi)Ht}
    return ops;
}

PurifiedState apply_protocol_ops(const PurifiedState& psi, const ProtocolOps& ops)
{
    if (ops.u_s.rows() != psi.dim_s || ops.u_a.rows() != psi.dim_a)
        throw DimensionError("apply_protocol_ops: operator dimensions do not match the state");
    if (unitarity_error(ops.u_s) > 1e-10 || unitarity_error(ops.u_a) > 1e-10)
        throw Error("apply_protocol_ops: protocol operators must be unitary");
    // (U_s (x) U_a^T) acts on the flattened W as W -> U_s W U_a
    return from_matrix(ops.u_s * as_matrix(psi) * ops.u_a);
}

PurifiedState evolve_protocol(const SpinHalfParams& p, double t)
{
    if (std::abs(p.theta - 0.5 * std::numbers::pi) > 1e-12)
        throw UnsupportedProtocolError(
            "evolve_protocol: product-form protocol requires theta = pi/2 (H~ = H); "
            "route other scenarios through the matrix pipeline");
    const DensityMatrix rho0 = thermal_state(initial_hamiltonian(p), p.beta());
    const PurifiedState psi0 =
        build_purified_state(rho0, Matrix::Identity(rho0.dim(), rho0.dim()));
    return apply_protocol_ops(psi0, protocol_ops(p, t));
}

Complex hs_overlap(const PurifiedState& psi1, const PurifiedState& psi2)
{
    if (psi1.dim_s != psi2.dim_s || psi1.dim_a != psi2.dim_a)
        throw DimensionError("hs_overlap: dimension mismatch");
    return psi1.amplitudes.dot(psi2.amplitudes);
}

} // namespace uhlq
