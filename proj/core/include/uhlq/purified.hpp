#pragma once

#include "uhlq/matfun.hpp"
#include "uhlq/spin_half.hpp"

namespace uhlq {

/// System (x) ancilla statevector. Amplitudes are system-major:
/// amplitudes(i * dim_a + j) multiplies |i>_s (x) |j>_a, so the vector is
/// the row-major flattening of the purification matrix W. With that
/// convention <W1|W2> = Tr(W1^dag W2) and the ancilla partial trace gives
/// W W^dag, for any basis.
struct PurifiedState {
    Eigen::Index dim_s = 0;
    Eigen::Index dim_a = 0;
    ComplexVector amplitudes;
};

/// |W> = sum_n sqrt(lambda_n) |n>_s (x) U^T |n>_a, i.e. the flattening of
/// sqrt(rho0) U. U must be unitary.
PurifiedState build_purified_state(const DensityMatrix& rho0, const Matrix& u);

/// rho = Tr_a |W><W|. Tolerates rank deficiency (a product state reduces
/// to a pure projector), hence returns the plain Hermitian matrix rather
/// than the full-rank DensityMatrix type.
HermitianMatrix partial_trace_ancilla(const PurifiedState& psi);

/// The product-form protocol unitaries: U_s = e^{-iHt} on the system,
/// U_a = e^{i(1+chi)Ht} on the ancilla.
struct ProtocolOps {
    Matrix u_s;
    Matrix u_a;
};

ProtocolOps protocol_ops(const SpinHalfParams& p, double t);

/// |psi'> = (U_s (x) U_a^T) |psi>
PurifiedState apply_protocol_ops(const PurifiedState& psi, const ProtocolOps& ops);

/// Run the system/ancilla product protocol to time t. Only the equator
/// family (theta = pi/2, where H~ = H) admits the product form; anything
/// else must go through the matrix pipeline.
PurifiedState evolve_protocol(const SpinHalfParams& p, double t);

/// Hilbert-Schmidt overlap <psi1|psi2>.
Complex hs_overlap(const PurifiedState& psi1, const PurifiedState& psi2);

} // namespace uhlq
