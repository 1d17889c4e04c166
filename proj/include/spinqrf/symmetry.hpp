#pragma once

#include <array>

#include "spinqrf/frames.hpp"
#include "spinqrf/qrf.hpp"
#include "spinqrf/spin.hpp"

namespace spinqrf {

/// Hamiltonian on A1 x A2 x A3 x B.
struct JointHamiltonian {
    HermitianOperator op;
    SpinQuantumNumber j;
    SpinQuantumNumber s;

    std::array<int, 4> dims() const { return {j.dim(), j.dim(), j.dim(), s.dim()}; }
};

/// sum_i c_i J_{A_i} . J_B
JointHamiltonian heisenberg_like_hamiltonian(SpinQuantumNumber j, SpinQuantumNumber s,
                                             const std::array<double, 3>& couplings);

/// strength * J^B_n, a field term on B alone. Not rotationally invariant.
JointHamiltonian b_field_hamiltonian(SpinQuantumNumber j, SpinQuantumNumber s, const Vec3& n,
                                     double strength = 1.0);

/// The same rotation represented on each of A1, A2, A3, B.
struct CommonRotation {
    Vec3 axis;
    double angle;
    RotationSense sense;
    std::array<UnitaryOperator, 4> factors;

    /// SO(3) matrix M with U J_n U^dagger = J_{M n} on every factor.
    Mat3 matrix() const;

    /// (U_1 x U_2 x U_3 x U_B) psi, or its adjoint.
    CVector apply(const CVector& psi, bool adjoint = false) const;
};

CommonRotation common_rotation(SpinQuantumNumber j, SpinQuantumNumber s, const Vec3& axis,
                               double angle, RotationSense sense = RotationSense::active);

/// Common rotation representing the proper rotation m.
CommonRotation common_rotation_for(SpinQuantumNumber j, SpinQuantumNumber s,
                                   const RotationMatrix& m);

/// max_k ||(R H R^dagger - H) e_k|| over the computational basis.
double check_rotational_invariance(const JointHamiltonian& h, const CommonRotation& r);

struct MatrixElementPair {
    Complex lhs;
    Complex rhs;

    double deviation() const { return std::abs(lhs - rhs); }
};

/// LHS = <g'| R H R^dagger |g> and RHS = <g'| H |g> on realized coherent-state
/// products, R the common rotation of the ket frame's matrix. The label swap is
/// bookkeeping on both sides and drops out of the numbers.
MatrixElementPair qrf_matrix_elements(const JointHamiltonian& h, const Frame& ket_frame,
                                      const Frame& bra_frame, const SpinState& ket_b,
                                      const SpinState& bra_b);

/// qrf_matrix_elements after verifying invariance of h under a fixed set of
/// common rotations (the ket frame's plus rotations about x, y, z).
/// Throws VerificationError carrying the measured deviation if h is not invariant,
/// DomainError for left-handed or gimbal-locked frames.
MatrixElementPair check_qrf_invariance(const JointHamiltonian& h, const Frame& ket_frame,
                                       const Frame& bra_frame, const SpinState& ket_b,
                                       const SpinState& bra_b);

inline constexpr double kInvarianceTolerance = 1e-8;

}  // namespace spinqrf
