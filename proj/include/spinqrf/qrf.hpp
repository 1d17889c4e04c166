#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "spinqrf/frames.hpp"
#include "spinqrf/spin.hpp"

namespace spinqrf {

/// |n, m> of a spin-s system in label form.
struct LabelState {
    Vec3 n;
    double m;
    SpinQuantumNumber s;
};

/// State of the described system B, either as a (direction, m, s) label or as
/// an explicit amplitude vector.
class SystemB {
public:
    static SystemB label(const Vec3& n, double m, SpinQuantumNumber s);
    static SystemB vector(SpinState state);

    bool is_label() const noexcept { return std::holds_alternative<LabelState>(v_); }
    const LabelState& as_label() const { return std::get<LabelState>(v_); }
    const SpinState& as_vector() const { return std::get<SpinState>(v_); }
    SpinQuantumNumber spin() const;

    /// Label form is converted through rotated_basis_state.
    SpinState to_vector() const;

    /// Componentwise distance between two systems of the same form; infinity if
    /// forms or spins differ.
    double distance(const SystemB& other) const;

private:
    explicit SystemB(std::variant<LabelState, SpinState> v) : v_(std::move(v)) {}
    std::variant<LabelState, SpinState> v_;
};

struct Branch {
    Complex amplitude;
    Frame frame;
    SystemB system;
};

/// Superposition of (frame, B) branches as described from `perspective`;
/// `described` names the frame whose orientation the branches carry.
struct BranchState {
    std::vector<Branch> branches;
    std::string perspective = "C";
    std::string described = "A";
};

/// Squared norm in the j -> infinity idealization: branches whose frames differ
/// are orthogonal, branches sharing a frame overlap through their B states.
double idealized_norm_squared(const BranchState& state);

/// Exchanges the perspective and described labels.
BranchState swap_labels(BranchState state);

/// Merges branches whose frames and B states agree within tol by adding amplitudes.
BranchState merge_duplicate_branches(const BranchState& state, double tol = 1e-9);

/// exp(i gamma J_e3) exp(i beta J_e1) exp(i alpha J_e3) on a spin-s system.
UnitaryOperator passive_euler_unitary(SpinQuantumNumber s, const EulerAngles& e,
                                      const Frame& axes = Frame::canonical());

/// Branch-exact change of perspective. Each branch is rotated by the matrix
/// composed from its own Euler angles (improper for left-handed frames), its
/// frame becomes {M e1, M e2, M e3}, and the labels are swapped.
/// Throws UnsupportedError for a vector-form B on a left-handed branch.
BranchState branch_transform(const BranchState& state);

/// Finite-j realization sum_b amp_b |f1>|f2>|f3>|B_b>, renormalized.
CVector realize_finite_j(const BranchState& state, SpinQuantumNumber j);

/// As realize_finite_j but without the final renormalization.
CVector realize_finite_j_unnormalized(const BranchState& state, SpinQuantumNumber j);

/// Reduced density matrix of B in the j -> infinity idealization, unit trace.
CMatrix idealized_b_state(const BranchState& state);

/// Von Neumann entropy (bits) of B's idealized reduced state.
double entanglement_diagnostic(const BranchState& state);

double von_neumann_entropy(const CMatrix& rho);

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const CMatrix& rho, const CMatrix& sigma);

CVector kron(const CVector& a, const CVector& b);

/// Operator-valued Euler angles on a frame of three spin-j systems A1, A2, A3.
///
/// alpha acts on A3 and is the Jordan product (F G + G F)/2 of
/// F = (2/pi) arctan(j cos_e1) and G = arccos(B^{1/2} (-cos_e2) B^{1/2}),
/// B = (1 - cos_e3^2)^{-1/2}, with G's argument clamped onto [-1, 1].
/// beta = arccos(cos_e3) on A3. gamma = F1 x G23 with
/// F1 = (2/pi) arctan(j cos_e3) on A1 and G23 = arccos(cos_e3 x B) on A2 x A3.
///
/// beta and both gamma factors are diagonal in the eigenbasis of J_e3, so they
/// are stored as eigenvalue tables against `axis3_basis`.
struct EulerAngleOperators {
    SpinQuantumNumber j;
    Frame axes;
    /// Columns are the J_e3 eigenstates m = j, ..., -j.
    CMatrix axis3_basis;
    bool axis3_is_z;
    HermitianOperator alpha;
    Eigen::VectorXd beta_values;
    Eigen::VectorXd gamma_a1_values;
    /// Row-major over (m2, m3).
    Eigen::VectorXd gamma_a23_values;

    HermitianOperator beta() const;
    HermitianOperator gamma_factor_a1() const;
    HermitianOperator gamma_factor_a23() const;
    /// Dense gamma on A1 x A2 x A3; dimension (2j+1)^3, only for small j.
    HermitianOperator gamma() const;

    /// All three angle operators zero.
    static EulerAngleOperators zero(SpinQuantumNumber j, const Frame& axes = Frame::canonical());
};

EulerAngleOperators euler_angle_operators(SpinQuantumNumber j,
                                          const Frame& axes = Frame::canonical());

/// Applies exp(i gamma J^B_e3) exp(i beta J^B_e1) exp(i alpha J^B_e3) to a joint
/// vector over A1 x A2 x A3 x B. Each factor is applied block-wise in the
/// eigenbasis of its angle operator; no joint matrix is formed.
CVector u_transform_finite_j(const CVector& joint, const EulerAngleOperators& ops,
                             SpinQuantumNumber s);

/// One row of the finite-j convergence table. Angle errors are residual norms
/// ||(op - classical) psi|| on the realized coherent-state triple.
struct ConvergenceRow {
    SpinQuantumNumber j;
    double alpha_err;
    double beta_err;
    double gamma_err;
    /// n.z - <scs(theta, phi)| cos_z |scs(theta, phi)>.
    double cos_op_err;
    /// <target| rho_B |target> after u_transform_finite_j.
    double b_fidelity;
    EulerAngles expectation;
};

struct ConvergenceTable {
    Frame frame;
    EulerAngles classical;
    double theta;
    double phi;
    std::vector<ConvergenceRow> rows;

    /// Each angle error is at most (1 + slack) times its predecessor.
    bool errors_nonincreasing(double slack = 0.05) const;
};

/// Throws DomainError for gimbal-locked or left-handed frames.
ConvergenceTable convergence_study(const Frame& frame, double theta, double phi,
                                   std::span<const SpinQuantumNumber> j_values);

}  // namespace spinqrf
