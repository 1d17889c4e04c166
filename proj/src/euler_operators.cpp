#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "spinqrf/errors.hpp"
#include "spinqrf/qrf.hpp"

namespace spinqrf {

namespace {

constexpr double kPi = std::numbers::pi;

CMatrix axis_basis(SpinQuantumNumber j, const Vec3& axis) {
    CMatrix w(j.dim(), j.dim());
    for (int k = 0; k < j.dim(); ++k) {
        w.col(k) = rotated_basis_state(j, axis, j.m_at(k)).amplitudes();
    }
    return w;
}

bool is_z(const Vec3& axis) { return axis.x() == 0.0 && axis.y() == 0.0 && axis.z() == 1.0; }

HermitianOperator diagonal_in(const CMatrix& basis, const Eigen::VectorXd& values,
                              Subsystem tag) {
    return HermitianOperator(basis * values.cast<Complex>().asDiagonal() * basis.adjoint(), tag);
}

/// Multiplies each B block of the joint vector by exp(i angle(a) mu_b), where the
/// B slot is already expressed in the generator's eigenbasis (eigenvalues mu).
template <typename AngleAt>
void apply_controlled_phases(CVector& joint, Eigen::Index b_dim, const Eigen::VectorXd& mu,
                             AngleAt angle_at) {
    const Eigen::Index blocks = joint.size() / b_dim;
    for (Eigen::Index a = 0; a < blocks; ++a) {
        const double angle = angle_at(a);
        if (angle == 0.0) continue;
        for (Eigen::Index b = 0; b < b_dim; ++b) {
            joint(a * b_dim + b) *= std::polar(1.0, angle * mu(b));
        }
    }
}

}  // namespace

HermitianOperator EulerAngleOperators::beta() const {
    return diagonal_in(axis3_basis, beta_values, Subsystem::a3);
}

HermitianOperator EulerAngleOperators::gamma_factor_a1() const {
    return diagonal_in(axis3_basis, gamma_a1_values, Subsystem::a1);
}

HermitianOperator EulerAngleOperators::gamma_factor_a23() const {
    const CMatrix w2 = Eigen::kroneckerProduct(axis3_basis, axis3_basis).eval();
    return diagonal_in(w2, gamma_a23_values, Subsystem::a2 | Subsystem::a3);
}

HermitianOperator EulerAngleOperators::gamma() const {
    const Eigen::Index d = j.dim();
    Eigen::VectorXd values(d * d * d);
    for (Eigen::Index k1 = 0; k1 < d; ++k1) {
        values.segment(k1 * d * d, d * d) = gamma_a1_values(k1) * gamma_a23_values;
    }
    const CMatrix w2 = Eigen::kroneckerProduct(axis3_basis, axis3_basis).eval();
    const CMatrix w3 = Eigen::kroneckerProduct(axis3_basis, w2).eval();
    return diagonal_in(w3, values, Subsystem::a1 | Subsystem::a2 | Subsystem::a3);
}

EulerAngleOperators EulerAngleOperators::zero(SpinQuantumNumber j, const Frame& axes) {
    const Eigen::Index d = j.dim();
    return EulerAngleOperators{j,
                               axes,
                               axis_basis(j, axes.f3()),
                               is_z(axes.f3()),
                               HermitianOperator(CMatrix::Zero(d, d), Subsystem::a3),
                               Eigen::VectorXd::Zero(d),
                               Eigen::VectorXd::Zero(d),
                               Eigen::VectorXd::Zero(d * d)};
}

EulerAngleOperators euler_angle_operators(SpinQuantumNumber j, const Frame& axes) {
    if (j.twice() < 1) throw InputError("Euler angle operators need j >= 1/2");
    const Eigen::Index d = j.dim();
    const double jv = j.value();
    const double casimir_root = std::sqrt(j.casimir());

    const auto cos1 = cosine_operator(j, axes.f1());
    const auto cos2 = cosine_operator(j, axes.f2());
    const auto cos3 = cosine_operator(j, axes.f3());

    // alpha on A3.
    const auto f = operator_function(cos1, ScalarFunction::scaled_arctan(jv));
    const HermitianOperator one_minus_sq(CMatrix::Identity(d, d) -
                                         cos3.matrix() * cos3.matrix());
    const auto b_half = operator_function(one_minus_sq, ScalarFunction::power(-0.25));
    const HermitianOperator arg(b_half.matrix() * (-cos2.matrix()) * b_half.matrix());
    const auto g = operator_function(arg, ScalarFunction::arccos_saturating());
    const CMatrix fg = f.matrix() * g.matrix();
    HermitianOperator alpha(0.5 * (fg + fg.adjoint()), Subsystem::a3);

    // beta and gamma are functions of cos_e3 only, hence diagonal in its eigenbasis.
    Eigen::VectorXd c(d), inv_sin(d), beta(d), gamma_a1(d), gamma_a23(d * d);
    for (Eigen::Index k = 0; k < d; ++k) {
        c(k) = j.m_at(static_cast<int>(k)) / casimir_root;
        inv_sin(k) = 1.0 / std::sqrt(1.0 - c(k) * c(k));
        beta(k) = std::acos(c(k));
        gamma_a1(k) = 2.0 / kPi * std::atan(jv * c(k));
    }
    for (Eigen::Index k2 = 0; k2 < d; ++k2) {
        for (Eigen::Index k3 = 0; k3 < d; ++k3) {
            gamma_a23(k2 * d + k3) = std::acos(std::clamp(c(k2) * inv_sin(k3), -1.0, 1.0));
        }
    }

    return EulerAngleOperators{j,        axes,      axis_basis(j, axes.f3()),
                               is_z(axes.f3()),     std::move(alpha),
                               beta,     gamma_a1,  gamma_a23};
}

CVector u_transform_finite_j(const CVector& joint, const EulerAngleOperators& ops,
                             SpinQuantumNumber s) {
    const int d = ops.j.dim();
    const std::array<int, 4> dims{d, d, d, s.dim()};
    const Eigen::Index expected = Eigen::Index{d} * d * d * s.dim();
    if (joint.size() != expected) {
        throw InputError("u_transform_finite_j: joint vector has length " +
                         std::to_string(joint.size()) + ", expected " + std::to_string(expected));
    }

    // Generator eigenbases on B with exact eigenvalues m.
    Eigen::VectorXd mu(s.dim());
    CMatrix x3(s.dim(), s.dim()), x1(s.dim(), s.dim());
    for (int k = 0; k < s.dim(); ++k) {
        mu(k) = s.m_at(k);
        x3.col(k) = rotated_basis_state(s, ops.axes.f3(), mu(k)).amplitudes();
        x1.col(k) = rotated_basis_state(s, ops.axes.f1(), mu(k)).amplitudes();
    }
    const CMatrix x3_adj = x3.adjoint();
    const CMatrix x1_adj = x1.adjoint();
    const Eigen::Index bd = s.dim();

    CVector psi = joint;

    // exp(i alpha J_e3): alpha lives on A3 (slot 2).
    {
        const auto [values, vectors] = eigensystem(ops.alpha);
        apply_on_subsystem_inplace(psi, vectors.adjoint(), 2, dims);
        apply_on_subsystem_inplace(psi, x3_adj, 3, dims);
        apply_controlled_phases(psi, bd, mu, [&](Eigen::Index a) { return values(a % d); });
        apply_on_subsystem_inplace(psi, x3, 3, dims);
        apply_on_subsystem_inplace(psi, vectors, 2, dims);
    }

    const CMatrix w_adj = ops.axis3_basis.adjoint();
    auto to_axis3 = [&](std::initializer_list<std::size_t> slots, bool forward) {
        if (ops.axis3_is_z) return;
        for (std::size_t slot : slots) {
            apply_on_subsystem_inplace(psi, forward ? w_adj : ops.axis3_basis, slot, dims);
        }
    };

    // exp(i beta J_e1): beta diagonal on A3.
    to_axis3({2}, true);
    apply_on_subsystem_inplace(psi, x1_adj, 3, dims);
    apply_controlled_phases(psi, bd, mu, [&](Eigen::Index a) { return ops.beta_values(a % d); });
    apply_on_subsystem_inplace(psi, x1, 3, dims);
    to_axis3({2}, false);

    // exp(i gamma J_e3): gamma = F1 x G23, diagonal on A1 x A2 x A3.
    to_axis3({0, 1, 2}, true);
    apply_on_subsystem_inplace(psi, x3_adj, 3, dims);
    const Eigen::Index dd = Eigen::Index{d} * d;
    apply_controlled_phases(psi, bd, mu, [&](Eigen::Index a) {
        return ops.gamma_a1_values(a / dd) * ops.gamma_a23_values(a % dd);
    });
    apply_on_subsystem_inplace(psi, x3, 3, dims);
    to_axis3({0, 1, 2}, false);

    return psi;
}

}  // namespace spinqrf
