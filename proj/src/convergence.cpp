#include <cmath>

#include "spinqrf/errors.hpp"
#include "spinqrf/qrf.hpp"

namespace spinqrf {

namespace {

struct Moments {
    double mean;
    double residual;
};

Moments diagonal_moments(const Eigen::VectorXd& probabilities, const Eigen::VectorXd& values,
                         double target) {
    double mean = 0.0, sq = 0.0;
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        mean += probabilities(k) * values(k);
        sq += probabilities(k) * (values(k) - target) * (values(k) - target);
    }
    return {mean, std::sqrt(sq)};
}

}  // namespace

bool ConvergenceTable::errors_nonincreasing(double slack) const {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& a = rows[i - 1];
        const auto& b = rows[i];
        if (b.alpha_err > a.alpha_err * (1.0 + slack) || b.beta_err > a.beta_err * (1.0 + slack) ||
            b.gamma_err > a.gamma_err * (1.0 + slack)) {
            return false;
        }
    }
    return true;
}

ConvergenceTable convergence_study(const Frame& frame, double theta, double phi,
                                   std::span<const SpinQuantumNumber> j_values) {
    if (frame.chirality() < 0) throw DomainError("convergence study needs a right-handed frame");
    if (is_gimbal_locked(frame)) {
        throw DomainError("convergence study excludes gimbal-locked frames (f3.e3 = +-1)");
    }
    const EulerAngles classical = euler_from_frame(frame);
    const Vec3 n = direction(theta, phi);
    const SpinQuantumNumber half(1);

    BranchState single;
    single.branches.push_back(Branch{1.0, frame, SystemB::label(n, 0.5, half)});
    const CVector target =
        branch_transform(single).branches.front().system.to_vector().amplitudes();

    ConvergenceTable table{frame, classical, theta, phi, {}};
    for (const auto j : j_values) {
        const auto ops = euler_angle_operators(j);
        const Eigen::Index d = j.dim();
        const CMatrix w_adj = ops.axis3_basis.adjoint();
        const CVector psi1 = scs(j, frame.f1()).amplitudes();
        const CVector psi2 = scs(j, frame.f2()).amplitudes();
        const CVector psi3 = scs(j, frame.f3()).amplitudes();

        ConvergenceRow row{j, 0.0, 0.0, 0.0, 0.0, 0.0, {}};

        const CVector alpha_psi = ops.alpha.matrix() * psi3;
        row.expectation.alpha = psi3.dot(alpha_psi).real();
        row.alpha_err = (alpha_psi - classical.alpha * psi3).norm();

        const Eigen::VectorXd p1 = (w_adj * psi1).cwiseAbs2();
        const Eigen::VectorXd p2 = (w_adj * psi2).cwiseAbs2();
        const Eigen::VectorXd p3 = (w_adj * psi3).cwiseAbs2();

        const auto beta = diagonal_moments(p3, ops.beta_values, classical.beta);
        row.expectation.beta = beta.mean;
        row.beta_err = beta.residual;

        double g_mean = 0.0, g_sq = 0.0;
        for (Eigen::Index k1 = 0; k1 < d; ++k1) {
            for (Eigen::Index k2 = 0; k2 < d; ++k2) {
                const double p12 = p1(k1) * p2(k2);
                if (p12 == 0.0) continue;
                for (Eigen::Index k3 = 0; k3 < d; ++k3) {
                    const double p = p12 * p3(k3);
                    const double g = ops.gamma_a1_values(k1) * ops.gamma_a23_values(k2 * d + k3);
                    g_mean += p * g;
                    g_sq += p * (g - classical.gamma) * (g - classical.gamma);
                }
            }
        }
        row.expectation.gamma = g_mean;
        row.gamma_err = std::sqrt(g_sq);

        const Eigen::VectorXd pz = scs(j, theta, phi).amplitudes().cwiseAbs2();
        double cos_mean = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) cos_mean += pz(k) * j.m_at(static_cast<int>(k));
        row.cos_op_err = std::cos(theta) - cos_mean / std::sqrt(j.casimir());

        const CVector out = u_transform_finite_j(realize_finite_j(single, j), ops, half);
        const CMatrix rho = reduce_to_last(out, half.dim());
        row.b_fidelity = target.dot(rho * target).real();

        table.rows.push_back(row);
    }
    return table;
}

}  // namespace spinqrf
