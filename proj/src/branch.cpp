#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spinqrf/errors.hpp"
#include "spinqrf/qrf.hpp"

namespace spinqrf {

namespace {

constexpr double kFrameMatchTolerance = 1e-9;

std::vector<std::vector<std::size_t>> group_by_frame(const BranchState& state) {
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < state.branches.size(); ++i) {
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) {
            return state.branches[g.front()].frame.distance(state.branches[i].frame) <=
                   kFrameMatchTolerance;
        });
        if (it == groups.end()) {
            groups.push_back({i});
        } else {
            it->push_back(i);
        }
    }
    return groups;
}

SpinQuantumNumber common_b_spin(const BranchState& state) {
    if (state.branches.empty()) throw InputError("branch state has no branches");
    const auto s = state.branches.front().system.spin();
    for (const auto& b : state.branches) {
        if (b.system.spin() != s) throw InputError("branches carry B systems of different spin");
    }
    return s;
}

}  // namespace

SystemB SystemB::label(const Vec3& n, double m, SpinQuantumNumber s) {
    if (std::abs(n.norm() - 1.0) > kUnitTolerance) {
        throw InputError("B label direction is not a unit vector");
    }
    const double k = s.value() - m;
    if (std::abs(k - std::round(k)) > 1e-9 || std::abs(m) > s.value() + 1e-9) {
        throw InputError("B label m=" + std::to_string(m) + " is not valid for s=" +
                         std::to_string(s.value()));
    }
    return SystemB(LabelState{n, m, s});
}

SystemB SystemB::vector(SpinState state) { return SystemB(std::move(state)); }

SpinQuantumNumber SystemB::spin() const {
    return is_label() ? as_label().s : as_vector().spin();
}

SpinState SystemB::to_vector() const {
    if (!is_label()) return as_vector();
    const auto& l = as_label();
    return rotated_basis_state(l.s, l.n, l.m);
}

double SystemB::distance(const SystemB& other) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (is_label() != other.is_label() || spin() != other.spin()) return inf;
    if (is_label()) {
        const auto& a = as_label();
        const auto& b = other.as_label();
        return std::max((a.n - b.n).cwiseAbs().maxCoeff(), std::abs(a.m - b.m));
    }
    return (as_vector().amplitudes() - other.as_vector().amplitudes()).cwiseAbs().maxCoeff();
}

double idealized_norm_squared(const BranchState& state) {
    double total = 0.0;
    for (const auto& group : group_by_frame(state)) {
        CVector w;
        for (std::size_t i : group) {
            const auto& b = state.branches[i];
            CVector v = b.amplitude * b.system.to_vector().amplitudes();
            if (w.size() == 0) {
                w = v;
            } else if (w.size() == v.size()) {
                w += v;
            } else {
                throw InputError("branches sharing a frame carry B systems of different spin");
            }
        }
        total += w.squaredNorm();
    }
    return total;
}

BranchState swap_labels(BranchState state) {
    std::swap(state.perspective, state.described);
    return state;
}

BranchState merge_duplicate_branches(const BranchState& state, double tol) {
    BranchState out;
    out.perspective = state.perspective;
    out.described = state.described;
    for (const auto& b : state.branches) {
        auto it = std::find_if(out.branches.begin(), out.branches.end(), [&](const Branch& o) {
            return o.frame.distance(b.frame) <= tol && o.system.distance(b.system) <= tol;
        });
        if (it == out.branches.end()) {
            out.branches.push_back(b);
        } else {
            it->amplitude += b.amplitude;
        }
    }
    return out;
}

UnitaryOperator passive_euler_unitary(SpinQuantumNumber s, const EulerAngles& e,
                                      const Frame& axes) {
    const auto first = rotation_operator(s, axes.f3(), e.alpha, RotationSense::passive);
    const auto second = rotation_operator(s, axes.f1(), e.beta, RotationSense::passive);
    const auto third = rotation_operator(s, axes.f3(), e.gamma, RotationSense::passive);
    return UnitaryOperator(third.matrix() * second.matrix() * first.matrix(), Subsystem::b);
}

BranchState branch_transform(const BranchState& state) {
    BranchState out;
    out.perspective = state.perspective;
    out.described = state.described;
    out.branches.reserve(state.branches.size());
    for (std::size_t i = 0; i < state.branches.size(); ++i) {
        const Branch& in = state.branches[i];
        const EulerAngles angles = euler_from_frame(in.frame);
        const RotationMatrix m = compose(angles, in.frame.chirality());

        std::optional<SystemB> system;
        if (in.system.is_label()) {
            const auto& l = in.system.as_label();
            system = SystemB::label((m * l.n).normalized(), l.m, l.s);
        } else {
            if (!m.proper()) {
                throw UnsupportedError(
                    "branch " + std::to_string(i) +
                    ": a reflection has no unitary action on a vector-form B state; use label form");
            }
            const auto u = passive_euler_unitary(in.system.spin(), angles);
            CVector v = u.matrix() * in.system.as_vector().amplitudes();
            v /= v.norm();
            system = SystemB::vector(SpinState(in.system.spin(), std::move(v)));
        }
        out.branches.push_back(
            Branch{in.amplitude, Frame::from_columns(m.matrix()), std::move(*system)});
    }
    return swap_labels(merge_duplicate_branches(out));
}

CVector kron(const CVector& a, const CVector& b) {
    CVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

CVector realize_finite_j_unnormalized(const BranchState& state, SpinQuantumNumber j) {
    const auto s = common_b_spin(state);
    const Eigen::Index d = j.dim();
    CVector joint = CVector::Zero(d * d * d * s.dim());
    for (const auto& b : state.branches) {
        const CVector a12 = kron(scs(j, b.frame.f1()).amplitudes(),
                                 scs(j, b.frame.f2()).amplitudes());
        const CVector a123 = kron(a12, scs(j, b.frame.f3()).amplitudes());
        joint += b.amplitude * kron(a123, b.system.to_vector().amplitudes());
    }
    return joint;
}

CVector realize_finite_j(const BranchState& state, SpinQuantumNumber j) {
    CVector joint = realize_finite_j_unnormalized(state, j);
    const double norm = joint.norm();
    if (norm == 0.0) throw DomainError("realized state vanishes");
    return joint / norm;
}

CMatrix idealized_b_state(const BranchState& state) {
    const auto s = common_b_spin(state);
    CMatrix rho = CMatrix::Zero(s.dim(), s.dim());
    for (const auto& group : group_by_frame(state)) {
        CVector w = CVector::Zero(s.dim());
        for (std::size_t i : group) {
            const auto& b = state.branches[i];
            w += b.amplitude * b.system.to_vector().amplitudes();
        }
        rho += w * w.adjoint();
    }
    const double tr = rho.trace().real();
    if (tr <= 0.0) throw DomainError("branch state has zero norm");
    return rho / tr;
}

double von_neumann_entropy(const CMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(rho);
    double h = 0.0;
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
        const double p = solver.eigenvalues()(k);
        if (p > 1e-15) h -= p * std::log2(p);
    }
    return std::max(0.0, h);
}

double entanglement_diagnostic(const BranchState& state) {
    return von_neumann_entropy(idealized_b_state(state));
}

double fidelity(const CMatrix& rho, const CMatrix& sigma) {
    Eigen::SelfAdjointEigenSolver<CMatrix> r(rho);
    const Eigen::VectorXd root = r.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const CMatrix sqrt_rho =
        r.eigenvectors() * root.cast<Complex>().asDiagonal() * r.eigenvectors().adjoint();
    const CMatrix inner = sqrt_rho * sigma * sqrt_rho;
    Eigen::SelfAdjointEigenSolver<CMatrix> m(0.5 * (inner + inner.adjoint()));
    const double tr = m.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return tr * tr;
}

}  // namespace spinqrf
