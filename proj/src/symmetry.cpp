#include "spinqrf/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spinqrf/errors.hpp"

namespace spinqrf {

namespace {

CVector realize_product(SpinQuantumNumber j, const Frame& frame, const SpinState& b) {
    return kron(kron(kron(scs(j, frame.f1()).amplitudes(), scs(j, frame.f2()).amplitudes()),
                     scs(j, frame.f3()).amplitudes()),
                b.amplitudes());
}

void require_frame(const Frame& frame, const char* which) {
    if (frame.chirality() < 0) {
        throw DomainError(std::string(which) + " frame must be right-handed");
    }
    if (is_gimbal_locked(frame)) {
        throw DomainError(std::string(which) + " frame is gimbal-locked");
    }
}

}  // namespace

JointHamiltonian heisenberg_like_hamiltonian(SpinQuantumNumber j, SpinQuantumNumber s,
                                             const std::array<double, 3>& couplings) {
    const auto ja = angular_momentum_ops(j);
    const auto jb = angular_momentum_ops(s);
    const std::array<int, 4> dims{j.dim(), j.dim(), j.dim(), s.dim()};
    const Eigen::Index total = Eigen::Index{j.dim()} * j.dim() * j.dim() * s.dim();
    const std::array<const CMatrix*, 3> a_comp{&ja.x.matrix(), &ja.y.matrix(), &ja.z.matrix()};
    const std::array<const CMatrix*, 3> b_comp{&jb.x.matrix(), &jb.y.matrix(), &jb.z.matrix()};

    CMatrix h = CMatrix::Zero(total, total);
    for (Eigen::Index col = 0; col < total; ++col) {
        const CVector basis = CVector::Unit(total, col);
        for (std::size_t slot = 0; slot < 3; ++slot) {
            if (couplings[slot] == 0.0) continue;
            for (std::size_t c = 0; c < 3; ++c) {
                CVector v = apply_on_subsystem(basis, *b_comp[c], 3, dims);
                apply_on_subsystem_inplace(v, *a_comp[c], slot, dims);
                h.col(col) += couplings[slot] * v;
            }
        }
    }
    return JointHamiltonian{HermitianOperator(h), j, s};
}

JointHamiltonian b_field_hamiltonian(SpinQuantumNumber j, SpinQuantumNumber s, const Vec3& n,
                                     double strength) {
    const auto jb = j_along(angular_momentum_ops(s), n);
    const Eigen::Index a = Eigen::Index{j.dim()} * j.dim() * j.dim();
    CMatrix h = CMatrix::Zero(a * s.dim(), a * s.dim());
    for (Eigen::Index k = 0; k < a; ++k) {
        h.block(k * s.dim(), k * s.dim(), s.dim(), s.dim()) = strength * jb.matrix();
    }
    return JointHamiltonian{HermitianOperator(h), j, s};
}

Mat3 CommonRotation::matrix() const {
    // The passive sense represents the inverse rotation.
    return axis_rotation(axis, sense == RotationSense::active ? angle : -angle);
}

CVector CommonRotation::apply(const CVector& psi, bool adjoint) const {
    const std::array<int, 4> dims{static_cast<int>(factors[0].dim()),
                                  static_cast<int>(factors[1].dim()),
                                  static_cast<int>(factors[2].dim()),
                                  static_cast<int>(factors[3].dim())};
    CVector out = psi;
    for (std::size_t slot = 0; slot < 4; ++slot) {
        const CMatrix& u = factors[slot].matrix();
        apply_on_subsystem_inplace(out, adjoint ? CMatrix(u.adjoint()) : u, slot, dims);
    }
    return out;
}

CommonRotation common_rotation(SpinQuantumNumber j, SpinQuantumNumber s, const Vec3& axis,
                               double angle, RotationSense sense) {
    const auto ua = rotation_operator(j, axis, angle, sense);
    const auto ub = rotation_operator(s, axis, angle, sense);
    return CommonRotation{axis,
                          angle,
                          sense,
                          {UnitaryOperator(ua.matrix(), Subsystem::a1),
                           UnitaryOperator(ua.matrix(), Subsystem::a2),
                           UnitaryOperator(ua.matrix(), Subsystem::a3),
                           UnitaryOperator(ub.matrix(), Subsystem::b)}};
}

CommonRotation common_rotation_for(SpinQuantumNumber j, SpinQuantumNumber s,
                                   const RotationMatrix& m) {
    if (!m.proper()) throw UnsupportedError("common rotations are proper by definition");
    const Eigen::AngleAxisd aa(m.matrix());
    return common_rotation(j, s, aa.axis(), aa.angle(), RotationSense::active);
}

double check_rotational_invariance(const JointHamiltonian& h, const CommonRotation& r) {
    const Eigen::Index total = h.op.dim();
    if (total != Eigen::Index{r.factors[0].dim()} * r.factors[1].dim() * r.factors[2].dim() *
                     r.factors[3].dim()) {
        throw InputError("rotation and Hamiltonian dimensions differ");
    }
    double worst = 0.0;
    for (Eigen::Index k = 0; k < total; ++k) {
        const CVector e = CVector::Unit(total, k);
        const CVector rotated = r.apply(h.op.matrix() * r.apply(e, true));
        worst = std::max(worst, (rotated - h.op.matrix().col(k)).norm());
    }
    return worst;
}

MatrixElementPair qrf_matrix_elements(const JointHamiltonian& h, const Frame& ket_frame,
                                      const Frame& bra_frame, const SpinState& ket_b,
                                      const SpinState& bra_b) {
    if (ket_b.spin() != h.s || bra_b.spin() != h.s) {
        throw InputError("B states do not match the Hamiltonian's B spin");
    }
    const auto m = compose_proper(euler_from_frame(ket_frame));
    const auto r = common_rotation_for(h.j, h.s, m);
    const CVector ket = realize_product(h.j, ket_frame, ket_b);
    const CVector bra = realize_product(h.j, bra_frame, bra_b);

    MatrixElementPair out;
    out.lhs = r.apply(bra, true).dot(h.op.matrix() * r.apply(ket, true));
    out.rhs = bra.dot(h.op.matrix() * ket);
    return out;
}

MatrixElementPair check_qrf_invariance(const JointHamiltonian& h, const Frame& ket_frame,
                                       const Frame& bra_frame, const SpinState& ket_b,
                                       const SpinState& bra_b) {
    require_frame(ket_frame, "ket");
    require_frame(bra_frame, "bra");
    const auto m = compose_proper(euler_from_frame(ket_frame));
    double deviation = check_rotational_invariance(h, common_rotation_for(h.j, h.s, m));
    for (int k = 0; k < 3; ++k) {
        const Vec3 axis = Vec3::Unit(k);
        deviation = std::max(deviation,
                             check_rotational_invariance(h, common_rotation(h.j, h.s, axis, 1.0)));
    }
    if (deviation > kInvarianceTolerance) {
        throw VerificationError("Hamiltonian is not rotationally invariant (deviation " +
                                    std::to_string(deviation) + ")",
                                deviation);
    }
    return qrf_matrix_elements(h, ket_frame, bra_frame, ket_b, bra_b);
}

}  // namespace spinqrf
