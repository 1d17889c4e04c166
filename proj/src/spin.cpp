#include "spinqrf/spin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "spinqrf/errors.hpp"

namespace spinqrf {

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_unit(const Vec3& n, const char* what) {
    if (!std::isfinite(n.norm()) || std::abs(n.norm() - 1.0) > kUnitTolerance) {
        throw InputError(std::string(what) + ": expected a unit vector, got norm " +
                         std::to_string(n.norm()));
    }
}

}  // namespace

SpinQuantumNumber::SpinQuantumNumber(int twice_j) : twice_j_(twice_j) {
    if (twice_j < 0) throw InputError("spin quantum number must be non-negative");
}

SpinQuantumNumber SpinQuantumNumber::from_value(double j) {
    const double twice = 2.0 * j;
    const double rounded = std::round(twice);
    if (!std::isfinite(j) || j < 0.0 || std::abs(twice - rounded) > 1e-9) {
        throw InputError("spin quantum number must be a non-negative multiple of 1/2, got " +
                         std::to_string(j));
    }
    return SpinQuantumNumber(static_cast<int>(rounded));
}

SpinState::SpinState(SpinQuantumNumber j, CVector amplitudes)
    : j_(j), amps_(std::move(amplitudes)) {
    if (amps_.size() != j_.dim()) {
        throw InputError("spin state of j=" + std::to_string(j_.value()) + " needs " +
                         std::to_string(j_.dim()) + " amplitudes, got " +
                         std::to_string(amps_.size()));
    }
    if (std::abs(amps_.norm() - 1.0) > 1e-12) {
        throw InputError("spin state is not normalized (norm " + std::to_string(amps_.norm()) +
                         ")");
    }
}

HermitianOperator::HermitianOperator(CMatrix matrix, Subsystem tag)
    : m_(std::move(matrix)), tag_(tag) {
    if (m_.rows() != m_.cols()) throw InputError("Hermitian operator must be square");
    const CMatrix adj = m_.adjoint();
    const double scale = std::max(1.0, max_abs(m_));
    if (max_abs(m_ - adj) > 1e-12 * scale) {
        throw InputError("matrix is not Hermitian (deviation " +
                         std::to_string(max_abs(m_ - adj)) + ")");
    }
    m_ = 0.5 * (m_ + adj);
}

UnitaryOperator::UnitaryOperator(CMatrix matrix, Subsystem tag)
    : m_(std::move(matrix)), tag_(tag) {
    if (m_.rows() != m_.cols()) throw InputError("unitary operator must be square");
    const CMatrix gram = m_.adjoint() * m_;
    const double dev = max_abs(gram - CMatrix::Identity(m_.rows(), m_.cols()));
    if (dev > 1e-10) {
        throw InputError("matrix is not unitary (deviation " + std::to_string(dev) + ")");
    }
}

AngularMomentum angular_momentum_ops(SpinQuantumNumber j) {
    const int d = j.dim();
    CMatrix raise = CMatrix::Zero(d, d);
    CMatrix jz = CMatrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const double m = j.m_at(k);
        jz(k, k) = m;
        if (k > 0) raise(k - 1, k) = std::sqrt(j.casimir() - m * (m + 1.0));
    }
    const CMatrix lower = raise.adjoint();
    const Complex two_i(0.0, 2.0);
    return AngularMomentum{j,
                           HermitianOperator(0.5 * (raise + lower)),
                           HermitianOperator((raise - lower) / two_i),
                           HermitianOperator(jz)};
}

HermitianOperator j_along(const AngularMomentum& ops, const Vec3& n) {
    require_unit(n, "j_along");
    return HermitianOperator(n.x() * ops.x.matrix() + n.y() * ops.y.matrix() +
                             n.z() * ops.z.matrix());
}

std::pair<double, double> polar_angles(const Vec3& n) {
    require_unit(n, "polar_angles");
    const Vec3 u = n.normalized();
    const double theta = std::acos(std::clamp(u.z(), -1.0, 1.0));
    double phi = std::atan2(u.y(), u.x());
    if (phi >= kPi) phi = -kPi;
    return {theta, phi};
}

Vec3 direction(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

SpinState scs(SpinQuantumNumber j, double theta, double phi) {
    if (!(theta >= 0.0 && theta <= kPi)) {
        throw InputError("scs: polar angle must lie in [0, pi], got " + std::to_string(theta));
    }
    if (!(phi >= -kPi && phi < kPi)) {
        throw InputError("scs: azimuth must lie in [-pi, pi), got " + std::to_string(phi));
    }
    const int d = j.dim();
    const int n = j.twice();
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const double log_norm = std::lgamma(n + 1.0);
    CVector amps(d);
    for (int k = 0; k < d; ++k) {
        // k = j - m, so j + m = n - k.
        const int up = n - k;
        const int down = k;
        if ((up > 0 && c == 0.0) || (down > 0 && s == 0.0)) {
            amps(k) = 0.0;
            continue;
        }
        double log_mag = 0.5 * (log_norm - std::lgamma(up + 1.0) - std::lgamma(down + 1.0));
        if (up > 0) log_mag += up * std::log(c);
        if (down > 0) log_mag += down * std::log(s);
        amps(k) = std::polar(std::exp(log_mag), down * phi);
    }
    amps /= amps.norm();
    return SpinState(j, std::move(amps));
}

SpinState scs(SpinQuantumNumber j, const Vec3& n) {
    const auto [theta, phi] = polar_angles(n);
    return scs(j, theta, phi);
}

SpinState rotated_basis_state(SpinQuantumNumber j, const Vec3& n, double m) {
    const double k_real = j.value() - m;
    const int k = static_cast<int>(std::lround(k_real));
    if (std::abs(k_real - k) > 1e-9 || k < 0 || k >= j.dim()) {
        throw InputError("magnetic quantum number " + std::to_string(m) +
                         " is not valid for j=" + std::to_string(j.value()));
    }
    const auto [theta, phi] = polar_angles(n);
    const auto tilt = rotation_operator(j, Vec3::UnitY(), theta, RotationSense::active);
    CVector amps = tilt.matrix().col(k);
    for (int q = 0; q < j.dim(); ++q) amps(q) *= std::polar(1.0, q * phi);
    amps /= amps.norm();
    return SpinState(j, std::move(amps));
}

std::pair<Eigen::VectorXd, CMatrix> eigensystem(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) throw DomainError("eigendecomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

UnitaryOperator rotation_operator(SpinQuantumNumber j, const Vec3& n, double angle,
                                  RotationSense sense) {
    const auto ops = angular_momentum_ops(j);
    const auto [values, vectors] = eigensystem(j_along(ops, n));
    const double sign = sense == RotationSense::passive ? 1.0 : -1.0;
    CVector phases(values.size());
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        phases(k) = std::polar(1.0, sign * angle * values(k));
    }
    return UnitaryOperator(vectors * phases.asDiagonal() * vectors.adjoint());
}

ScalarFunction ScalarFunction::identity() { return {[](double x) { return x; }}; }

ScalarFunction ScalarFunction::arccos() {
    return {[](double x) { return std::acos(x); }, -1.0, 1.0, false};
}

ScalarFunction ScalarFunction::arccos_saturating() {
    auto f = arccos();
    f.saturate = true;
    return f;
}

ScalarFunction ScalarFunction::cos() { return {[](double x) { return std::cos(x); }}; }

ScalarFunction ScalarFunction::square() { return {[](double x) { return x * x; }}; }

ScalarFunction ScalarFunction::scaled_arctan(double scale) {
    return {[scale](double x) { return 2.0 / kPi * std::atan(scale * x); }};
}

ScalarFunction ScalarFunction::power(double p) {
    return {[p](double x) { return std::pow(x, p); }, 0.0,
            std::numeric_limits<double>::infinity(), false};
}

HermitianOperator operator_function(const HermitianOperator& h, const ScalarFunction& f) {
    auto [values, vectors] = eigensystem(h);
    Eigen::VectorXd mapped(values.size());
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        double x = values(k);
        const bool outside = x < f.lower - ScalarFunction::clamp_tolerance ||
                             x > f.upper + ScalarFunction::clamp_tolerance;
        if (outside && !f.saturate) {
            throw DomainError("operator_function: eigenvalue " + std::to_string(x) +
                              " outside [" + std::to_string(f.lower) + ", " +
                              std::to_string(f.upper) + "]");
        }
        x = std::clamp(x, f.lower, f.upper);
        mapped(k) = f.f(x);
        if (!std::isfinite(mapped(k))) {
            throw DomainError("operator_function: non-finite value at eigenvalue " +
                              std::to_string(x));
        }
    }
    return HermitianOperator(vectors * mapped.cast<Complex>().asDiagonal() * vectors.adjoint(),
                             h.tag());
}

HermitianOperator cosine_operator(SpinQuantumNumber j, const Vec3& l) {
    const auto ops = angular_momentum_ops(j);
    return HermitianOperator(j_along(ops, l).matrix() / std::sqrt(j.casimir()));
}

void apply_on_subsystem_inplace(CVector& state, const CMatrix& op, std::size_t slot,
                                std::span<const int> dims) {
    if (slot >= dims.size()) throw InputError("apply_on_subsystem: slot out of range");
    const Eigen::Index total =
        std::accumulate(dims.begin(), dims.end(), Eigen::Index{1}, std::multiplies<>{});
    if (total != state.size()) {
        throw InputError("apply_on_subsystem: state length " + std::to_string(state.size()) +
                         " does not match product of dims " + std::to_string(total));
    }
    const Eigen::Index d = dims[slot];
    if (op.rows() != d || op.cols() != d) {
        throw InputError("apply_on_subsystem: operator dimension " +
                         std::to_string(op.rows()) + " does not match slot dimension " +
                         std::to_string(d));
    }
    const Eigen::Index inner = std::accumulate(dims.begin() + slot + 1, dims.end(),
                                               Eigen::Index{1}, std::multiplies<>{});
    const Eigen::Index outer = total / (d * inner);
    const CMatrix op_t = op.transpose();
    for (Eigen::Index o = 0; o < outer; ++o) {
        // Column-major inner x d view: element (i, k) sits at ((o d + k) inner + i).
        Eigen::Map<CMatrix> block(state.data() + o * d * inner, inner, d);
        block = (block * op_t).eval();
    }
}

CVector apply_on_subsystem(const CVector& state, const CMatrix& op, std::size_t slot,
                           std::span<const int> dims) {
    CVector out = state;
    apply_on_subsystem_inplace(out, op, slot, dims);
    return out;
}

double expectation(const HermitianOperator& h, const CVector& psi) {
    return psi.dot(h.matrix() * psi).real();
}

CMatrix reduce_to_last(const CVector& joint, Eigen::Index last_dim) {
    if (last_dim <= 0 || joint.size() % last_dim != 0) {
        throw InputError("reduce_to_last: state length is not a multiple of the last dimension");
    }
    const Eigen::Map<const CMatrix> t(joint.data(), last_dim, joint.size() / last_dim);
    return t * t.adjoint();
}

}  // namespace spinqrf
