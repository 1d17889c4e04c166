#include "spinqrf/frames.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spinqrf/errors.hpp"

namespace spinqrf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFrameTolerance = 1e-9;

Mat3 rz(double a) {
    Mat3 m;
    m << std::cos(a), std::sin(a), 0.0, -std::sin(a), std::cos(a), 0.0, 0.0, 0.0, 1.0;
    return m;
}

Mat3 middle(double b, double reflection) {
    Mat3 m;
    m << reflection, 0.0, 0.0, 0.0, std::cos(b), std::sin(b), 0.0, -std::sin(b), std::cos(b);
    return m;
}

double safe_acos(double x) { return std::acos(std::clamp(x, -1.0, 1.0)); }

}  // namespace

Frame::Frame(const Vec3& f1, const Vec3& f2, const Vec3& f3) : axes_{f1, f2, f3} {
    for (int i = 0; i < 3; ++i) {
        const Vec3& a = axes_[static_cast<std::size_t>(i)];
        if (!a.allFinite() || std::abs(a.norm() - 1.0) > kFrameTolerance) {
            throw InputError("frame axis f" + std::to_string(i + 1) + " is not a unit vector");
        }
        for (int k = i + 1; k < 3; ++k) {
            if (std::abs(a.dot(axes_[static_cast<std::size_t>(k)])) > kFrameTolerance) {
                throw InputError("frame axes f" + std::to_string(i + 1) + " and f" +
                                 std::to_string(k + 1) + " are not orthogonal");
            }
        }
    }
    const double det = f1.dot(f2.cross(f3));
    if (std::abs(std::abs(det) - 1.0) > kFrameTolerance) {
        throw InputError("frame determinant " + std::to_string(det) + " is not +-1");
    }
    chirality_ = det > 0.0 ? 1 : -1;
}

Frame Frame::canonical() { return Frame(Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()); }

Frame Frame::from_rows(const Mat3& m) {
    return Frame(m.row(0).transpose(), m.row(1).transpose(), m.row(2).transpose());
}

Frame Frame::from_columns(const Mat3& m) { return Frame(m.col(0), m.col(1), m.col(2)); }

double Frame::distance(const Frame& other) const {
    double d = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        d = std::max(d, (axes_[i] - other.axes_[i]).cwiseAbs().maxCoeff());
    }
    return d;
}

bool EulerAngles::in_range() const {
    return alpha >= -kPi && alpha < kPi && beta >= 0.0 && beta <= kPi && gamma >= -kPi &&
           gamma < kPi;
}

RotationMatrix::RotationMatrix(const Mat3& m) : m_(m) {
    const double dev = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (!(dev <= 1e-10)) {
        throw InputError("matrix is not orthogonal (deviation " + std::to_string(dev) + ")");
    }
    det_sign_ = m.determinant() > 0.0 ? 1 : -1;
}

double sign_zero_negative(double x) { return x > 0.0 ? 1.0 : -1.0; }

double wrap_angle(double x) {
    double y = std::remainder(x, 2.0 * kPi);
    if (y >= kPi) y -= 2.0 * kPi;
    if (y < -kPi) y += 2.0 * kPi;
    return y + 0.0;
}

RotationMatrix matrix_from_frames(const Frame& frame) {
    Mat3 m;
    m.row(0) = frame.f1().transpose();
    m.row(1) = frame.f2().transpose();
    m.row(2) = frame.f3().transpose();
    return RotationMatrix(m);
}

bool is_gimbal_locked(const Frame& frame) {
    const double c = frame.f3().z();
    return 1.0 - c * c <= kGimbalThreshold;
}

EulerAngles euler_from_frame(const Frame& frame) {
    if (is_gimbal_locked(frame)) return gimbal_euler(frame);
    const Vec3& f1 = frame.f1();
    const Vec3& f2 = frame.f2();
    const Vec3& f3 = frame.f3();
    const double sin_beta = std::sqrt(1.0 - f3.z() * f3.z());
    EulerAngles e;
    e.alpha = wrap_angle(sign_zero_negative(f3.x()) * safe_acos(-f3.y() / sin_beta));
    e.beta = safe_acos(f3.z());
    e.gamma = wrap_angle(sign_zero_negative(f1.z()) * safe_acos(f2.z() / sin_beta));
    return e;
}

EulerAngles gimbal_euler(const Frame& frame) {
    const double c = frame.f3().z();
    EulerAngles e;
    e.alpha = 0.0;
    e.beta = std::clamp((1.0 - c) * kPi / 2.0, 0.0, kPi);
    e.gamma = wrap_angle(sign_zero_negative(c * frame.f1().y()) * safe_acos(c * frame.f2().y()));
    return e;
}

RotationMatrix compose_proper(const EulerAngles& e) {
    return RotationMatrix(rz(e.gamma) * middle(e.beta, 1.0) * rz(e.alpha));
}

RotationMatrix compose_improper(const EulerAngles& e) {
    return RotationMatrix(rz(e.gamma) * middle(e.beta, -1.0) * rz(e.alpha));
}

RotationMatrix compose(const EulerAngles& e, int chirality) {
    return chirality > 0 ? compose_proper(e) : compose_improper(e);
}

Mat3 axis_rotation(const Vec3& axis, double angle) {
    if (std::abs(axis.norm() - 1.0) > kFrameTolerance) {
        throw InputError("rotation axis is not a unit vector");
    }
    return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

}  // namespace spinqrf
