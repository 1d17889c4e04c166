#pragma once

#include <array>

#include <Eigen/Dense>

namespace spinqrf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Three orthonormal axes f1, f2, f3 described in the current canonical frame.
/// Construction rejects anything that is not orthonormal within 1e-9; there is
/// no re-orthogonalization.
class Frame {
public:
    Frame(const Vec3& f1, const Vec3& f2, const Vec3& f3);

    static Frame canonical();
    /// Frame whose axes are the rows of m.
    static Frame from_rows(const Mat3& m);
    /// Frame whose axes are the columns of m.
    static Frame from_columns(const Mat3& m);

    const Vec3& axis(int i) const { return axes_[static_cast<std::size_t>(i)]; }
    const Vec3& f1() const { return axes_[0]; }
    const Vec3& f2() const { return axes_[1]; }
    const Vec3& f3() const { return axes_[2]; }

    /// +1 for right-handed, -1 for left-handed.
    int chirality() const noexcept { return chirality_; }

    /// Largest componentwise difference between corresponding axes.
    double distance(const Frame& other) const;

private:
    std::array<Vec3, 3> axes_;
    int chirality_;
};

/// zxz Euler angles: alpha in [-pi, pi), beta in [0, pi], gamma in [-pi, pi).
struct EulerAngles {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;

    bool in_range() const;
};

/// Orthogonal 3x3 matrix with determinant +1 or -1.
class RotationMatrix {
public:
    explicit RotationMatrix(const Mat3& m);

    const Mat3& matrix() const noexcept { return m_; }
    int determinant_sign() const noexcept { return det_sign_; }
    bool proper() const noexcept { return det_sign_ > 0; }

    Vec3 operator*(const Vec3& v) const { return m_ * v; }

private:
    Mat3 m_;
    int det_sign_;
};

/// Gimbal lock when 1 - (f3.e3)^2 <= kGimbalThreshold.
inline constexpr double kGimbalThreshold = 1e-10;

/// sign with sign(0) = -1.
double sign_zero_negative(double x);

/// Wraps an angle into [-pi, pi).
double wrap_angle(double x);

/// Rows are f1, f2, f3, so M f_i = e_i.
RotationMatrix matrix_from_frames(const Frame& frame);

bool is_gimbal_locked(const Frame& frame);

/// Euler angles from the matrix entries; gimbal-locked frames are routed to
/// gimbal_euler. Valid for both chiralities.
EulerAngles euler_from_frame(const Frame& frame);

/// alpha = 0, beta = (1 - c) pi/2, gamma = sign[c (f1.e2)] arccos[c (f2.e2)], c = f3.e3.
EulerAngles gimbal_euler(const Frame& frame);

/// Rz(gamma) Rx(beta) Rz(alpha), with Rz(a) = [[cos a, sin a, 0], [-sin a, cos a, 0], [0, 0, 1]].
RotationMatrix compose_proper(const EulerAngles& e);

/// Rz(gamma) diag(-1, Rx(beta) block) Rz(alpha); determinant -1.
RotationMatrix compose_improper(const EulerAngles& e);

/// compose_proper for chirality +1, compose_improper for -1.
RotationMatrix compose(const EulerAngles& e, int chirality);

/// Active right-handed rotation by angle about a unit axis (Rodrigues).
Mat3 axis_rotation(const Vec3& axis, double angle);

}  // namespace spinqrf
