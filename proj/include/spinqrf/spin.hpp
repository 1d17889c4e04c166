#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace spinqrf {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Vec3 = Eigen::Vector3d;

inline constexpr double kUnitTolerance = 1e-9;

/// Spin quantum number stored as 2j so half-integers are exact.
class SpinQuantumNumber {
public:
    explicit SpinQuantumNumber(int twice_j);

    /// Accepts j as a decimal (0.5, 1, 7.5); 2j must be a non-negative integer.
    static SpinQuantumNumber from_value(double j);

    int twice() const noexcept { return twice_j_; }
    double value() const noexcept { return 0.5 * twice_j_; }
    int dim() const noexcept { return twice_j_ + 1; }

    /// Magnetic quantum number at basis index k (descending: k = 0 is m = j).
    double m_at(int k) const noexcept { return value() - k; }

    /// j(j+1), the Casimir eigenvalue.
    double casimir() const noexcept { return value() * (value() + 1.0); }

    friend bool operator==(SpinQuantumNumber a, SpinQuantumNumber b) = default;

private:
    int twice_j_;
};

/// Tensor slot(s) an operator acts on, as a bit set.
enum class Subsystem : unsigned { none = 0, a1 = 1, a2 = 2, a3 = 4, b = 8 };

constexpr Subsystem operator|(Subsystem x, Subsystem y) {
    return static_cast<Subsystem>(static_cast<unsigned>(x) | static_cast<unsigned>(y));
}

/// Normalized amplitude vector over |j, m>, m = j, j-1, ..., -j.
class SpinState {
public:
    SpinState(SpinQuantumNumber j, CVector amplitudes);

    SpinQuantumNumber spin() const noexcept { return j_; }
    const CVector& amplitudes() const noexcept { return amps_; }
    Complex amplitude(int k) const { return amps_(k); }
    int dim() const noexcept { return j_.dim(); }

private:
    SpinQuantumNumber j_;
    CVector amps_;
};

class HermitianOperator {
public:
    /// Throws InputError unless the matrix is square and Hermitian within 1e-12
    /// (relative to its largest entry when that exceeds one). The stored matrix
    /// is the exact Hermitian part.
    explicit HermitianOperator(CMatrix matrix, Subsystem tag = Subsystem::none);

    const CMatrix& matrix() const noexcept { return m_; }
    Subsystem tag() const noexcept { return tag_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }

private:
    CMatrix m_;
    Subsystem tag_;
};

class UnitaryOperator {
public:
    /// Throws InputError unless U^dagger U = 1 within 1e-10.
    explicit UnitaryOperator(CMatrix matrix, Subsystem tag = Subsystem::none);

    const CMatrix& matrix() const noexcept { return m_; }
    Subsystem tag() const noexcept { return tag_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }

private:
    CMatrix m_;
    Subsystem tag_;
};

struct AngularMomentum {
    SpinQuantumNumber j;
    HermitianOperator x;
    HermitianOperator y;
    HermitianOperator z;
};

/// Ladder-operator construction in the descending-m z basis, hbar = 1.
AngularMomentum angular_momentum_ops(SpinQuantumNumber j);

/// n_x Jx + n_y Jy + n_z Jz. Throws InputError if |n| differs from 1 by more than 1e-9.
HermitianOperator j_along(const AngularMomentum& ops, const Vec3& n);

/// Polar angle in [0, pi] and azimuth in [-pi, pi) of a unit vector.
std::pair<double, double> polar_angles(const Vec3& n);

Vec3 direction(double theta, double phi);

/// Spin coherent state
///   sum_m sqrt(C(2j, j+m)) cos(theta/2)^(j+m) sin(theta/2)^(j-m) e^{i(j-m)phi} |j, m>
/// evaluated in log space. Requires theta in [0, pi] and phi in [-pi, pi).
SpinState scs(SpinQuantumNumber j, double theta, double phi);

/// Coherent state along a unit direction.
SpinState scs(SpinQuantumNumber j, const Vec3& n);

/// Eigenstate of j_along(n) with eigenvalue m, phase-fixed as
/// e^{-i phi (Jz - j)} e^{-i theta Jy} |j, m>. For m = j this is scs(j, n).
SpinState rotated_basis_state(SpinQuantumNumber j, const Vec3& n, double m);

enum class RotationSense { passive, active };

/// exp(+i angle n.J) for passive, exp(-i angle n.J) for active.
UnitaryOperator rotation_operator(SpinQuantumNumber j, const Vec3& n, double angle,
                                  RotationSense sense);

/// Real function with a closed domain. Eigenvalues within clamp_tolerance of the
/// domain are clamped onto it; further out is a DomainError unless saturate is set,
/// in which case everything is clamped.
struct ScalarFunction {
    std::function<double(double)> f;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    bool saturate = false;

    static constexpr double clamp_tolerance = 1e-9;

    static ScalarFunction identity();
    static ScalarFunction arccos();
    static ScalarFunction arccos_saturating();
    static ScalarFunction cos();
    static ScalarFunction square();
    /// (2/pi) arctan(scale x)
    static ScalarFunction scaled_arctan(double scale);
    /// x^p on [0, inf)
    static ScalarFunction power(double p);
};

HermitianOperator operator_function(const HermitianOperator& h, const ScalarFunction& f);

/// Hermitian eigendecomposition as (eigenvalues ascending, eigenvectors).
std::pair<Eigen::VectorXd, CMatrix> eigensystem(const HermitianOperator& h);

/// j_along(l) / sqrt(j(j+1)).
HermitianOperator cosine_operator(SpinQuantumNumber j, const Vec3& l);

/// (1 x ... x op x ... x 1) state, with slot 0 the most significant tensor factor.
/// Strided contraction; the full operator is never formed.
CVector apply_on_subsystem(const CVector& state, const CMatrix& op, std::size_t slot,
                           std::span<const int> dims);

void apply_on_subsystem_inplace(CVector& state, const CMatrix& op, std::size_t slot,
                                std::span<const int> dims);

/// <psi| H |psi>
double expectation(const HermitianOperator& h, const CVector& psi);

/// Reduced density matrix of the last tensor factor (dimension last_dim).
CMatrix reduce_to_last(const CVector& joint, Eigen::Index last_dim);

}  // namespace spinqrf
