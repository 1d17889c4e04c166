#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace spinqrf {

/// SplitMix64: 64-bit state, increment 0x9e3779b97f4a7c15, Stafford mix 13.
/// Every derived variate below uses only this stream and libm, so a seed
/// fixes the whole trial sequence.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t operator()() { return next(); }
    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

    /// Uniform on [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Box-Muller, one variate per call (no cached second value).
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform on the unit sphere (Archimedes: z uniform, azimuth uniform).
    Eigen::Vector3d unit_vector() {
        const double z = uniform(-1.0, 1.0);
        const double phi = uniform(0.0, 2.0 * std::numbers::pi);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }

    /// Haar-uniform rotation matrix (Shoemake's unit quaternion).
    Eigen::Matrix3d rotation() {
        const double u1 = uniform(), u2 = uniform(), u3 = uniform();
        const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
        const double t2 = 2.0 * std::numbers::pi * u2, t3 = 2.0 * std::numbers::pi * u3;
        const Eigen::Quaterniond q(b * std::cos(t3), a * std::sin(t2), a * std::cos(t2),
                                   b * std::sin(t3));
        return q.normalized().toRotationMatrix();
    }

private:
    std::uint64_t state_;
};

}  // namespace spinqrf
