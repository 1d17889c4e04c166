#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "spinqrf/errors.hpp"
#include "spinqrf/qrf.hpp"
#include "spinqrf/random.hpp"

using namespace spinqrf;

namespace {

constexpr double kPi = std::numbers::pi;
const SpinQuantumNumber kHalf(1);

SpinQuantumNumber spin(double j) { return SpinQuantumNumber::from_value(j); }

Frame swapped_frame() { return Frame(Vec3::UnitX(), Vec3::UnitZ(), Vec3::UnitY()); }
Frame test_frame() { return Frame(Vec3::UnitX(), Vec3::UnitZ(), -Vec3::UnitY()); }

BranchState single(const Frame& f, SystemB b) {
    BranchState s;
    s.branches.push_back(Branch{1.0, f, std::move(b)});
    return s;
}

CVector random_vector(SplitMix64& rng, Eigen::Index n) {
    CVector v(n);
    for (Eigen::Index k = 0; k < n; ++k) v(k) = {rng.normal(), rng.normal()};
    return v.normalized();
}

Vec3 k1_closed(double a, double b, double g) {
    return {std::cos(a) * std::cos(g) - std::sin(a) * std::cos(b) * std::sin(g),
            -std::cos(a) * std::sin(g) - std::sin(a) * std::cos(b) * std::cos(g),
            std::sin(a) * std::sin(b)};
}

Vec3 k2_closed(double a, double b, double g) {
    return {std::sin(a) * std::cos(g) + std::cos(a) * std::cos(b) * std::sin(g),
            -std::sin(a) * std::sin(g) + std::cos(a) * std::cos(b) * std::cos(g),
            -std::cos(a) * std::sin(b)};
}

Vec3 k3_closed(double b, double g) {
    return {std::sin(b) * std::sin(g), std::sin(b) * std::cos(g), std::cos(b)};
}

Vec3 n_prime_closed(double a, double b, double g, double th, double ph) {
    const double c2 = std::pow(std::cos(b / 2), 2), s2 = std::pow(std::sin(b / 2), 2);
    return {std::sin(b) * std::sin(g) * std::cos(th) +
                std::sin(th) * (std::cos(a + g - ph) * c2 + std::cos(a - g - ph) * s2),
            std::sin(b) * std::cos(g) * std::cos(th) -
                std::sin(th) * (std::sin(a + g - ph) * c2 - std::sin(a - g - ph) * s2),
            std::cos(b) * std::cos(th) + std::sin(th) * std::sin(a - ph) * std::sin(b)};
}

/// Dense exp(i A x J) with A on the frame factors and J on B.
CMatrix dense_exponential(const CMatrix& a, const CMatrix& jb) {
    const CMatrix gen = Eigen::kroneckerProduct(a, jb).eval();
    return (Complex(0, 1) * gen).exp();
}

CMatrix embed_a3(const CMatrix& op, int d) {
    const CMatrix id = CMatrix::Identity(d * d, d * d);
    return Eigen::kroneckerProduct(id, op).eval();
}

}  // namespace

TEST(SystemB, LabelValidation) {
    EXPECT_THROW(SystemB::label(Vec3(1, 1, 0), 0.5, kHalf), InputError);
    EXPECT_THROW(SystemB::label(Vec3::UnitZ(), 1.5, kHalf), InputError);
    EXPECT_THROW(SystemB::label(Vec3::UnitZ(), 0.0, kHalf), InputError);
    EXPECT_NO_THROW(SystemB::label(Vec3::UnitZ(), -0.5, kHalf));
}

TEST(BranchTransform, ExampleAClosedForms) {
    SplitMix64 rng(31);
    for (int t = 0; t < 100; ++t) {
        const double a = rng.uniform(-kPi, kPi), b = rng.uniform(0.0, kPi),
                     g = rng.uniform(-kPi, kPi);
        const double th = rng.uniform(0.0, kPi), ph = rng.uniform(-kPi, kPi);
        const Frame f = Frame::from_rows(compose_proper(EulerAngles{a, b, g}).matrix());
        const auto out = branch_transform(single(f, SystemB::label(direction(th, ph), 0.5, kHalf)));
        ASSERT_EQ(out.branches.size(), 1u);
        const auto& br = out.branches[0];
        EXPECT_LT((br.frame.f1() - k1_closed(a, b, g)).norm(), 1e-10);
        EXPECT_LT((br.frame.f2() - k2_closed(a, b, g)).norm(), 1e-10);
        EXPECT_LT((br.frame.f3() - k3_closed(b, g)).norm(), 1e-10);
        EXPECT_LT((br.system.as_label().n - n_prime_closed(a, b, g, th, ph)).norm(), 1e-10);
        EXPECT_EQ(br.system.as_label().m, 0.5);
        EXPECT_EQ(out.perspective, "A");
        EXPECT_EQ(out.described, "C");
    }
}

TEST(BranchTransform, ExampleAClosedFormAgreesWithMatrixProduct) {
    SplitMix64 rng(32);
    for (int t = 0; t < 100; ++t) {
        const double a = rng.uniform(-kPi, kPi), b = rng.uniform(0.0, kPi),
                     g = rng.uniform(-kPi, kPi);
        const double th = rng.uniform(0.0, kPi), ph = rng.uniform(-kPi, kPi);
        const Mat3 m = compose_proper(EulerAngles{a, b, g}).matrix();
        EXPECT_LT((m * direction(th, ph) - n_prime_closed(a, b, g, th, ph)).norm(), 1e-12);
    }
}

TEST(BranchTransform, ExampleBEntanglesB) {
    SplitMix64 rng(33);
    for (int t = 0; t < 50; ++t) {
        const double th = rng.uniform(0.05, kPi - 0.05), ph = rng.uniform(-kPi, kPi);
        const double big_phi = rng.uniform(-kPi, kPi);
        const Vec3 n = direction(th, ph);
        const double r = 1.0 / std::sqrt(2.0);
        BranchState in;
        in.branches.push_back(Branch{r, Frame::canonical(), SystemB::label(n, 0.5, kHalf)});
        in.branches.push_back(
            Branch{std::polar(r, big_phi), swapped_frame(), SystemB::label(n, 0.5, kHalf)});

        const auto out = branch_transform(in);
        ASSERT_EQ(out.branches.size(), 2u);
        EXPECT_LT(out.branches[0].frame.distance(Frame::canonical()), 1e-12);
        EXPECT_LT(out.branches[1].frame.distance(swapped_frame()), 1e-12);
        const Vec3 n1(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
        const Vec3 n2(std::sin(th) * std::cos(ph), std::cos(th), std::sin(th) * std::sin(ph));
        EXPECT_LT((out.branches[0].system.as_label().n - n1).norm(), 1e-12);
        EXPECT_LT((out.branches[1].system.as_label().n - n2).norm(), 1e-12);
        EXPECT_LT(std::abs(out.branches[1].amplitude - std::polar(r, big_phi)), 1e-15);
        EXPECT_LT(std::abs(out.branches[0].amplitude - r), 1e-15);

        EXPECT_LT(entanglement_diagnostic(in), 1e-12);
        EXPECT_GT(entanglement_diagnostic(out), 1e-6);
    }
}

TEST(BranchTransform, ExampleBSecondBranchAngles) {
    const auto e = euler_from_frame(swapped_frame());
    EXPECT_DOUBLE_EQ(e.alpha, -kPi);
    EXPECT_DOUBLE_EQ(e.beta, kPi / 2);
    EXPECT_DOUBLE_EQ(e.gamma, 0.0);
}

TEST(BranchTransform, ExampleCFactorizesB) {
    const double r = 1.0 / std::sqrt(2.0);
    BranchState in;
    in.branches.push_back(
        Branch{r, Frame::canonical(), SystemB::label(Vec3::UnitZ(), 0.5, kHalf)});
    in.branches.push_back(
        Branch{std::polar(r, 0.9), swapped_frame(), SystemB::label(Vec3::UnitY(), 0.5, kHalf)});
    const auto out = branch_transform(in);
    ASSERT_EQ(out.branches.size(), 2u);
    for (const auto& b : out.branches) {
        EXPECT_LT((b.system.as_label().n - Vec3::UnitZ()).norm(), 1e-12);
    }
    EXPECT_GT(entanglement_diagnostic(in), 0.5);
    EXPECT_LT(entanglement_diagnostic(out), 1e-12);
}

TEST(BranchTransform, InvolutionForProperBranches) {
    SplitMix64 rng(34);
    for (int t = 0; t < 100; ++t) {
        const Frame f = Frame::from_rows(rng.rotation());
        const Vec3 n = rng.unit_vector();
        const auto twice = branch_transform(branch_transform(single(f, SystemB::label(n, 0.5, kHalf))));
        EXPECT_LT(twice.branches[0].frame.distance(f), 1e-10);
        EXPECT_LT((twice.branches[0].system.as_label().n - n).norm(), 1e-10);
        EXPECT_EQ(twice.perspective, "C");
    }
}

TEST(BranchTransform, StepByStepChain) {
    SplitMix64 rng(35);
    for (int t = 0; t < 50; ++t) {
        const Frame f = Frame::from_rows(rng.rotation());
        const SpinState b(spin(1.5), random_vector(rng, 4));
        const auto out = branch_transform(single(f, SystemB::vector(b)));

        const auto e = euler_from_frame(f);
        const auto m = compose_proper(e);
        const CVector expected = passive_euler_unitary(spin(1.5), e).matrix() * b.amplitudes();
        EXPECT_LT((out.branches[0].system.as_vector().amplitudes() - expected).norm(), 1e-12);
        EXPECT_LT(out.branches[0].frame.distance(Frame::from_columns(m.matrix())), 1e-12);
    }
}

TEST(BranchTransform, VectorAndLabelFormsAgree) {
    SplitMix64 rng(36);
    for (int t = 0; t < 50; ++t) {
        const Frame f = Frame::from_rows(rng.rotation());
        const Vec3 n = rng.unit_vector();
        const auto s = spin(1);
        const double m = -1.0 + static_cast<double>(t % 3);
        const auto label = branch_transform(single(f, SystemB::label(n, m, s)));
        const auto vec =
            branch_transform(single(f, SystemB::vector(rotated_basis_state(s, n, m))));
        const Complex overlap = label.branches[0].system.to_vector().amplitudes().dot(
            vec.branches[0].system.as_vector().amplitudes());
        EXPECT_NEAR(std::abs(overlap), 1.0, 1e-10);
    }
}

TEST(BranchTransform, RejectsVectorFormUnderReflection) {
    const auto state = single(swapped_frame(), SystemB::vector(scs(kHalf, 0.3, 0.2)));
    EXPECT_THROW(branch_transform(state), UnsupportedError);
}

TEST(BranchTransform, LinearOverBranches) {
    SplitMix64 rng(37);
    BranchState whole;
    std::vector<BranchState> parts;
    for (int k = 0; k < 3; ++k) {
        const Frame f = k == 2 ? swapped_frame() : Frame::from_rows(rng.rotation());
        const Complex amp(rng.normal(), rng.normal());
        Branch b{amp, f, SystemB::label(rng.unit_vector(), 0.5, kHalf)};
        whole.branches.push_back(b);
        BranchState p;
        p.branches.push_back(b);
        parts.push_back(p);
    }
    const auto out = branch_transform(whole);
    ASSERT_EQ(out.branches.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
        const auto part = branch_transform(parts[k]);
        EXPECT_LT(out.branches[k].frame.distance(part.branches[0].frame), 1e-15);
        EXPECT_LT(out.branches[k].system.distance(part.branches[0].system), 1e-15);
        EXPECT_EQ(out.branches[k].amplitude, part.branches[0].amplitude);
    }
}

TEST(BranchTransform, MergesDuplicateBranches) {
    BranchState s;
    s.branches.push_back(Branch{0.5, Frame::canonical(), SystemB::label(Vec3::UnitZ(), 0.5, kHalf)});
    s.branches.push_back(Branch{0.5, Frame::canonical(), SystemB::label(Vec3::UnitZ(), 0.5, kHalf)});
    const auto merged = merge_duplicate_branches(s);
    ASSERT_EQ(merged.branches.size(), 1u);
    EXPECT_NEAR(merged.branches[0].amplitude.real(), 1.0, 1e-15);
}

TEST(BranchTransform, IdentityFrameLeavesBUnchanged) {
    const Vec3 n = Vec3(1, -2, 2).normalized();
    const auto out = branch_transform(single(Frame::canonical(), SystemB::label(n, 0.5, kHalf)));
    EXPECT_LT(out.branches[0].frame.distance(Frame::canonical()), 1e-15);
    EXPECT_LT((out.branches[0].system.as_label().n - n).norm(), 1e-15);
}

TEST(Idealized, NormAndEntropy) {
    const double r = 1.0 / std::sqrt(2.0);
    BranchState s;
    s.branches.push_back(Branch{r, Frame::canonical(), SystemB::label(Vec3::UnitZ(), 0.5, kHalf)});
    s.branches.push_back(Branch{r, swapped_frame(), SystemB::label(-Vec3::UnitZ(), 0.5, kHalf)});
    EXPECT_NEAR(idealized_norm_squared(s), 1.0, 1e-15);
    EXPECT_NEAR(entanglement_diagnostic(s), 1.0, 1e-12);

    BranchState same;
    same.branches.push_back(Branch{r, Frame::canonical(), SystemB::label(Vec3::UnitZ(), 0.5, kHalf)});
    same.branches.push_back(Branch{r, Frame::canonical(), SystemB::label(-Vec3::UnitZ(), 0.5, kHalf)});
    EXPECT_NEAR(idealized_norm_squared(same), 1.0, 1e-15);
    EXPECT_LT(entanglement_diagnostic(same), 1e-12);
}

TEST(Fidelity, PureAndMixedStates) {
    CMatrix mixed = 0.5 * CMatrix::Identity(2, 2);
    CVector up(2);
    up << 1, 0;
    const CMatrix pure = up * up.adjoint();
    EXPECT_NEAR(fidelity(pure, pure), 1.0, 1e-12);
    EXPECT_NEAR(fidelity(pure, mixed), 0.5, 1e-12);
    EXPECT_NEAR(von_neumann_entropy(mixed), 1.0, 1e-12);
    EXPECT_NEAR(von_neumann_entropy(pure), 0.0, 1e-12);
}

TEST(RealizeFiniteJ, SpinHalfCanonicalBranch) {
    const auto psi = realize_finite_j(
        single(Frame::canonical(), SystemB::label(Vec3::UnitZ(), 0.5, kHalf)), kHalf);
    const CVector expected = kron(kron(kron(scs(kHalf, Vec3::UnitX()).amplitudes(),
                                            scs(kHalf, Vec3::UnitY()).amplitudes()),
                                       scs(kHalf, Vec3::UnitZ()).amplitudes()),
                                  scs(kHalf, Vec3::UnitZ()).amplitudes());
    EXPECT_LT((psi - expected).norm(), 1e-14);
}

TEST(RealizeFiniteJ, DuplicatedBranchEqualsSingle) {
    const auto b = SystemB::label(Vec3(0, 0.6, 0.8), 0.5, kHalf);
    const double r = 1.0 / std::sqrt(2.0);
    BranchState twice;
    twice.branches.push_back(Branch{r, test_frame(), b});
    twice.branches.push_back(Branch{r, test_frame(), b});
    const auto j = spin(2);
    EXPECT_LT((realize_finite_j(twice, j) - realize_finite_j(single(test_frame(), b), j)).norm(),
              1e-13);
}

TEST(RealizeFiniteJ, ExampleBOverlapDecay) {
    const double r = 1.0 / std::sqrt(2.0);
    const Vec3 n = direction(0.7, 0.4);
    BranchState in;
    in.branches.push_back(Branch{r, Frame::canonical(), SystemB::label(n, 0.5, kHalf)});
    in.branches.push_back(Branch{std::polar(r, 0.9), swapped_frame(), SystemB::label(n, 0.5, kHalf)});
    const double norm = realize_finite_j_unnormalized(in, spin(5)).norm();
    EXPECT_NEAR(norm, 1.0, 1e-3);
    EXPECT_NEAR(realize_finite_j(in, spin(5)).norm(), 1.0, 1e-14);
}

TEST(EulerOperators, SpinHalfBeta) {
    const auto ops = euler_angle_operators(kHalf);
    const CMatrix beta = ops.beta().matrix();
    EXPECT_NEAR(beta(0, 0).real(), std::acos(1.0 / std::sqrt(3.0)), 1e-14);
    EXPECT_NEAR(beta(1, 1).real(), std::acos(-1.0 / std::sqrt(3.0)), 1e-14);
    EXPECT_NEAR(std::abs(beta(0, 1)), 0.0, 1e-15);
    EXPECT_NEAR(beta(0, 0).real(), 0.95531662, 1e-8);
    EXPECT_NEAR(beta(1, 1).real(), 2.18627604, 1e-8);
}

TEST(EulerOperators, HermitianForSmallSpins) {
    for (int tj = 1; tj <= 20; ++tj) {
        const auto ops = euler_angle_operators(SpinQuantumNumber(tj));
        const CMatrix& a = ops.alpha.matrix();
        EXPECT_LT((a - a.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_TRUE(a.allFinite());
        EXPECT_TRUE(ops.beta_values.allFinite());
        EXPECT_TRUE(ops.gamma_a1_values.allFinite());
        EXPECT_TRUE(ops.gamma_a23_values.allFinite());
        if (tj <= 6) {
            const CMatrix g = ops.gamma().matrix();
            EXPECT_LT((g - g.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
        }
    }
    EXPECT_THROW(euler_angle_operators(SpinQuantumNumber(0)), InputError);
}

TEST(EulerOperators, GammaFactorizesOnProductStates) {
    SplitMix64 rng(38);
    const auto j = spin(2);
    const auto ops = euler_angle_operators(j);
    const auto g1 = ops.gamma_factor_a1();
    const auto g23 = ops.gamma_factor_a23();
    const auto g = ops.gamma();
    for (int t = 0; t < 20; ++t) {
        const CVector a1 = scs(j, rng.unit_vector()).amplitudes();
        const CVector a2 = scs(j, rng.unit_vector()).amplitudes();
        const CVector a3 = scs(j, rng.unit_vector()).amplitudes();
        const CVector a23 = kron(a2, a3);
        const double joint = expectation(g, kron(a1, a23));
        EXPECT_NEAR(joint, expectation(g1, a1) * expectation(g23, a23), 1e-12);
    }
}

TEST(UTransform, ZeroOperatorsAreIdentity) {
    SplitMix64 rng(39);
    const auto j = spin(1.5);
    const auto s = spin(1);
    const CVector psi = random_vector(rng, 64 * 3);
    const auto out = u_transform_finite_j(psi, EulerAngleOperators::zero(j), s);
    EXPECT_LT((out - psi).norm(), 1e-13);
}

TEST(UTransform, RejectsWrongLength) {
    const auto ops = euler_angle_operators(spin(1));
    EXPECT_THROW(u_transform_finite_j(CVector::Ones(27), ops, kHalf), InputError);
}

TEST(UTransform, MatchesDenseMatrixExponential) {
    SplitMix64 rng(40);
    for (int tj : {1, 2, 3}) {
        const auto j = SpinQuantumNumber(tj);
        const int d = j.dim();
        const auto ops = euler_angle_operators(j);
        const auto jb = angular_momentum_ops(kHalf);

        const CMatrix u_alpha = dense_exponential(embed_a3(ops.alpha.matrix(), d), jb.z.matrix());
        const CMatrix u_beta = dense_exponential(embed_a3(ops.beta().matrix(), d), jb.x.matrix());
        const CMatrix u_gamma = dense_exponential(ops.gamma().matrix(), jb.z.matrix());
        const CMatrix u = u_gamma * u_beta * u_alpha;

        for (int t = 0; t < 5; ++t) {
            const CVector psi = random_vector(rng, d * d * d * 2);
            EXPECT_LT((u_transform_finite_j(psi, ops, kHalf) - u * psi).norm(), 1e-10)
                << "j=" << j.value();
        }
    }
}

TEST(UTransform, PreservesNormAtSpinTwo) {
    SplitMix64 rng(41);
    const auto j = spin(2);
    const auto ops = euler_angle_operators(j);
    const auto n = static_cast<Eigen::Index>(125 * 2);
    for (int t = 0; t < 50; ++t) {
        const CVector psi = random_vector(rng, n);
        EXPECT_NEAR(u_transform_finite_j(psi, ops, kHalf).norm(), 1.0, 1e-10);
    }
    CMatrix u(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        u.col(k) = u_transform_finite_j(CVector::Unit(n, k), ops, kHalf);
    }
    EXPECT_LT((u.adjoint() * u - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
}

namespace {

double finite_j_fidelity(SpinQuantumNumber j) {
    const auto state = single(test_frame(), SystemB::label(Vec3::UnitZ(), 0.5, kHalf));
    const CVector moved = u_transform_finite_j(realize_finite_j(state, j), euler_angle_operators(j), kHalf);
    return fidelity(idealized_b_state(branch_transform(state)), reduce_to_last(moved, 2));
}

}  // namespace

TEST(UTransform, ReducedStateMatchesBruteForceReference) {
    EXPECT_NEAR(finite_j_fidelity(spin(3)), 9.54034000719063080e-01, 1e-10);
    EXPECT_NEAR(finite_j_fidelity(spin(4)), 9.63470196987828986e-01, 1e-10);
}

TEST(UTransform, TargetIsSecondAxis) {
    const auto out =
        branch_transform(single(test_frame(), SystemB::label(Vec3::UnitZ(), 0.5, kHalf)));
    EXPECT_LT((out.branches[0].system.as_label().n - Vec3::UnitY()).norm(), 1e-15);
}

TEST(UTransform, FidelityIncreasesWithSpin) {
    double previous = 0.0;
    for (int jv : {3, 6, 12}) {
        const double f = finite_j_fidelity(spin(jv));
        EXPECT_GT(f, previous) << "j=" << jv;
        previous = f;
    }
    EXPECT_GT(finite_j_fidelity(spin(20)), 0.99);
    EXPECT_LT(finite_j_fidelity(spin(19)), 0.99);
}

TEST(ConvergenceStudy, MatchesBruteForceResiduals) {
    const std::vector<SpinQuantumNumber> js{spin(5), spin(10), spin(20), spin(40)};
    const auto table = convergence_study(test_frame(), kPi / 3, kPi / 4, js);
    const std::array<std::array<double, 3>, 4> reference{{
        {2.20987465612351497e-01, 3.02952858153194782e-01, 1.73174699175763114e-01},
        {1.76698196655049239e-01, 2.18485449311719204e-01, 1.46913315760932417e-01},
        {1.37371696309042085e-01, 1.56221907288273232e-01, 1.18815679000057087e-01},
        {1.04137512638920085e-01, 1.11119725937761288e-01, 9.24450466549364136e-02},
    }};
    ASSERT_EQ(table.rows.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_NEAR(table.rows[k].alpha_err, reference[k][0], 1e-9);
        EXPECT_NEAR(table.rows[k].beta_err, reference[k][1], 1e-9);
        EXPECT_NEAR(table.rows[k].gamma_err, reference[k][2], 1e-9);
    }
    EXPECT_TRUE(table.errors_nonincreasing());
    EXPECT_DOUBLE_EQ(table.classical.beta, kPi / 2);
}

TEST(ConvergenceStudy, ExpectationsApproachClassicalAngles) {
    const std::vector<SpinQuantumNumber> js{spin(5), spin(40)};
    const auto table = convergence_study(test_frame(), kPi / 3, kPi / 4, js);
    for (const auto& row : table.rows) {
        EXPECT_NEAR(row.expectation.beta, kPi / 2, 0.1);
        EXPECT_NEAR(row.expectation.alpha, 0.0, 0.1);
        EXPECT_NEAR(row.expectation.gamma, 0.0, 0.1);
    }
}

TEST(ConvergenceStudy, ErrorsScaleLikeInverseSquareRoot) {
    const std::vector<SpinQuantumNumber> js{spin(5), spin(10), spin(20), spin(40)};
    const auto table = convergence_study(test_frame(), kPi / 3, kPi / 4, js);
    auto slope = [&](auto field) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& r : table.rows) {
            const double x = std::log(r.j.value()), y = std::log(field(r));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double n = static_cast<double>(table.rows.size());
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    for (double s : {slope([](const ConvergenceRow& r) { return r.alpha_err; }),
                     slope([](const ConvergenceRow& r) { return r.beta_err; }),
                     slope([](const ConvergenceRow& r) { return r.gamma_err; })}) {
        EXPECT_GE(s, -0.8);
        EXPECT_LE(s, -0.3);
    }
}

TEST(ConvergenceStudy, CosineRowFollowsExactFormula) {
    const double theta = 1.1;
    const std::vector<SpinQuantumNumber> js{spin(0.5), spin(1), spin(7)};
    const auto table = convergence_study(test_frame(), theta, 0.3, js);
    for (const auto& row : table.rows) {
        const double j = row.j.value();
        EXPECT_NEAR(row.cos_op_err, std::cos(theta) * (1.0 - j / std::sqrt(j * (j + 1.0))), 1e-12);
    }
}

TEST(ConvergenceStudy, RejectsGimbalAndLeftHandedFrames) {
    const std::vector<SpinQuantumNumber> js{spin(2)};
    EXPECT_THROW(convergence_study(Frame::canonical(), 1.0, 0.0, js), DomainError);
    EXPECT_THROW(convergence_study(swapped_frame(), 1.0, 0.0, js), DomainError);
}
