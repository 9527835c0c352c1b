#include "wzlab/coefficients.hpp"
#include "wzlab/errors.hpp"
#include "wzlab/models.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace wzlab;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double d : v) x[i++] = d;
    return x;
}

}  // namespace

TEST(Stratonovich, CubicClosedForm) {
    const SdeModel m = builtin("cubic").model;
    // sigma = x^2, d sigma = 2x, correction = 2x^3.
    for (double x : {-3.0, -0.5, 0.0, 0.7, 2.0})
        EXPECT_NEAR(stratonovich_correction(m, vec({x}))[0], 2 * x * x * x, 1e-12 * (1 + std::abs(x * x * x)));
}

TEST(Stratonovich, MatchesFiniteDifferenceForAllModels) {
    for (const auto& name : builtin_names()) {
        const SdeModel m = builtin(name).model;
        const Vector x = m.x0;
        const GradientTensor fd = finite_difference_jacobian(m.diffusion, x, m.noise_dim, 1e-6);
        const Matrix s = m.diffusion(x);
        const Vector expected = fd.contract(s);
        const Vector got = stratonovich_correction(m, x);
        EXPECT_LT((got - expected).cwiseAbs().maxCoeff(), 1e-7) << name;
    }
}

TEST(Stratonovich, RejectsPointsOutsideRegion) {
    const SdeModel m = builtin("lotka_volterra3").model;
    EXPECT_THROW((void)stratonovich_correction(m, vec({-1.0, 0.5, 0.5})), DomainError);
}

TEST(TruncationBump, ProfileSeams) {
    const TruncationBump bump(2.0);
    EXPECT_EQ(bump.profile(0.0), 1.0);
    EXPECT_EQ(bump.profile(3.0), 1.0);
    EXPECT_EQ(bump.profile(6.0), 0.0);
    EXPECT_EQ(bump.profile(9.0), 0.0);
    EXPECT_NEAR(bump.profile(4.5), 0.5, 1e-15);
    EXPECT_EQ(bump.profile_derivative(3.0), 0.0);
    EXPECT_EQ(bump.profile_derivative(6.0), 0.0);
    // Derivative against a central difference.
    for (double r : {3.3, 4.1, 5.7}) {
        const double h = 1e-6;
        EXPECT_NEAR(bump.profile_derivative(r), (bump.profile(r + h) - bump.profile(r - h)) / (2 * h), 1e-8);
    }
    EXPECT_THROW(TruncationBump(0.0), ParameterError);
}

TEST(TruncationBump, GradientIsRadial) {
    const TruncationBump bump(1.0);
    const Vector x = vec({1.5, 2.0});
    const double r = x.norm();
    const Vector g = bump.gradient(x);
    EXPECT_LT((g - bump.profile_derivative(r) * x / r).norm(), 1e-15);
    EXPECT_EQ(bump.gradient(vec({0.1, 0.1})).norm(), 0.0);
}

TEST(TruncateSystem, AgreesInsideVanishesOutside) {
    const SdeModel m = builtin("cubic").model;
    const CoefficientSystem sys = reduce_to_wz_form(m, WzVariant::shifted);
    const CoefficientSystem tr = truncate_system(sys, 1.0);
    const Vector inside = vec({1.6}), outside = vec({4.5});
    EXPECT_EQ(tr.drift(inside), sys.drift(inside));
    EXPECT_EQ(tr.smooth_noise(inside), sys.smooth_noise(inside));
    EXPECT_EQ(tr.ito_noise(inside), sys.ito_noise(inside));
    EXPECT_EQ(tr.control(inside), sys.control(inside));
    EXPECT_EQ(tr.drift(outside)[0], 0.0);
    EXPECT_EQ(tr.smooth_noise(outside)(0, 0), 0.0);
    // Product-rule Jacobian against finite differences in the transition zone.
    EXPECT_LT(jacobian_consistency_error(tr.smooth_noise, tr.smooth_noise_jacobian, vec({2.7}), 1), 1e-6);
}

TEST(Reduction, SkeletonAndShiftedForms) {
    const SdeModel m = builtin("cubic").model;
    const Vector x = vec({0.8});
    const CoefficientSystem sk = reduce_to_wz_form(m, WzVariant::skeleton);
    EXPECT_NEAR(sk.drift(x)[0], -2 * std::pow(0.8, 3), 1e-15);
    EXPECT_EQ(sk.control(x)(0, 0), 0.0);
    EXPECT_EQ(sk.smooth_noise(x)(0, 0), 0.8 * 0.8);
    EXPECT_EQ(sk.ito_noise(x)(0, 0), 0.0);
    EXPECT_NEAR(sk.smooth_noise_jacobian(x)(0, 0, 0), 1.6, 1e-15);

    const CoefficientSystem sh = reduce_to_wz_form(m, WzVariant::shifted);
    EXPECT_EQ(sh.drift(x)[0], m.drift(x)[0]);
    EXPECT_EQ(sh.control(x)(0, 0), 0.8 * 0.8);
    EXPECT_EQ(sh.smooth_noise(x)(0, 0), -(0.8 * 0.8));
    EXPECT_EQ(sh.ito_noise(x)(0, 0), 0.8 * 0.8);
    EXPECT_NEAR(sh.smooth_noise_jacobian(x)(0, 0, 0), -1.6, 1e-15);

    EXPECT_EQ(parse_wz_variant(to_string(WzVariant::shifted)), WzVariant::shifted);
    EXPECT_THROW((void)parse_wz_variant("bogus"), ParameterError);
}

TEST(Region, Membership) {
    EXPECT_TRUE(AdmissibleRegion::whole_space().contains(vec({-1e9})));
    EXPECT_TRUE(AdmissibleRegion::positive_orthant().contains(vec({1e-9, 2})));
    EXPECT_FALSE(AdmissibleRegion::positive_orthant().contains(vec({0.0, 2})));
    EXPECT_TRUE(AdmissibleRegion::nonnegative_orthant().contains(vec({0.0, 2})));
    const auto half = AdmissibleRegion::half_space(vec({1.0, 1.0}), 1.0);
    EXPECT_TRUE(half.contains(vec({0.5, 0.5})));
    EXPECT_FALSE(half.contains(vec({0.2, 0.5})));
}

TEST(Jacobian, AllBuiltinsConsistent) {
    for (const auto& name : builtin_names()) {
        const SdeModel m = builtin(name).model;
        for (double scale : {0.5, 1.0, 2.0}) {
            const Vector x = m.x0 * scale;
            EXPECT_LT(jacobian_consistency_error(m.diffusion, m.diffusion_jacobian, x, m.noise_dim), 1e-6) << name;
        }
    }
}
