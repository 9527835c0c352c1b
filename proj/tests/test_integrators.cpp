#include "wzlab/errors.hpp"
#include "wzlab/integrators.hpp"
#include "wzlab/models.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace wzlab;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double d : v) x[i++] = d;
    return x;
}

SdeModel scalar_model(std::function<double(double)> b, double x0, AdmissibleRegion region) {
    SdeModel m;
    m.name = "scalar";
    m.state_dim = 1;
    m.noise_dim = 1;
    m.drift = [b](const Vector& x) { return Vector::Constant(1, b(x[0])); };
    m.diffusion = zero_matrix_field(1, 1);
    m.diffusion_jacobian = zero_tensor_field(1, 1);
    m.x0 = Vector::Constant(1, x0);
    m.region = std::move(region);
    return m;
}

}  // namespace

TEST(Skeleton, CubicClosedForm) {
    const SdeModel m = builtin("cubic").model;
    const Trajectory s = solve_skeleton(m, CameronMartinPath::zero(1), vec({1.0}), 12);
    ASSERT_TRUE(s.completed());
    EXPECT_NEAR(s.state(s.size() - 1)[0], 1.0 / std::sqrt(5.0), 1e-10);
    // S(t) = 1 / sqrt(1 + 4t) at every grid point.
    for (std::size_t i = 0; i < s.size(); i += 97)
        EXPECT_NEAR(s.state(i)[0], 1.0 / std::sqrt(1.0 + 4.0 * s.time(i)), 1e-10);
}

TEST(Skeleton, LinearWithPiecewiseControl) {
    const BuiltinModel b = builtin("threshold_ou", {{"beta", {0.5}}, {"alpha", {2.0}}, {"sigma", {0.8}}});
    const CameronMartinPath h({0.0, 0.5, 1.0}, {vec({1.0}), vec({-3.0})});
    const Trajectory s = solve_skeleton(b.model, h, vec({0.2}), 10);
    // Piecewise closed form of S' = beta - alpha S + sigma hdot.
    auto flow = [](double x, double c, double t) { return c / 2.0 + (x - c / 2.0) * std::exp(-2.0 * t); };
    const double mid = flow(0.2, 0.5 + 0.8, 0.5);
    const double end = flow(mid, 0.5 - 2.4, 0.5);
    EXPECT_NEAR(s.state(512)[0], mid, 1e-11);
    EXPECT_NEAR(s.state(1024)[0], end, 1e-11);
}

TEST(Skeleton, RejectsMisalignedControl) {
    const SdeModel m = builtin("cubic").model;
    const CameronMartinPath h({0.0, 0.3, 1.0}, {vec({1.0}), vec({1.0})});
    EXPECT_THROW((void)solve_skeleton(m, h, vec({0.5}), 8), ParameterError);
}

TEST(Euler, MatchesHandLoop) {
    const SdeModel m = builtin("duffing_vdp").model;
    const auto w = sample_wiener(1, 9, 77);
    const Trajectory t = integrate_sde(m, w, m.x0);
    Vector x = m.x0;
    for (std::size_t i = 0; i < w->steps(); ++i) {
        const Vector b = m.drift(x);
        const Matrix s = m.diffusion(x);
        for (int c = 0; c < 2; ++c) x[c] = x[c] + b[c] * w->step_size() + s(c, 0) * w->increment(i)[0];
        ASSERT_LT((t.state(i + 1) - x).norm(), 1e-13) << i;
    }
}

TEST(Mixed, SkeletonFormMatchesHandLoop) {
    const SdeModel m = builtin("cubic").model;
    const CoefficientSystem sys = reduce_to_wz_form(m, WzVariant::skeleton);
    const auto w = sample_wiener(1, 10, 5);
    const PolygonalPath wn(w, 4);
    const Trajectory y = integrate_mixed(sys, DriverBundle(w, wn), m.x0);
    double x = m.x0[0];
    for (std::size_t i = 0; i < w->steps(); ++i) {
        const double slope = wn.slope(i / 64)[0];
        x += (-2 * x * x * x + x * x * slope) * w->step_size();
        ASSERT_NEAR(y.state(i + 1)[0], x, 1e-13) << i;
    }
}

TEST(Mixed, RequiresLevelMargin) {
    const CoefficientSystem sys = reduce_to_wz_form(builtin("cubic").model, WzVariant::skeleton);
    const auto w = sample_wiener(1, 7, 5);
    EXPECT_THROW((void)integrate_mixed(sys, DriverBundle(w, PolygonalPath(w, 4)), vec({0.5})), ParameterError);
    EXPECT_THROW((void)integrate_mixed(sys, DriverBundle(w), vec({0.5})), ParameterError);
}

TEST(DriverBundle, RejectsForeignPolygonal) {
    const auto w1 = sample_wiener(1, 8, 1);
    const auto w2 = sample_wiener(1, 8, 1);
    EXPECT_THROW(DriverBundle(w1, PolygonalPath(w2, 3)), ParameterError);
    EXPECT_THROW(DriverBundle(w1, std::nullopt, CameronMartinPath::zero(2)), ParameterError);
}

TEST(ItoLimit, SkeletonFormRecoversEuler) {
    const SdeModel m = builtin("cubic").model;
    const CoefficientSystem sys = reduce_to_wz_form(m, WzVariant::skeleton);
    const auto w = sample_wiener(1, 9, 12);
    const Trajectory z = integrate_ito_limit(sys, DriverBundle(w), m.x0);
    const Trajectory x = integrate_sde(m, w, m.x0);
    // Skeleton form Ito limit: B + 1/2 (d sigma) sigma = b, noise sigma: plain Euler up to rounding.
    ASSERT_TRUE(z.completed());
    EXPECT_LT(sup_distance(z, x), 1e-12);
}

TEST(Shifted, CancellationIsExact) {
    const SdeModel m = builtin("cubic").model;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto w = sample_wiener(1, 11, seed);
        const PolygonalPath wn(w, 5);
        const Trajectory a = integrate_shifted(m, DriverBundle(w, wn, wn_as_cameron_martin(wn)), m.x0);
        const Trajectory b = integrate_sde(m, w, m.x0);
        EXPECT_EQ(a.raw(), b.raw());
    }
}

TEST(Status, EscapeAndBlowUp) {
    const SdeModel leaving = scalar_model([](double) { return -1.0; }, 0.1, AdmissibleRegion::positive_orthant());
    const Trajectory e = integrate_sde(leaving, make_wiener(1, 8, std::vector<double>(256, 0.0)), leaving.x0);
    EXPECT_EQ(e.status(), TrajectoryStatus::escaped);
    ASSERT_TRUE(e.event_time().has_value());
    EXPECT_NEAR(*e.event_time(), 0.1, 1.0 / 256);
    EXPECT_LE(e.state(e.size() - 1)[0], 0.0);

    const SdeModel exploding = scalar_model([](double x) { return x * x; }, 10.0, AdmissibleRegion::whole_space());
    const Trajectory b = integrate_sde(exploding, make_wiener(1, 12, std::vector<double>(4096, 0.0)), exploding.x0);
    EXPECT_EQ(b.status(), TrajectoryStatus::nonfinite);
    EXPECT_LT(*b.event_time(), 0.2);
    EXPECT_EQ(sup_distance(b, b), std::numeric_limits<double>::infinity());
}

TEST(Status, InitialStateChecks) {
    const SdeModel m = builtin("lotka_volterra3").model;
    const auto w = sample_wiener(m.noise_dim, 4, 1);
    EXPECT_THROW((void)integrate_sde(m, w, vec({-1, 1, 1})), DomainError);
    EXPECT_THROW((void)integrate_sde(m, w, vec({1, 1})), ParameterError);
}

TEST(LinearSde, DeterministicDecay) {
    const LinearCoefficients lin{1.0, 2.0, 0.0};
    const Trajectory t = solve_linear_sde(lin, sample_wiener(1, 6, 3), 3.0);
    for (std::size_t i = 0; i < t.size(); ++i)
        EXPECT_NEAR(t.state(i)[0], 0.5 + 2.5 * std::exp(-2.0 * t.time(i)), 1e-13);
}

TEST(LinearSde, CloseToEulerOnFineGrid) {
    const BuiltinModel b = builtin("threshold_ou");
    const auto w = sample_wiener(1, 14, 8);
    const Trajectory exact = solve_linear_sde(*b.model.linear, w, b.model.x0[0]);
    const Trajectory euler = integrate_sde(b.model, w, b.model.x0);
    EXPECT_LT(sup_distance(exact, euler), 5e-3);
}

TEST(SupDistance, GridMismatchThrows) {
    const SdeModel m = builtin("cubic").model;
    const Trajectory a = integrate_sde(m, sample_wiener(1, 5, 1), m.x0);
    const Trajectory b = integrate_sde(m, sample_wiener(1, 6, 1), m.x0);
    EXPECT_THROW((void)sup_distance(a, b), ParameterError);
    EXPECT_EQ(sup_distance(a, a), 0.0);
}

TEST(Trajectory, CsvFooter) {
    const SdeModel m = builtin("cubic").model;
    std::ostringstream os;
    integrate_sde(m, sample_wiener(1, 3, 1), m.x0).write_csv(os);
    const std::string s = os.str();
    EXPECT_EQ(s.rfind("t,x_1\n0,0.5\n", 0), 0u);
    EXPECT_NE(s.find("# status=completed\n"), std::string::npos);
}
