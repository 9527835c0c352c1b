#include "wzlab/errors.hpp"
#include "wzlab/lyapunov.hpp"
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

// Entry-by-entry Trace(A* D A).
double trace_oracle(const Matrix& a, const Matrix& d) {
    double acc = 0.0;
    for (int j = 0; j < a.cols(); ++j)
        for (int p = 0; p < a.rows(); ++p)
            for (int q = 0; q < a.rows(); ++q) acc += a(p, j) * d(p, q) * a(q, j);
    return acc;
}

double quotient_oracle(const Matrix& a, const Vector& g, double v, double eta) {
    double acc = 0.0;
    for (int j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (int p = 0; p < a.rows(); ++p) s += a(p, j) * g[p];
        acc += s * s;
    }
    return acc == 0.0 ? 0.0 : acc / (eta * v);
}

// Condition (b) of the coupled family, written out with explicit loops.
double j1_general_oracle(const CoefficientSystem& s, const LyapunovData& l, const Vector& x) {
    const Matrix hs = l.hessian(x);
    const Matrix H = s.control(x), G = s.smooth_noise(x), F = s.ito_noise(x);
    return s.drift(x).dot(l.gradient(x)) +
           0.5 * l.theta * (trace_oracle(H, hs) + trace_oracle(G, hs) + trace_oracle(F, hs)) +
           quotient_oracle(H + G + F, l.gradient(x), l.value(x), l.eta);
}

double j2_general_oracle(const CoefficientSystem& s, const LyapunovData& l, const Vector& x) {
    const Matrix hs = l.hessian(x);
    const Matrix H = s.control(x), G = s.smooth_noise(x), F = s.ito_noise(x);
    const GradientTensor dG = s.smooth_noise_jacobian(x);
    const Matrix A = F + 0.5 * G;
    Vector shift = Vector::Zero(s.state_dim);
    for (int i = 0; i < s.state_dim; ++i)
        for (int j = 0; j < s.noise_dim; ++j)
            for (int k = 0; k < s.state_dim; ++k) shift[i] += dG(i, j, k) * A(k, j);
    return (s.drift(x) + shift).dot(l.gradient(x)) +
           0.5 * l.theta * (trace_oracle(H, hs) + trace_oracle(F + G, hs)) +
           quotient_oracle(H + G + F, l.gradient(x), l.value(x), l.eta);
}

}  // namespace

TEST(Lyapunov, CubicIdentities) {
    BuiltinModel b = builtin("cubic");
    b.lyapunov.theta = 1.0;
    b.lyapunov.eta = 4.0;
    for (double x : {-7.0, -1.0, 0.0, 0.3, 2.5, 10.0}) {
        const Vector p = vec({x});
        const double x4 = std::pow(x, 4);
        EXPECT_NEAR(eval_J1_sde(b.model, b.lyapunov, p), 0.0, 1e-12 * (1 + x4));
        EXPECT_NEAR(eval_J2_sde(b.model, b.lyapunov, p), -2 * x4, 1e-12 * (1 + x4));
        EXPECT_NEAR(eval_trace_sde(b.model, b.lyapunov, p), 2 * x4, 1e-12 * (1 + x4));
    }
}

TEST(Lyapunov, GeneralConditionsMatchOracle) {
    for (const std::string name : {"duffing_vdp", "lotka_volterra3", "sir", "cubic"}) {
        const BuiltinModel b = builtin(name);
        for (WzVariant v : {WzVariant::skeleton, WzVariant::shifted}) {
            const CoefficientSystem s = reduce_to_wz_form(b.model, v);
            for (double scale : {0.7, 1.3, 3.0}) {
                const Vector x = b.model.x0 * scale;
                const double o1 = j1_general_oracle(s, b.lyapunov, x);
                const double o2 = j2_general_oracle(s, b.lyapunov, x);
                EXPECT_NEAR(eval_J1_general(s, b.lyapunov, x), o1, 1e-12 * (1 + std::abs(o1))) << name;
                EXPECT_NEAR(eval_J2_general(s, b.lyapunov, x), o2, 1e-12 * (1 + std::abs(o2))) << name;
            }
        }
    }
}

TEST(Lyapunov, GeneralReducesToSdeForSkeleton) {
    // Skeleton form: B = b - 1/2 (d sigma) sigma, G = sigma, H = F = 0, so J2 = J1 of (b, sigma).
    const BuiltinModel b = builtin("duffing_vdp");
    const CoefficientSystem s = reduce_to_wz_form(b.model, WzVariant::skeleton);
    const Vector x = vec({0.4, -1.2});
    const double sde = eval_J1_sde(b.model, b.lyapunov, x);
    EXPECT_NEAR(eval_J2_general(s, b.lyapunov, x), sde, 1e-12 * (1 + std::abs(sde)));
}

TEST(Lyapunov, QuotientConvention) {
    const Matrix a = Matrix::Ones(1, 1);
    EXPECT_EQ(lyapunov_quotient(a, vec({0.0}), 0.0, 1.0), 0.0);
    EXPECT_THROW((void)lyapunov_quotient(a, vec({1.0}), 0.0, 1.0), SingularityError);
    EXPECT_DOUBLE_EQ(lyapunov_quotient(a, vec({2.0}), 2.0, 0.5), 4.0);
}

TEST(Lyapunov, HessianTrace) {
    Matrix a(2, 1), h(2, 2);
    a << 1.0, 2.0;
    h << 2.0, 1.0, 1.0, 3.0;
    EXPECT_DOUBLE_EQ(hessian_trace(a, h), trace_oracle(a, h));
}

TEST(Audit, CubicPasses) {
    BuiltinModel b = builtin("cubic");
    b.lyapunov.theta = 1;
    b.lyapunov.eta = 4;
    AuditOptions opts;
    opts.seed = 3;
    const AuditReport r = audit(b.model, b.lyapunov, parse_domain("box:-10:10", 1), opts);
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.samples, 2000u);
    EXPECT_LE(r.condition("J1").sup_ratio, 1e-10);
}

TEST(Audit, DetectsViolation) {
    BuiltinModel b = builtin("cubic");
    b.lyapunov.eta = 1.0;  // J1 = 3 x^4, unbounded relative to 1 + x^2
    AuditOptions opts;
    const AuditReport r = audit(b.model, b.lyapunov, parse_domain("box:-10:10", 1), opts);
    EXPECT_FALSE(r.passed());
    const auto& j1 = r.condition("J1");
    EXPECT_GT(j1.violation_count, 0u);
    EXPECT_LE(j1.violations.size(), kMaxListedViolations);
    ASSERT_FALSE(j1.violations.empty());
    const double x = j1.violations[0].x[0];
    EXPECT_GT(3 * std::pow(x, 4), 1 + x * x);
}

TEST(Audit, BuiltinsPassOnDefaultDomains) {
    for (const auto& name : builtin_names()) {
        const BuiltinModel b = builtin(name);
        const bool orthant = b.model.region.kind() != AdmissibleRegion::Kind::whole_space;
        const auto domain = parse_domain(orthant ? "box:0.01:10" : "box:-10:10", b.model.state_dim);
        const AuditReport r = audit(b.model, b.lyapunov, domain, AuditOptions{});
        for (const auto& c : r.conditions) EXPECT_TRUE(c.passed()) << name << " " << c.name << " " << c.sup_ratio;
    }
}

TEST(Audit, FiniteDifferenceLyapunovMatchesAnalytic) {
    const BuiltinModel b = builtin("duffing_vdp");
    LyapunovData fd = finite_difference_lyapunov("fd", b.lyapunov.value);
    const Vector x = vec({1.3, -0.7});
    EXPECT_LT((fd.gradient(x) - b.lyapunov.gradient(x)).norm(), 1e-7);
    EXPECT_LT((fd.hessian(x) - b.lyapunov.hessian(x)).norm(), 1e-5);
}

TEST(Audit, Deterministic) {
    const BuiltinModel b = builtin("lotka_volterra3");
    AuditOptions opts;
    opts.seed = 17;
    const auto dom = parse_domain("logradial", 3);
    const AuditReport a = audit(b.model, b.lyapunov, dom, opts);
    const AuditReport c = audit(b.model, b.lyapunov, dom, opts);
    for (std::size_t i = 0; i < a.conditions.size(); ++i)
        EXPECT_EQ(a.conditions[i].sup_ratio, c.conditions[i].sup_ratio);
}

TEST(Audit, RejectsTooFewSamples) {
    const BuiltinModel b = builtin("cubic");
    AuditOptions opts;
    opts.samples = 10;
    EXPECT_THROW((void)audit(b.model, b.lyapunov, parse_domain("box:-1:1", 1), opts), ParameterError);
}

TEST(Domain, ParsingAndSampling) {
    const auto box = parse_domain("box:-1,0:1,2", 2);
    for (std::uint64_t i = 0; i < 100; ++i) {
        const Vector x = box.sample(9, i);
        EXPECT_GE(x[0], -1);
        EXPECT_LE(x[0], 1);
        EXPECT_GE(x[1], 0);
        EXPECT_LE(x[1], 2);
    }
    const auto ball = parse_domain("ball:1,1:0.5", 2);
    for (std::uint64_t i = 0; i < 100; ++i) EXPECT_LE((ball.sample(9, i) - vec({1, 1})).norm(), 0.5 + 1e-12);
    const auto lr = parse_domain("logradial:0.1:1000", 3);
    for (std::uint64_t i = 0; i < 100; ++i) {
        const double r = lr.sample(9, i).norm();
        EXPECT_GE(r, 0.1 - 1e-12);
        EXPECT_LE(r, 1000 + 1e-9);
    }
    EXPECT_THROW((void)parse_domain("cube:1", 1), ParameterError);
    EXPECT_THROW((void)parse_domain("box:1:0", 1), ParameterError);
    EXPECT_THROW((void)parse_domain("box:0,0:1,1", 3), ParameterError);
}
