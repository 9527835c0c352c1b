#include "wzlab/models.hpp"

#include "wzlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace wzlab {

namespace {

class ParamReader {
public:
    ParamReader(std::string model, const ParamMap& given, std::set<std::string> allowed)
        : model_(std::move(model)), given_(given) {
        for (const auto& [key, _] : given_)
            if (!allowed.contains(key)) throw ParameterError(model_ + ": unknown parameter '" + key + "'");
    }

    double positive(const std::string& key, double fallback) {
        const double v = scalar(key, fallback);
        if (!(v > 0.0)) throw ParameterError(model_ + ": parameter '" + key + "' must be positive");
        return v;
    }

    double scalar(const std::string& key, double fallback) {
        const auto values = vector(key, {fallback});
        if (values.size() != 1) throw ParameterError(model_ + ": parameter '" + key + "' must be a scalar");
        return values.front();
    }

    std::vector<double> vector(const std::string& key, std::vector<double> fallback) {
        const auto it = given_.find(key);
        std::vector<double> v = it == given_.end() ? std::move(fallback) : it->second;
        for (double e : v)
            if (!std::isfinite(e)) throw ParameterError(model_ + ": parameter '" + key + "' must be finite");
        resolved_[key] = v;
        return v;
    }

    [[nodiscard]] ParamMap resolved() const { return resolved_; }

private:
    std::string model_;
    const ParamMap& given_;
    ParamMap resolved_;
};

Vector resolve_x0(const std::string& name, const Vector& given, const Vector& fallback) {
    if (given.size() == 0) return fallback;
    if (given.size() != fallback.size())
        throw ParameterError(name + ": x0 must have " + std::to_string(fallback.size()) + " components");
    if (!given.allFinite()) throw ParameterError(name + ": x0 must be finite");
    return given;
}

LyapunovData quadratic_lyapunov(int m, double theta, double eta, double C, double M) {
    LyapunovData lyap;
    lyap.description = "|x|^2";
    lyap.value = [](const Vector& x) { return x.squaredNorm(); };
    lyap.gradient = [](const Vector& x) -> Vector { return 2.0 * x; };
    lyap.hessian = [m](const Vector&) -> Matrix { return 2.0 * Matrix::Identity(m, m); };
    lyap.theta = theta;
    lyap.eta = eta;
    lyap.C = C;
    lyap.M = M;
    return lyap;
}

BuiltinModel make_cubic(const ParamMap& params, const Vector& x0) {
    ParamReader reader("cubic", params, {});
    BuiltinModel out;
    SdeModel& m = out.model;
    m.name = "cubic";
    m.state_dim = 1;
    m.noise_dim = 1;
    m.drift = [](const Vector& x) -> Vector { return Vector::Constant(1, -x[0] * x[0] * x[0]); };
    m.diffusion = [](const Vector& x) -> Matrix { return Matrix::Constant(1, 1, x[0] * x[0]); };
    m.diffusion_jacobian = [](const Vector& x) {
        GradientTensor t(1, 1);
        t(0, 0, 0) = 2.0 * x[0];
        return t;
    };
    m.x0 = resolve_x0(m.name, x0, Vector::Constant(1, 0.5));
    out.lyapunov = quadratic_lyapunov(1, 1.0, 4.0, 1.0, 1.0);
    out.lyapunov.description = "x^2";
    out.params = reader.resolved();
    return out;
}

BuiltinModel make_lotka_volterra(const ParamMap& params, const Vector& x0) {
    ParamReader reader("lotka_volterra3", params, {"r", "gamma", "a"});
    const double r = reader.positive("r", 1.0);
    const double gamma = reader.positive("gamma", 0.5);
    const auto a_flat = reader.vector("a", std::vector<double>(9, 1.0));
    if (a_flat.size() != 9) throw ParameterError("lotka_volterra3: 'a' must have 9 entries (row-major 3x3)");
    if (std::any_of(a_flat.begin(), a_flat.end(), [](double v) { return !(v > 0.0); }))
        throw ParameterError("lotka_volterra3: entries of 'a' must be positive");
    Matrix a(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = a_flat[3 * i + j];

    BuiltinModel out;
    SdeModel& m = out.model;
    m.name = "lotka_volterra3";
    m.state_dim = 3;
    m.noise_dim = 1;
    const double growth = r + 0.5 * gamma * gamma;
    m.drift = [a, growth](const Vector& y) -> Vector {
        const Vector competition = a * y;
        return (y.array() * (growth - competition.array())).matrix();
    };
    m.diffusion = [gamma](const Vector& y) -> Matrix { return gamma * y; };
    m.diffusion_jacobian = [gamma](const Vector&) {
        GradientTensor t(3, 1);
        for (int i = 0; i < 3; ++i) t(i, 0, i) = gamma;
        return t;
    };
    m.x0 = resolve_x0(m.name, x0, Vector::Constant(3, 0.5));
    m.region = AdmissibleRegion::positive_orthant();
    if (!m.region.contains(m.x0)) throw ParameterError("lotka_volterra3: x0 must lie in (0, inf)^3");
    const double theta = 1.0, eta = 1.0;
    out.lyapunov = quadratic_lyapunov(3, theta, eta, 2.0 * growth + theta * gamma * gamma + 4.0 * gamma * gamma / eta,
                                      1.0);
    out.params = reader.resolved();
    return out;
}

BuiltinModel make_sir(const ParamMap& params, const Vector& x0) {
    ParamReader reader("sir", params, {"alpha", "beta", "gamma", "kappa"});
    const double alpha = reader.positive("alpha", 0.5);
    const double beta = reader.positive("beta", 0.2);
    const double gamma = reader.positive("gamma", 0.3);
    const double kappa = reader.positive("kappa", 0.1);

    BuiltinModel out;
    SdeModel& m = out.model;
    m.name = "sir";
    m.state_dim = 3;
    m.noise_dim = 1;
    m.drift = [=](const Vector& x) -> Vector {
        const double contact = alpha * x[0] * x[1];
        Vector b(3);
        b << -contact - kappa * x[0] + kappa, contact - (gamma + kappa) * x[1], gamma * x[1] - kappa * x[2];
        return b;
    };
    m.diffusion = [beta](const Vector& x) -> Matrix {
        const double s = beta * x[0] * x[1];
        Matrix sigma(3, 1);
        sigma << -s, s, 0.0;
        return sigma;
    };
    m.diffusion_jacobian = [beta](const Vector& x) {
        GradientTensor t(3, 1);
        t(0, 0, 0) = -beta * x[1];
        t(0, 0, 1) = -beta * x[0];
        t(1, 0, 0) = beta * x[1];
        t(1, 0, 1) = beta * x[0];
        return t;
    };
    Vector fallback(3);
    fallback << 0.6, 0.3, 0.1;
    m.x0 = resolve_x0(m.name, x0, fallback);
    m.region = AdmissibleRegion::nonnegative_orthant();
    if (!m.region.contains(m.x0)) throw ParameterError("sir: x0 must lie in [0, inf)^3");

    LyapunovData& lyap = out.lyapunov;
    lyap.description = "(x1 + x2 - 1)^2";
    lyap.value = [](const Vector& x) {
        const double u = x[0] + x[1] - 1.0;
        return u * u;
    };
    lyap.gradient = [](const Vector& x) -> Vector {
        const double u = 2.0 * (x[0] + x[1] - 1.0);
        Vector g(3);
        g << u, u, 0.0;
        return g;
    };
    lyap.hessian = [](const Vector&) -> Matrix {
        Matrix h = Matrix::Zero(3, 3);
        h.topLeftCorner(2, 2).setConstant(2.0);
        return h;
    };
    // -2 gamma x2 u <= 2 gamma (1 + |u|) |u| <= 3 gamma (1 + u^2) on the orthant.
    lyap.C = 3.0 * gamma;
    lyap.M = 1.0;
    out.params = reader.resolved();
    return out;
}

BuiltinModel make_threshold_ou(const ParamMap& params, const Vector& x0) {
    ParamReader reader("threshold_ou", params, {"beta", "alpha", "thresholds", "sigma"});
    const auto beta = reader.vector("beta", {1.0});
    const auto alpha = reader.vector("alpha", {1.0});
    const auto thresholds = reader.vector("thresholds", {});
    const double sigma = reader.scalar("sigma", 0.5);
    if (beta.empty() || beta.size() != alpha.size())
        throw ParameterError("threshold_ou: 'beta' and 'alpha' need one entry per regime");
    if (thresholds.size() + 1 != beta.size())
        throw ParameterError("threshold_ou: n regimes need n-1 thresholds");
    if (!std::is_sorted(thresholds.begin(), thresholds.end()) ||
        std::adjacent_find(thresholds.begin(), thresholds.end()) != thresholds.end())
        throw ParameterError("threshold_ou: thresholds must be strictly increasing");
    if (std::any_of(alpha.begin(), alpha.end(), [](double v) { return !(v > 0.0); }))
        throw ParameterError("threshold_ou: 'alpha' entries must be positive");
    if (sigma < 0.0) throw ParameterError("threshold_ou: 'sigma' must be nonnegative");

    BuiltinModel out;
    SdeModel& m = out.model;
    m.name = "threshold_ou";
    m.state_dim = 1;
    m.noise_dim = 1;
    m.drift = [=](const Vector& x) -> Vector {
        // Regime i covers [theta_{i-1}, theta_i).
        const auto regime = static_cast<std::size_t>(
            std::upper_bound(thresholds.begin(), thresholds.end(), x[0]) - thresholds.begin());
        return Vector::Constant(1, beta[regime] - alpha[regime] * x[0]);
    };
    m.diffusion = [sigma](const Vector&) -> Matrix { return Matrix::Constant(1, 1, sigma); };
    m.diffusion_jacobian = zero_tensor_field(1, 1);
    m.x0 = resolve_x0(m.name, x0, Vector::Constant(1, 0.5));
    m.non_lipschitz_drift = beta.size() > 1;
    if (beta.size() == 1) m.linear = LinearCoefficients{beta[0], alpha[0], sigma};

    double worst = 0.0;
    for (std::size_t i = 0; i < beta.size(); ++i) worst = std::max(worst, beta[i] * beta[i] / (2.0 * alpha[i]));
    out.lyapunov = quadratic_lyapunov(1, 1.0, 1.0, std::max(1.0, worst + 5.0 * sigma * sigma), 1.0);
    out.lyapunov.description = "x^2";
    out.params = reader.resolved();
    return out;
}

}  // namespace

BuiltinModel duffing_vdp(const ParamMap& params, std::function<double(double)> g, std::function<double(double)> dg,
                         const Vector& x0) {
    ParamReader reader("duffing_vdp", params, {"alpha1", "alpha2", "alpha3", "eta0", "eta1"});
    const double a1 = reader.positive("alpha1", 1.0);
    const double a2 = reader.positive("alpha2", 1.0);
    const double a3 = reader.positive("alpha3", 1.0);
    const double eta0 = reader.positive("eta0", 1.0);
    const double eta1 = reader.positive("eta1", 1.0);
    if (!g) g = [=](double x) { return std::sqrt(eta0 + eta1 * x * x * x * x); };
    if (!dg) dg = [=](double x) { return 2.0 * eta1 * x * x * x / std::sqrt(eta0 + eta1 * x * x * x * x); };

    BuiltinModel out;
    SdeModel& m = out.model;
    m.name = "duffing_vdp";
    m.state_dim = 2;
    m.noise_dim = 1;
    m.drift = [=](const Vector& x) -> Vector {
        Vector b(2);
        b << x[1], a2 * x[1] - a1 * x[0] - a3 * x[0] * x[0] * x[1] - x[0] * x[0] * x[0];
        return b;
    };
    m.diffusion = [g](const Vector& x) -> Matrix {
        Matrix s(2, 1);
        s << 0.0, g(x[0]);
        return s;
    };
    m.diffusion_jacobian = [dg](const Vector& x) {
        GradientTensor t(2, 1);
        t(1, 0, 0) = dg(x[0]);
        return t;
    };
    Vector fallback(2);
    fallback << 0.5, 0.5;
    m.x0 = resolve_x0(m.name, x0, fallback);

    LyapunovData& lyap = out.lyapunov;
    lyap.description = "x1^4/2 + alpha1 x1^2 + x2^2";
    lyap.value = [a1](const Vector& x) {
        const double x1sq = x[0] * x[0];
        return 0.5 * x1sq * x1sq + a1 * x1sq + x[1] * x[1];
    };
    lyap.gradient = [a1](const Vector& x) -> Vector {
        Vector gr(2);
        gr << 2.0 * x[0] * x[0] * x[0] + 2.0 * a1 * x[0], 2.0 * x[1];
        return gr;
    };
    lyap.hessian = [a1](const Vector& x) -> Matrix {
        Matrix h = Matrix::Zero(2, 2);
        h(0, 0) = 6.0 * x[0] * x[0] + 2.0 * a1;
        h(1, 1) = 2.0;
        return h;
    };
    lyap.theta = 1.0;
    lyap.eta = 1.0;
    lyap.C = 5.0 * eta0 + 10.0 * eta1 + 2.0 * a2;
    lyap.M = 1.0;
    out.params = reader.resolved();
    return out;
}

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names{"cubic", "duffing_vdp", "lotka_volterra3", "sir", "threshold_ou"};
    return names;
}

BuiltinModel builtin(const std::string& name, const ParamMap& params, const Vector& x0) {
    if (name == "cubic") return make_cubic(params, x0);
    if (name == "duffing_vdp") return duffing_vdp(params, nullptr, nullptr, x0);
    if (name == "lotka_volterra3") return make_lotka_volterra(params, x0);
    if (name == "sir") return make_sir(params, x0);
    if (name == "threshold_ou") return make_threshold_ou(params, x0);
    throw ParameterError("unknown model '" + name + "'");
}

}  // namespace wzlab
