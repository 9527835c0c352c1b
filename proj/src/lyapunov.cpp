#include "wzlab/lyapunov.hpp"

#include "wzlab/errors.hpp"
#include "wzlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wzlab {

double hessian_trace(const Matrix& a, const Matrix& hess) { return (a.transpose() * hess * a).trace(); }

double lyapunov_quotient(const Matrix& a, const Vector& grad, double v, double eta) {
    const double numerator = (a.transpose() * grad).squaredNorm();
    if (v == 0.0) {
        if (numerator == 0.0) return 0.0;
        throw SingularityError("V(x) = 0 with nonzero |A^T grad V|^2 = " + std::to_string(numerator));
    }
    return numerator / (eta * v);
}

double eval_trace_general(const CoefficientSystem& sys, const LyapunovData& lyap, const Vector& x) {
    const Matrix hess = lyap.hessian(x);
    return hessian_trace(sys.control(x), hess) + hessian_trace(sys.smooth_noise(x), hess) +
           hessian_trace(sys.ito_noise(x), hess);
}

double eval_trace_limit(const CoefficientSystem& sys, const LyapunovData& lyap, const Vector& x) {
    const Matrix hess = lyap.hessian(x);
    return hessian_trace(sys.control(x), hess) + hessian_trace(sys.ito_noise(x) + sys.smooth_noise(x), hess);
}

double eval_J1_general(const CoefficientSystem& sys, const LyapunovData& lyap, const Vector& x) {
    const Vector grad = lyap.gradient(x);
    const Matrix h = sys.control(x);
    const Matrix g = sys.smooth_noise(x);
    const Matrix f = sys.ito_noise(x);
    const Matrix hess = lyap.hessian(x);
    const double trace = hessian_trace(h, hess) + hessian_trace(g, hess) + hessian_trace(f, hess);
    return sys.drift(x).dot(grad) + 0.5 * lyap.theta * trace +
           lyapunov_quotient(h + g + f, grad, lyap.value(x), lyap.eta);
}

double eval_J2_general(const CoefficientSystem& sys, const LyapunovData& lyap, const Vector& x) {
    const Vector grad = lyap.gradient(x);
    const Matrix h = sys.control(x);
    const Matrix g = sys.smooth_noise(x);
    const Matrix f = sys.ito_noise(x);
    const Matrix hess = lyap.hessian(x);
    const Vector corrected = sys.drift(x) + sys.smooth_noise_jacobian(x).contract(f + 0.5 * g);
    const double trace = hessian_trace(h, hess) + hessian_trace(f + g, hess);
    return corrected.dot(grad) + 0.5 * lyap.theta * trace +
           lyapunov_quotient(h + g + f, grad, lyap.value(x), lyap.eta);
}

double eval_trace_sde(const SdeModel& model, const LyapunovData& lyap, const Vector& x) {
    return hessian_trace(model.diffusion(x), lyap.hessian(x));
}

double eval_J1_sde(const SdeModel& model, const LyapunovData& lyap, const Vector& x) {
    const Vector grad = lyap.gradient(x);
    const Matrix sigma = model.diffusion(x);
    return model.drift(x).dot(grad) + 0.5 * lyap.theta * hessian_trace(sigma, lyap.hessian(x)) +
           lyapunov_quotient(sigma, grad, lyap.value(x), lyap.eta);
}

double eval_J2_sde(const SdeModel& model, const LyapunovData& lyap, const Vector& x) {
    const Vector grad = lyap.gradient(x);
    const Matrix sigma = model.diffusion(x);
    const Vector corrected = model.drift(x) - 0.5 * model.diffusion_jacobian(x).contract(sigma);
    return corrected.dot(grad) + 0.5 * lyap.theta * hessian_trace(sigma, lyap.hessian(x)) +
           lyapunov_quotient(sigma, grad, lyap.value(x), lyap.eta);
}

// ---------------------------------------------------------------------------
// Sampling domains

SamplingDomain SamplingDomain::box(Vector lower, Vector upper) {
    if (lower.size() == 0 || lower.size() != upper.size()) throw ParameterError("box bounds must share a dimension");
    if (!((upper.array() > lower.array()).all())) throw ParameterError("box is empty (need lower < upper)");
    SamplingDomain d;
    d.kind = Kind::box;
    d.lower = std::move(lower);
    d.upper = std::move(upper);
    return d;
}

SamplingDomain SamplingDomain::ball(Vector center, double radius) {
    if (center.size() == 0) throw ParameterError("ball center must have a dimension");
    if (!(radius > 0.0)) throw ParameterError("ball is empty (need radius > 0)");
    SamplingDomain d;
    d.kind = Kind::ball;
    d.center = std::move(center);
    d.radius = radius;
    return d;
}

SamplingDomain SamplingDomain::log_radial(Vector center, double min_radius, double max_radius) {
    if (center.size() == 0) throw ParameterError("log-radial center must have a dimension");
    if (!(min_radius > 0.0 && max_radius > min_radius))
        throw ParameterError("log-radial range is empty (need 0 < rmin < rmax)");
    SamplingDomain d;
    d.kind = Kind::log_radial;
    d.center = std::move(center);
    d.min_radius = min_radius;
    d.max_radius = max_radius;
    return d;
}

int SamplingDomain::dim() const { return static_cast<int>(kind == Kind::box ? lower.size() : center.size()); }

namespace {

std::string join(const Vector& v) {
    std::ostringstream os;
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

/// Draws uniforms and normals for one sample from a private counter range.
class SampleStream {
public:
    SampleStream(std::uint64_t seed, std::uint64_t index, int dim)
        : gen_(seed), counter_(index * (2 * static_cast<std::uint64_t>(dim) + 2)) {}

    double uniform() { return uniform_pair(gen_, kAuditStreamBase, counter_++)[0]; }
    double normal() { return normal_pair(gen_, kAuditStreamBase, counter_++)[0]; }

    Vector direction(int dim) {
        Vector v(dim);
        double norm = 0.0;
        while (norm == 0.0) {
            for (int i = 0; i < dim; ++i) v[i] = normal();
            norm = v.norm();
        }
        return v / norm;
    }

private:
    Philox4x32 gen_;
    std::uint64_t counter_;
};

}  // namespace

std::string SamplingDomain::description() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::box:
            os << "box:" << join(lower) << ":" << join(upper);
            break;
        case Kind::ball:
            os << "ball:" << join(center) << ":" << radius;
            break;
        case Kind::log_radial:
            os << "logradial:" << join(center) << ":" << min_radius << ":" << max_radius;
            break;
    }
    return os.str();
}

Vector SamplingDomain::sample(std::uint64_t seed, std::uint64_t index) const {
    const int m = dim();
    SampleStream stream(seed, index, m);
    switch (kind) {
        case Kind::box: {
            Vector x(m);
            for (int i = 0; i < m; ++i) x[i] = lower[i] + (upper[i] - lower[i]) * stream.uniform();
            return x;
        }
        case Kind::ball: {
            const double r = radius * std::pow(stream.uniform(), 1.0 / m);
            return center + r * stream.direction(m);
        }
        case Kind::log_radial: {
            const double lo = std::log(min_radius);
            const double r = std::exp(lo + (std::log(max_radius) - lo) * stream.uniform());
            return center + r * stream.direction(m);
        }
    }
    return {};
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

double parse_number(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParameterError("bad number '" + s + "' in domain spec");
    }
    if (used != s.size()) throw ParameterError("bad number '" + s + "' in domain spec");
    return v;
}

Vector parse_point(const std::string& s, int dim) {
    const auto parts = split(s, ',');
    if (parts.size() == 1) return Vector::Constant(dim, parse_number(parts[0]));
    if (static_cast<int>(parts.size()) != dim)
        throw ParameterError("domain point '" + s + "' needs " + std::to_string(dim) + " components");
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = parse_number(parts[i]);
    return v;
}

}  // namespace

SamplingDomain parse_domain(const std::string& spec, int dim) {
    const auto parts = split(spec, ':');
    if (parts.empty()) throw ParameterError("empty domain spec");
    const std::string& kind = parts[0];
    if (kind == "box" && parts.size() == 3) return SamplingDomain::box(parse_point(parts[1], dim), parse_point(parts[2], dim));
    if (kind == "ball" && parts.size() == 2) return SamplingDomain::ball(Vector::Zero(dim), parse_number(parts[1]));
    if (kind == "ball" && parts.size() == 3) return SamplingDomain::ball(parse_point(parts[1], dim), parse_number(parts[2]));
    if (kind == "logradial" && parts.size() == 1) return SamplingDomain::log_radial(Vector::Zero(dim));
    if (kind == "logradial" && parts.size() == 3)
        return SamplingDomain::log_radial(Vector::Zero(dim), parse_number(parts[1]), parse_number(parts[2]));
    throw ParameterError("unrecognised domain spec '" + spec +
                         "' (expected box:lo:hi, ball:r, ball:c:r, logradial or logradial:rmin:rmax)");
}

// ---------------------------------------------------------------------------
// Audit

bool AuditReport::passed() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const ConditionResult& c) { return c.passed(); });
}

const ConditionResult& AuditReport::condition(const std::string& name) const {
    for (const auto& c : conditions)
        if (c.name == name) return c;
    throw ParameterError("audit report has no condition '" + name + "'");
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct SamplePoint {
    bool inside = false;
    Vector x;
    double v = 0.0;
    // Growth conditions (J1, J2); nullopt when the quotient was singular.
    std::optional<double> growth[2];
    double singular_numerator[2] = {0.0, 0.0};
    // Trace lower bounds (one for an SDE model, two for a coupled system).
    double trace[2] = {0.0, 0.0};
    double jacobian_error = 0.0;
};

class ConditionFold {
public:
    explicit ConditionFold(std::string name) { result_.name = std::move(name); result_.sup_ratio = kNegInf; }

    void violation(const Vector& x, double value, std::string note = {}) {
        ++result_.violation_count;
        if (result_.violations.size() < kMaxListedViolations)
            result_.violations.push_back(Violation{x, value, std::move(note)});
    }
    void ratio(double r) { result_.sup_ratio = std::max(result_.sup_ratio, r); }
    void counted() { ++result_.evaluated; }
    ConditionResult& result() { return result_; }

    ConditionResult finish() {
        if (result_.sup_ratio == kNegInf) result_.sup_ratio = 0.0;
        return std::move(result_);
    }

private:
    ConditionResult result_;
};

template <class Evaluate>
AuditReport run_audit(const std::string& model, const std::string& form, const AdmissibleRegion& region,
                      const LyapunovData& lyap, const SamplingDomain& domain, const AuditOptions& options,
                      const std::vector<std::string>& growth_names, const std::vector<std::string>& trace_names,
                      const std::string& jacobian_name, bool non_lipschitz, Evaluate&& evaluate) {
    if (options.samples < kMinAuditSamples)
        throw ParameterError("audit needs at least " + std::to_string(kMinAuditSamples) + " samples");

    std::vector<SamplePoint> points(options.samples);
    for_each_index(options.samples, options.execution, options.workers, [&](std::size_t i) {
        SamplePoint& p = points[i];
        p.x = domain.sample(options.seed, i);
        p.inside = region.contains(p.x);
        if (p.inside) evaluate(p);
    });

    AuditReport report;
    report.model = model;
    report.form = form;
    report.domain = domain.description();
    report.lyapunov = lyap.description;
    report.seed = options.seed;
    report.samples = options.samples;
    report.theta = lyap.theta;
    report.eta = lyap.eta;
    report.C = lyap.C;
    report.M = lyap.M;
    report.non_lipschitz_drift = non_lipschitz;

    std::vector<ConditionFold> growth;
    for (const auto& n : growth_names) growth.emplace_back(n);
    std::vector<ConditionFold> traces;
    std::vector<double> best_c(trace_names.size(), 0.0), best_m(trace_names.size(), 0.0);
    for (const auto& n : trace_names) traces.emplace_back(n);
    ConditionFold nonneg("V_nonnegative");
    ConditionFold jacobian(jacobian_name);
    double jac_worst = 0.0;
    double most_negative = 0.0;

    for (const SamplePoint& p : points) {
        if (!p.inside) {
            ++report.outside_region;
            continue;
        }
        const double scale = 1.0 + p.v;
        for (std::size_t c = 0; c < growth.size(); ++c) {
            growth[c].counted();
            if (!p.growth[c]) {
                growth[c].violation(p.x, p.singular_numerator[c], "singular quotient: V = 0, numerator != 0");
                continue;
            }
            const double j = *p.growth[c];
            growth[c].ratio(j / scale);
            if (j > lyap.C * scale) growth[c].violation(p.x, j - lyap.C * scale);
        }
        for (std::size_t c = 0; c < traces.size(); ++c) {
            traces[c].counted();
            const double tr = p.trace[c];
            if (p.v > 0.0) {
                traces[c].ratio((-tr - lyap.M) / (lyap.C * p.v));
                best_c[c] = std::max(best_c[c], (-tr - lyap.M) / p.v);
            }
            best_m[c] = std::max(best_m[c], -tr - lyap.C * p.v);
            const double bound = -lyap.M - lyap.C * p.v;
            if (tr < bound) traces[c].violation(p.x, bound - tr);
        }
        nonneg.counted();
        most_negative = std::min(most_negative, p.v);
        if (p.v < 0.0) nonneg.violation(p.x, -p.v);
        jacobian.counted();
        jac_worst = std::max(jac_worst, p.jacobian_error);
        if (!(p.jacobian_error <= 1e-6)) jacobian.violation(p.x, p.jacobian_error);
    }

    if (report.outside_region == report.samples)
        throw ParameterError("sampling domain " + report.domain + " has no points in the admissible region " +
                             region.description());

    for (auto& g : growth) {
        ConditionResult r = g.finish();
        r.empirical_C = std::max(r.sup_ratio, 0.0);
        report.conditions.push_back(std::move(r));
    }
    for (std::size_t c = 0; c < traces.size(); ++c) {
        ConditionResult r = traces[c].finish();
        r.empirical_C = best_c[c];
        r.empirical_M = best_m[c];
        report.conditions.push_back(std::move(r));
    }
    ConditionResult nn = nonneg.finish();
    nn.sup_ratio = -most_negative;
    report.conditions.push_back(std::move(nn));
    ConditionResult jr = jacobian.finish();
    jr.sup_ratio = jac_worst;
    report.conditions.push_back(std::move(jr));
    return report;
}

template <class F>
std::optional<double> guarded(F&& f, double& numerator_out, const Matrix& a, const Vector& grad) {
    try {
        return f();
    } catch (const SingularityError&) {
        numerator_out = (a.transpose() * grad).squaredNorm();
        return std::nullopt;
    }
}

}  // namespace

AuditReport audit(const SdeModel& model, const LyapunovData& lyap, const SamplingDomain& domain,
                  const AuditOptions& options) {
    if (domain.dim() != model.state_dim) throw ParameterError("domain dimension does not match the model");
    return run_audit(model.name, "sde", model.region, lyap, domain, options, {"J1", "J2"}, {"trace_lower"},
                     "diffusion_jacobian", model.non_lipschitz_drift, [&](SamplePoint& p) {
                         p.v = lyap.value(p.x);
                         const Matrix sigma = model.diffusion(p.x);
                         const Vector grad = lyap.gradient(p.x);
                         p.growth[0] = guarded([&] { return eval_J1_sde(model, lyap, p.x); }, p.singular_numerator[0],
                                               sigma, grad);
                         p.growth[1] = guarded([&] { return eval_J2_sde(model, lyap, p.x); }, p.singular_numerator[1],
                                               sigma, grad);
                         p.trace[0] = eval_trace_sde(model, lyap, p.x);
                         p.jacobian_error = jacobian_consistency_error(model.diffusion, model.diffusion_jacobian, p.x,
                                                                       model.noise_dim);
                     });
}

AuditReport audit(const CoefficientSystem& sys, const LyapunovData& lyap, const SamplingDomain& domain,
                  const AuditOptions& options) {
    if (domain.dim() != sys.state_dim) throw ParameterError("domain dimension does not match the system");
    return run_audit(sys.name, "coupled", sys.region, lyap, domain, options, {"J1", "J2"}, {"trace_c", "trace_e"},
                     "smooth_noise_jacobian", false, [&](SamplePoint& p) {
                         p.v = lyap.value(p.x);
                         const Matrix sum = sys.control(p.x) + sys.smooth_noise(p.x) + sys.ito_noise(p.x);
                         const Vector grad = lyap.gradient(p.x);
                         p.growth[0] = guarded([&] { return eval_J1_general(sys, lyap, p.x); },
                                               p.singular_numerator[0], sum, grad);
                         p.growth[1] = guarded([&] { return eval_J2_general(sys, lyap, p.x); },
                                               p.singular_numerator[1], sum, grad);
                         p.trace[0] = eval_trace_general(sys, lyap, p.x);
                         p.trace[1] = eval_trace_limit(sys, lyap, p.x);
                         p.jacobian_error = jacobian_consistency_error(sys.smooth_noise, sys.smooth_noise_jacobian,
                                                                       p.x, sys.noise_dim);
                     });
}

LyapunovData finite_difference_lyapunov(std::string description, ScalarField v) {
    LyapunovData lyap;
    lyap.description = std::move(description);
    lyap.value = v;
    lyap.gradient = [v](const Vector& x) -> Vector {
        Vector g(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double h = 1e-5 * (1.0 + std::abs(x[i]));
            Vector up = x, down = x;
            up[i] += h;
            down[i] -= h;
            g[i] = (v(up) - v(down)) / (up[i] - down[i]);
        }
        return g;
    };
    lyap.hessian = [v](const Vector& x) -> Matrix {
        const Eigen::Index m = x.size();
        Matrix hess(m, m);
        const double centre = v(x);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double hi = 1e-4 * (1.0 + std::abs(x[i]));
            Vector up = x, down = x;
            up[i] += hi;
            down[i] -= hi;
            hess(i, i) = (v(up) - 2.0 * centre + v(down)) / (hi * hi);
            for (Eigen::Index j = i + 1; j < m; ++j) {
                const double hj = 1e-4 * (1.0 + std::abs(x[j]));
                auto at = [&](double si, double sj) {
                    Vector y = x;
                    y[i] += si * hi;
                    y[j] += sj * hj;
                    return v(y);
                };
                const double mixed = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * hi * hj);
                hess(i, j) = mixed;
                hess(j, i) = mixed;
            }
        }
        return hess;
    };
    return lyap;
}

}  // namespace wzlab
