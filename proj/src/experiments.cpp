#include "wzlab/experiments.hpp"

#include "wzlab/errors.hpp"
#include "wzlab/integrators.hpp"
#include "wzlab/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wzlab {

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials) {
    if (trials == 0) return {0.0, 1.0};
    if (successes > trials) throw ParameterError("Wilson interval: successes exceed trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = kWilsonZ * kWilsonZ;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    WilsonInterval ci{std::clamp(centre - half, 0.0, p), std::clamp(centre + half, p, 1.0)};
    if (successes == 0) ci.low = 0.0;
    if (successes == trials) ci.high = 1.0;
    return ci;
}

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::wong_zakai: return "wong_zakai";
        case ExperimentKind::support_upper: return "support_upper";
        case ExperimentKind::support_lower: return "support_lower";
        case ExperimentKind::truncation: return "truncation";
    }
    return "unknown";
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
    for (auto k : {ExperimentKind::wong_zakai, ExperimentKind::support_upper, ExperimentKind::support_lower,
                   ExperimentKind::truncation})
        if (to_string(k) == s) return k;
    throw ParameterError("unknown experiment kind '" + s + "'");
}

Verdict parse_verdict(const std::string& s) {
    for (auto v : {Verdict::pass, Verdict::fail, Verdict::inconclusive})
        if (to_string(v) == s) return v;
    throw ParameterError("unknown verdict '" + s + "'");
}

ExceedanceEstimate make_estimate(int n, double threshold, std::size_t samples, std::size_t event_count,
                                 std::size_t escaped_count, std::vector<double> valid_distances) {
    ExceedanceEstimate e;
    e.n = n;
    e.threshold = threshold;
    e.samples = samples;
    e.event_count = event_count;
    e.escaped_count = escaped_count;
    const std::size_t valid = samples - escaped_count;
    e.p_hat = valid ? static_cast<double>(event_count) / static_cast<double>(valid) : 0.0;
    const auto ci = wilson_interval(event_count, valid);
    e.ci_low = ci.low;
    e.ci_high = ci.high;
    if (valid_distances.empty()) {
        e.median_distance = std::numeric_limits<double>::quiet_NaN();
    } else {
        std::sort(valid_distances.begin(), valid_distances.end());
        const std::size_t mid = valid_distances.size() / 2;
        e.median_distance = valid_distances.size() % 2
                                ? valid_distances[mid]
                                : 0.5 * (valid_distances[mid - 1] + valid_distances[mid]);
    }
    return e;
}

double ConvergenceReport::max_escape_fraction() const {
    double worst = 0.0;
    for (const auto& e : estimates)
        if (e.samples) worst = std::max(worst, static_cast<double>(e.escaped_count) / static_cast<double>(e.samples));
    return worst;
}

std::string describe(const std::optional<CameronMartinPath>& h) {
    if (!h) return "none";
    std::ostringstream os;
    os << "breakpoints=[";
    for (std::size_t j = 0; j < h->breakpoints().size(); ++j)
        os << (j ? "," : "") << format_double(h->breakpoints()[j]);
    os << "] slopes=[";
    for (std::size_t j = 0; j < h->slopes().size(); ++j) {
        os << (j ? "," : "") << "[";
        for (Eigen::Index c = 0; c < h->slopes()[j].size(); ++c)
            os << (c ? "," : "") << format_double(h->slopes()[j][c]);
        os << "]";
    }
    os << "]";
    return os.str();
}

namespace {

void validate(const MonteCarloOptions& o, double threshold, const char* threshold_name, bool need_margin = true) {
    if (o.levels.empty()) throw ParameterError("at least one level is required");
    for (std::size_t i = 0; i < o.levels.size(); ++i) {
        if (o.levels[i] < 1) throw ParameterError("levels must be positive");
        if (i && o.levels[i] <= o.levels[i - 1]) throw ParameterError("levels must be strictly increasing");
    }
    if (need_margin && o.levels.back() + 4 > o.level)
        throw ParameterError("max(levels) + 4 must not exceed L = " + std::to_string(o.level));
    if (o.level < 1 || o.level > kMaxLevel) throw ParameterError("L must be in [1, 30]");
    if (o.samples < 100) throw ParameterError("at least 100 Monte Carlo samples are required");
    if (!(threshold > 0.0) || !std::isfinite(threshold))
        throw ParameterError(std::string(threshold_name) + " must be positive");
}

/// distances[level][sample], +inf marking an escaped or non-finite sample.
using DistanceTable = std::vector<std::vector<double>>;

template <class PerSample>
DistanceTable gather(const MonteCarloOptions& o, PerSample&& per_sample) {
    DistanceTable table(o.levels.size(), std::vector<double>(o.samples));
    for_each_index(o.samples, o.execution, o.workers, [&](std::size_t s) {
        const std::vector<double> row = per_sample(s);
        for (std::size_t l = 0; l < row.size(); ++l) table[l][s] = row[l];
    });
    return table;
}

template <class Event>
std::vector<ExceedanceEstimate> summarise(const MonteCarloOptions& o, const DistanceTable& table, double threshold,
                                          Event&& event) {
    std::vector<ExceedanceEstimate> out;
    for (std::size_t l = 0; l < o.levels.size(); ++l) {
        std::size_t hits = 0, escaped = 0;
        std::vector<double> valid;
        for (double dist : table[l]) {
            if (!std::isfinite(dist)) {
                ++escaped;
                continue;
            }
            valid.push_back(dist);
            if (event(dist, threshold)) ++hits;
        }
        out.push_back(make_estimate(o.levels[l], threshold, o.samples, hits, escaped, std::move(valid)));
    }
    return out;
}

bool exceeds(double dist, double delta) { return dist > delta; }
bool within(double dist, double eps) { return dist < eps; }

ConvergenceReport base_report(ExperimentKind kind, std::string model, const MonteCarloOptions& o,
                              const std::optional<CameronMartinPath>& h, const Vector& x0) {
    ConvergenceReport r;
    r.kind = kind;
    r.model = std::move(model);
    r.level = o.level;
    r.seed = o.seed;
    r.samples = o.samples;
    r.control = describe(h);
    r.x0.assign(x0.data(), x0.data() + x0.size());
    return r;
}

bool escape_limited(ConvergenceReport& r) {
    if (r.max_escape_fraction() > kInconclusiveEscapeFraction) {
        r.verdict = Verdict::inconclusive;
        r.verdict_reason = "escape fraction " + format_double(r.max_escape_fraction()) + " exceeds " +
                           format_double(kInconclusiveEscapeFraction);
        return true;
    }
    return false;
}

WienerHandle sample_path(int dim, const MonteCarloOptions& o, std::size_t s) {
    return sample_wiener(dim, o.level, o.seed, s);
}

void require_coupled(const PolygonalPath& wn, const WienerHandle& w) {
    if (wn.source().get() != w.get()) throw ParameterError("coupling violated: W^n not built from this sample's W");
}

}  // namespace

void judge_decreasing(ConvergenceReport& r) {
    if (escape_limited(r)) return;
    const auto& e = r.estimates;
    for (std::size_t i = 1; i < e.size(); ++i) {
        if (e[i].ci_low > e[i - 1].ci_high) {
            r.verdict = Verdict::fail;
            r.verdict_reason = "p_hat rises from n=" + std::to_string(e[i - 1].n) + " to n=" + std::to_string(e[i].n) +
                               " beyond CI overlap";
            return;
        }
    }
    if (e.size() >= 2 && e.front().p_hat >= 0.1 && !(e.back().p_hat < 0.5 * e.front().p_hat)) {
        r.verdict = Verdict::fail;
        r.verdict_reason = "final p_hat " + format_double(e.back().p_hat) + " is not below half the initial " +
                           format_double(e.front().p_hat);
        return;
    }
    r.verdict = Verdict::pass;
    r.verdict_reason = "p_hat non-increasing within CI overlap";
}

ConvergenceReport wong_zakai_convergence(const CoefficientSystem& sys, const std::optional<CameronMartinPath>& h,
                                         const Vector& x0, double delta, const MonteCarloOptions& o) {
    validate(o, delta, "delta");
    const auto table = gather(o, [&](std::size_t s) {
        const WienerHandle w = sample_path(sys.noise_dim, o, s);
        const Trajectory z = integrate_ito_limit(sys, DriverBundle(w, std::nullopt, h), x0);
        std::vector<double> row;
        for (int n : o.levels) {
            PolygonalPath wn(w, n);
            require_coupled(wn, w);
            const Trajectory y = integrate_mixed(sys, DriverBundle(w, std::move(wn), h), x0);
            row.push_back(sup_distance(y, z));
        }
        return row;
    });
    ConvergenceReport r = base_report(ExperimentKind::wong_zakai, sys.name, o, h, x0);
    r.reference = "ito_limit_euler";
    r.estimates = summarise(o, table, delta, exceeds);
    judge_decreasing(r);
    return r;
}

ConvergenceReport support_upper(const SdeModel& model, double delta, const MonteCarloOptions& o,
                                UpperReference reference) {
    validate(o, delta, "delta", false);
    if (reference == UpperReference::linear_exact && !model.linear)
        throw ParameterError("exact linear reference needs an affine-drift, constant-noise model");
    const auto table = gather(o, [&](std::size_t s) {
        const WienerHandle w = sample_path(model.noise_dim, o, s);
        const Trajectory x = reference == UpperReference::linear_exact
                                 ? solve_linear_sde(*model.linear, w, model.x0[0])
                                 : integrate_sde(model, w, model.x0);
        std::vector<double> row;
        for (int n : o.levels) {
            const PolygonalPath wn(w, n);
            require_coupled(wn, w);
            row.push_back(sup_distance(x, solve_skeleton_wn(model, wn, model.x0)));
        }
        return row;
    });
    ConvergenceReport r = base_report(ExperimentKind::support_upper, model.name, o, std::nullopt, model.x0);
    r.reference = reference == UpperReference::linear_exact ? "linear_exact" : "euler";
    r.estimates = summarise(o, table, delta, exceeds);
    judge_decreasing(r);
    return r;
}

ConvergenceReport support_lower(const SdeModel& model, const CameronMartinPath& h, double epsilon,
                                const MonteCarloOptions& o) {
    validate(o, epsilon, "epsilon");
    const Trajectory target = solve_skeleton(model, h, model.x0, o.level);
    if (!target.completed()) throw ParameterError("skeleton S(h) did not complete: " + to_string(target.status()));
    const auto table = gather(o, [&](std::size_t s) {
        const WienerHandle w = sample_path(model.noise_dim, o, s);
        std::vector<double> row;
        for (int n : o.levels) {
            PolygonalPath wn(w, n);
            require_coupled(wn, w);
            const Trajectory xn = integrate_shifted(model, DriverBundle(w, std::move(wn), h), model.x0);
            row.push_back(sup_distance(xn, target));
        }
        return row;
    });
    ConvergenceReport r = base_report(ExperimentKind::support_lower, model.name, o, h, model.x0);
    r.event = "within";
    r.reference = "skeleton_rk4";
    r.estimates = summarise(o, table, epsilon, within);
    if (escape_limited(r)) return r;
    const auto& last = r.estimates.back();
    if (last.ci_low > 0.0) {
        r.verdict = Verdict::pass;
        r.verdict_reason = "lower 95% bound at n=" + std::to_string(last.n) + " is " + format_double(last.ci_low);
    } else {
        r.verdict = Verdict::fail;
        r.verdict_reason = "no sample within epsilon at n=" + std::to_string(last.n);
    }
    return r;
}

TruncationReport truncation_consistency(const CoefficientSystem& sys, const std::optional<CameronMartinPath>& h,
                                        const Vector& x0, const std::vector<double>& radii,
                                        const MonteCarloOptions& o) {
    if (o.levels.empty()) throw ParameterError("truncation experiment needs a level n");
    const int n = o.levels.front();
    if (n + 4 > o.level) throw ParameterError("n + 4 must not exceed L");
    if (radii.empty()) throw ParameterError("at least one radius is required");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw ParameterError("radii must be positive");
        if (i && !(radii[i] > radii[i - 1])) throw ParameterError("radii must be strictly increasing");
    }
    if (o.samples == 0) throw ParameterError("at least one seed is required");

    std::vector<CoefficientSystem> truncated;
    for (double r : radii) truncated.push_back(truncate_system(sys, r));

    // outcome[s][r]: 0 = not covered, 1 = covered and equal, 2 = covered and different.
    std::vector<std::vector<int>> outcome(o.samples, std::vector<int>(radii.size(), 0));
    for_each_index(o.samples, o.execution, o.workers, [&](std::size_t s) {
        const WienerHandle w = sample_path(sys.noise_dim, o, s);
        const DriverBundle drivers(w, PolygonalPath(w, n), h);
        const Trajectory y = integrate_mixed(sys, drivers, x0);
        if (!y.completed()) return;
        const double sup = y.sup_norm();
        for (std::size_t r = 0; r < radii.size(); ++r) {
            if (sup > radii[r]) continue;
            const Trajectory yr = integrate_mixed(truncated[r], drivers, x0);
            outcome[s][r] = (yr.completed() && yr.raw() == y.raw()) ? 1 : 2;
        }
    });

    TruncationReport rep;
    rep.model = sys.name;
    rep.n = n;
    rep.level = o.level;
    rep.seed = o.seed;
    rep.samples = o.samples;
    rep.control = describe(h);
    rep.x0.assign(x0.data(), x0.data() + x0.size());
    std::size_t failures = 0;
    for (std::size_t r = 0; r < radii.size(); ++r) {
        TruncationRow row;
        row.radius = radii[r];
        row.seeds = o.samples;
        for (std::size_t s = 0; s < o.samples; ++s) {
            if (outcome[s][r] >= 1) ++row.covered;
            if (outcome[s][r] == 2) ++row.failures;
        }
        failures += row.failures;
        rep.rows.push_back(row);
    }
    rep.verdict = failures == 0 ? Verdict::pass : Verdict::fail;
    rep.verdict_reason = failures == 0 ? "every covered seed reproduced exactly"
                                       : std::to_string(failures) + " covered seeds differed from the truncated run";
    return rep;
}

}  // namespace wzlab
