#pragma once

#include "wzlab/coefficients.hpp"
#include "wzlab/dyadic_paths.hpp"
#include "wzlab/parallel.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wzlab {

/// Two-sided 95% Wilson score interval for `successes` out of `trials`.
struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};
[[nodiscard]] WilsonInterval wilson_interval(std::size_t successes, std::size_t trials);

inline constexpr double kWilsonZ = 1.959963984540054;
/// Escape fraction above which an experiment is inconclusive.
inline constexpr double kInconclusiveEscapeFraction = 0.2;

enum class ExperimentKind { wong_zakai, support_upper, support_lower, truncation };
enum class Verdict { pass, fail, inconclusive };

[[nodiscard]] std::string to_string(ExperimentKind k);
[[nodiscard]] std::string to_string(Verdict v);
[[nodiscard]] ExperimentKind parse_experiment_kind(const std::string& s);
[[nodiscard]] Verdict parse_verdict(const std::string& s);

/// Monte Carlo estimate of P(event) at one dyadic level. The event is
/// "distance > threshold" for exceedance experiments and "distance < threshold"
/// for support_lower; escaped or non-finite samples are excluded from p_hat.
struct ExceedanceEstimate {
    int n = 0;
    double threshold = 0.0;
    std::size_t samples = 0;
    std::size_t event_count = 0;
    std::size_t escaped_count = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    double median_distance = 0.0;

    [[nodiscard]] std::size_t valid() const noexcept { return samples - escaped_count; }
};

[[nodiscard]] ExceedanceEstimate make_estimate(int n, double threshold, std::size_t samples,
                                               std::size_t event_count, std::size_t escaped_count,
                                               std::vector<double> valid_distances);

struct ConvergenceReport {
    ExperimentKind kind = ExperimentKind::wong_zakai;
    std::string event = "exceed";  // or "within"
    std::string model;
    std::string reference;  // how the comparison path was produced
    int level = 12;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::string control;  // description of h
    std::vector<double> x0;
    std::vector<ExceedanceEstimate> estimates;
    Verdict verdict = Verdict::fail;
    std::string verdict_reason;

    [[nodiscard]] double max_escape_fraction() const;
};

/// Shared Monte Carlo settings. Sample s uses Brownian stream s of `seed`.
struct MonteCarloOptions {
    std::vector<int> levels{2, 4, 6, 8};
    std::size_t samples = 500;
    int level = 12;  // L, fine Brownian grid
    std::uint64_t seed = 0;
    Execution execution = Execution::parallel;
    int workers = 0;
};

/// Pass rule for exceedance sequences: no level-to-level rise beyond CI
/// overlap, and a final estimate below half the first when the first is >= 0.1.
/// Sets verdict and verdict_reason.
void judge_decreasing(ConvergenceReport& report);

/// P(|Y^n - Z| > delta) per level, Y^n and Z driven by the same W.
[[nodiscard]] ConvergenceReport wong_zakai_convergence(const CoefficientSystem& sys,
                                                       const std::optional<CameronMartinPath>& h, const Vector& x0,
                                                       double delta, const MonteCarloOptions& options);

enum class UpperReference {
    euler,       // X by Euler-Maruyama on (b, sigma)
    linear_exact // X by the exponential integrator; needs SdeModel::linear
};

/// P(|X - S(w^n)| > delta) per level.
[[nodiscard]] ConvergenceReport support_upper(const SdeModel& model, double delta, const MonteCarloOptions& options,
                                              UpperReference reference = UpperReference::euler);

/// P(|X(w - w^n + h) - S(h)| < epsilon) per level; pass iff the lower 95%
/// bound at the finest level is positive.
[[nodiscard]] ConvergenceReport support_lower(const SdeModel& model, const CameronMartinPath& h, double epsilon,
                                              const MonteCarloOptions& options);

struct TruncationRow {
    double radius = 0.0;
    std::size_t seeds = 0;
    std::size_t covered = 0;   // untruncated path completed with sup norm <= R
    std::size_t failures = 0;  // covered seeds whose truncated run differed
};

struct TruncationReport {
    std::string model;
    int n = 0;
    int level = 12;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::string control;
    std::vector<double> x0;
    std::vector<TruncationRow> rows;
    Verdict verdict = Verdict::fail;
    std::string verdict_reason;
};

/// For each seed and radius, checks that a path of Y^n staying in ball(R)
/// is reproduced bit-for-bit by the truncated system. Uses options.levels[0] as n.
[[nodiscard]] TruncationReport truncation_consistency(const CoefficientSystem& sys,
                                                      const std::optional<CameronMartinPath>& h, const Vector& x0,
                                                      const std::vector<double>& radii,
                                                      const MonteCarloOptions& options);

[[nodiscard]] std::string describe(const std::optional<CameronMartinPath>& h);

}  // namespace wzlab
