#pragma once

#include "wzlab/coefficients.hpp"
#include "wzlab/parallel.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wzlab {

using ScalarField = std::function<double(const Vector&)>;

/// Lyapunov function V with its derivatives and the constants it is audited against.
struct LyapunovData {
    std::string description;
    ScalarField value;
    VectorField gradient;
    MatrixField hessian;
    double theta = 1.0;
    double eta = 1.0;
    double C = 1.0;
    double M = 1.0;
};

/// Trace(A^T hess A) for an m x d matrix A.
[[nodiscard]] double hessian_trace(const Matrix& a, const Matrix& hess);

/// |a^T grad|^2 / (eta V) with the 0/0 := 0 convention; throws SingularityError
/// when V = 0 and the numerator is not.
[[nodiscard]] double lyapunov_quotient(const Matrix& a, const Vector& grad, double v, double eta);

// Assumption on the coupled family (B, H, G, F).
[[nodiscard]] double eval_J1_general(const CoefficientSystem& sys, const LyapunovData& lyap, const Vector& x);
[[nodiscard]] double eval_J2_general(const CoefficientSystem& sys, const LyapunovData& lyap, const Vector& x);
/// Trace{H*hess H + G*hess G + F*hess F}, bounded below by -M - C V.
[[nodiscard]] double eval_trace_general(const CoefficientSystem& sys, const LyapunovData& lyap, const Vector& x);
/// Trace{H*hess H + (F+G)*hess (F+G)}.
[[nodiscard]] double eval_trace_limit(const CoefficientSystem& sys, const LyapunovData& lyap, const Vector& x);

// Specialisations for dX = b dt + sigma dW.
[[nodiscard]] double eval_J1_sde(const SdeModel& model, const LyapunovData& lyap, const Vector& x);
[[nodiscard]] double eval_J2_sde(const SdeModel& model, const LyapunovData& lyap, const Vector& x);
[[nodiscard]] double eval_trace_sde(const SdeModel& model, const LyapunovData& lyap, const Vector& x);

/// Where audit points are drawn from.
struct SamplingDomain {
    enum class Kind { box, ball, log_radial };
    Kind kind = Kind::box;
    Vector lower;   // box
    Vector upper;   // box
    Vector center;  // ball, log_radial
    double radius = 1.0;
    double min_radius = 1e-2;  // log_radial
    double max_radius = 1e2;   // log_radial

    static SamplingDomain box(Vector lower, Vector upper);
    static SamplingDomain ball(Vector center, double radius);
    static SamplingDomain log_radial(Vector center, double min_radius = 1e-2, double max_radius = 1e2);

    [[nodiscard]] int dim() const;
    [[nodiscard]] std::string description() const;
    /// Point `index` of the deterministic stream keyed by `seed`.
    [[nodiscard]] Vector sample(std::uint64_t seed, std::uint64_t index) const;
};

/// Parses "box:lo:hi", "box:lo1,lo2:hi1,hi2", "ball:r", "ball:c1,c2:r", "logradial", "logradial:rmin:rmax".
[[nodiscard]] SamplingDomain parse_domain(const std::string& spec, int dim);

struct Violation {
    Vector x;
    double value = 0.0;  // amount by which the bound is exceeded
    std::string note;
};

struct ConditionResult {
    std::string name;
    double sup_ratio = 0.0;
    std::optional<double> empirical_C;
    std::optional<double> empirical_M;
    std::size_t evaluated = 0;
    std::size_t violation_count = 0;
    std::vector<Violation> violations;  // first kMaxListedViolations, in sample order
    [[nodiscard]] bool passed() const noexcept { return violation_count == 0; }
};

struct AuditReport {
    std::string model;
    std::string form;  // "sde" or the reduced-system name
    std::string domain;
    std::string lyapunov;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::size_t outside_region = 0;
    bool non_lipschitz_drift = false;  // local Lipschitz assumption not met; growth checks still run
    double theta = 1.0, eta = 1.0, C = 1.0, M = 1.0;
    std::vector<ConditionResult> conditions;
    [[nodiscard]] bool passed() const;
    [[nodiscard]] const ConditionResult& condition(const std::string& name) const;
};

inline constexpr std::size_t kMaxListedViolations = 20;
inline constexpr std::size_t kMinAuditSamples = 1000;

struct AuditOptions {
    std::uint64_t seed = 0;
    std::size_t samples = 2000;
    Execution execution = Execution::parallel;
    int workers = 0;  // 0 = OpenMP default
};

/// Audits J1 <= C(1+V), J2 <= C(1+V), Trace >= -M - C V and V >= 0 for (b, sigma).
[[nodiscard]] AuditReport audit(const SdeModel& model, const LyapunovData& lyap, const SamplingDomain& domain,
                                const AuditOptions& options);

/// Audits conditions (b)-(e) for a coupled system (B, H, G, F).
[[nodiscard]] AuditReport audit(const CoefficientSystem& sys, const LyapunovData& lyap, const SamplingDomain& domain,
                                const AuditOptions& options);

/// Wraps a scalar V with central-difference gradient and a symmetric Hessian.
[[nodiscard]] LyapunovData finite_difference_lyapunov(std::string description, ScalarField v);

}  // namespace wzlab
