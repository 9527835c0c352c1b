#pragma once

#include "wzlab/experiments.hpp"
#include "wzlab/lyapunov.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>

namespace wzlab {

using Json = nlohmann::ordered_json;

[[nodiscard]] Json to_json(const ConvergenceReport& r);
[[nodiscard]] Json to_json(const TruncationReport& r);
[[nodiscard]] Json to_json(const AuditReport& r);

[[nodiscard]] ConvergenceReport convergence_from_json(const Json& j);

/// Columns n, delta, M, escaped, p_hat, ci_low, ci_high.
void write_convergence_csv(const ConvergenceReport& r, std::ostream& os);

/// JSON text with a trailing newline, doubles at shortest round-trip precision.
[[nodiscard]] std::string dump(const Json& j);

/// SVG line chart of p_hat against n with CI whiskers. Each marker carries
/// its exact p_hat as a text label. Needs at least two levels.
[[nodiscard]] std::string render_svg(const ConvergenceReport& r);
void emit_plot(const ConvergenceReport& r, const std::string& path);

}  // namespace wzlab
