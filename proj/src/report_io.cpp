#include "wzlab/report_io.hpp"

#include "wzlab/errors.hpp"
#include "wzlab/serialization.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace wzlab {

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json vector_json(const Vector& x) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) arr.push_back(number_or_null(x[i]));
    return arr;
}

}  // namespace

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const ConvergenceReport& r) {
    Json est = Json::array();
    for (const auto& e : r.estimates) {
        est.push_back({{"n", e.n},
                       {"threshold", e.threshold},
                       {"samples", e.samples},
                       {"exceed_count", e.event_count},
                       {"escaped_count", e.escaped_count},
                       {"p_hat", e.p_hat},
                       {"ci_low", e.ci_low},
                       {"ci_high", e.ci_high},
                       {"median_distance", number_or_null(e.median_distance)}});
    }
    return Json{{"experiment", to_string(r.kind)},
                {"event", r.event},
                {"model", r.model},
                {"reference", r.reference},
                {"metadata", {{"L", r.level}, {"seed", r.seed}, {"M", r.samples}, {"h", r.control}, {"x0", r.x0}}},
                {"estimates", est},
                {"max_escape_fraction", r.max_escape_fraction()},
                {"verdict", to_string(r.verdict)},
                {"verdict_reason", r.verdict_reason}};
}

ConvergenceReport convergence_from_json(const Json& j) {
    try {
        ConvergenceReport r;
        r.kind = parse_experiment_kind(j.at("experiment").get<std::string>());
        if (r.kind == ExperimentKind::truncation) throw ParameterError("truncation reports have no p_hat series");
        r.event = j.at("event").get<std::string>();
        r.model = j.at("model").get<std::string>();
        r.reference = j.value("reference", "");
        const Json& meta = j.at("metadata");
        r.level = meta.at("L").get<int>();
        r.seed = meta.at("seed").get<std::uint64_t>();
        r.samples = meta.at("M").get<std::size_t>();
        r.control = meta.at("h").get<std::string>();
        r.x0 = meta.at("x0").get<std::vector<double>>();
        for (const Json& e : j.at("estimates")) {
            ExceedanceEstimate est;
            est.n = e.at("n").get<int>();
            est.threshold = e.at("threshold").get<double>();
            est.samples = e.at("samples").get<std::size_t>();
            est.event_count = e.at("exceed_count").get<std::size_t>();
            est.escaped_count = e.at("escaped_count").get<std::size_t>();
            est.p_hat = e.at("p_hat").get<double>();
            est.ci_low = e.at("ci_low").get<double>();
            est.ci_high = e.at("ci_high").get<double>();
            est.median_distance = e.at("median_distance").is_null() ? std::nan("")
                                                                    : e.at("median_distance").get<double>();
            r.estimates.push_back(est);
        }
        r.verdict = parse_verdict(j.at("verdict").get<std::string>());
        r.verdict_reason = j.value("verdict_reason", "");
        return r;
    } catch (const Json::exception& e) {
        throw ParameterError(std::string("malformed convergence report: ") + e.what());
    }
}

Json to_json(const TruncationReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"R", row.radius},
                        {"seeds", row.seeds},
                        {"covered", row.covered},
                        {"failures", row.failures},
                        {"coverage", static_cast<double>(row.covered) / static_cast<double>(row.seeds)}});
    return Json{{"experiment", "truncation"},
                {"model", r.model},
                {"metadata",
                 {{"n", r.n}, {"L", r.level}, {"seed", r.seed}, {"M", r.samples}, {"h", r.control}, {"x0", r.x0}}},
                {"radii", rows},
                {"verdict", to_string(r.verdict)},
                {"verdict_reason", r.verdict_reason}};
}

Json to_json(const AuditReport& r) {
    Json conditions = Json::object();
    for (const auto& c : r.conditions) {
        Json violations = Json::array();
        for (const auto& v : c.violations) {
            Json item{{"x", vector_json(v.x)}, {"value", number_or_null(v.value)}};
            if (!v.note.empty()) item["note"] = v.note;
            violations.push_back(item);
        }
        conditions[c.name] = {{"sup_ratio", number_or_null(c.sup_ratio)},
                              {"empirical_C", c.empirical_C ? number_or_null(*c.empirical_C) : Json(nullptr)},
                              {"empirical_M", c.empirical_M ? number_or_null(*c.empirical_M) : Json(nullptr)},
                              {"evaluated", c.evaluated},
                              {"violation_count", c.violation_count},
                              {"passed", c.passed()},
                              {"violations", violations}};
    }
    return Json{{"model", r.model},
                {"form", r.form},
                {"lyapunov", r.lyapunov},
                {"domain", r.domain},
                {"seed", r.seed},
                {"samples", r.samples},
                {"outside_region", r.outside_region},
                {"non_lipschitz_drift", r.non_lipschitz_drift},
                {"constants", {{"theta", r.theta}, {"eta", r.eta}, {"C", r.C}, {"M", r.M}}},
                {"conditions", conditions},
                {"passed", r.passed()}};
}

void write_convergence_csv(const ConvergenceReport& r, std::ostream& os) {
    os << "n," << (r.event == "within" ? "epsilon" : "delta") << ",M,escaped,p_hat,ci_low,ci_high\n";
    for (const auto& e : r.estimates)
        os << e.n << ',' << format_double(e.threshold) << ',' << e.samples << ',' << e.escaped_count << ','
           << format_double(e.p_hat) << ',' << format_double(e.ci_low) << ',' << format_double(e.ci_high) << '\n';
}

namespace {

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string render_svg(const ConvergenceReport& r) {
    if (r.estimates.size() < 2) throw ParameterError("plot needs a report with at least two levels");
    constexpr double width = 640, height = 400, left = 70, right = 30, top = 40, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    const double n_min = r.estimates.front().n;
    const double n_max = r.estimates.back().n;
    auto px = [&](double n) { return left + (n - n_min) / (n_max - n_min) * plot_w; };
    auto py = [&](double p) { return top + (1.0 - p) * plot_h; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "  <text x=\"" << coord(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"14\">" << esc(to_string(r.kind) + " | " + r.model + " | verdict " + to_string(r.verdict))
       << "</text>\n";
    // Axes and ticks.
    os << "  <g stroke=\"black\" stroke-width=\"1\">\n";
    os << "    <line x1=\"" << coord(left) << "\" y1=\"" << coord(top + plot_h) << "\" x2=\"" << coord(left + plot_w)
       << "\" y2=\"" << coord(top + plot_h) << "\"/>\n";
    os << "    <line x1=\"" << coord(left) << "\" y1=\"" << coord(top) << "\" x2=\"" << coord(left) << "\" y2=\""
       << coord(top + plot_h) << "\"/>\n";
    os << "  </g>\n";
    os << "  <g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double p = tick / 4.0;
        os << "    <text class=\"ytick\" x=\"" << coord(left - 8) << "\" y=\"" << coord(py(p) + 4)
           << "\" text-anchor=\"end\">" << format_double(p) << "</text>\n";
    }
    for (const auto& e : r.estimates)
        os << "    <text class=\"xtick\" x=\"" << coord(px(e.n)) << "\" y=\"" << coord(top + plot_h + 18)
           << "\" text-anchor=\"middle\">" << e.n << "</text>\n";
    os << "    <text x=\"" << coord(left + plot_w / 2) << "\" y=\"" << coord(height - 16)
       << "\" text-anchor=\"middle\">dyadic level n</text>\n";
    os << "    <text x=\"18\" y=\"" << coord(top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << coord(top + plot_h / 2) << ")\">" << (r.event == "within" ? "q_hat" : "p_hat") << "</text>\n";
    os << "  </g>\n";

    os << "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < r.estimates.size(); ++i)
        os << (i ? " " : "") << coord(px(r.estimates[i].n)) << ',' << coord(py(r.estimates[i].p_hat));
    os << "\"/>\n";

    for (const auto& e : r.estimates) {
        const std::string x = coord(px(e.n));
        os << "  <g class=\"estimate\" data-n=\"" << e.n << "\">\n";
        os << "    <line class=\"whisker\" x1=\"" << x << "\" y1=\"" << coord(py(e.ci_low)) << "\" x2=\"" << x
           << "\" y2=\"" << coord(py(e.ci_high)) << "\" stroke=\"#1f77b4\"/>\n";
        os << "    <circle class=\"marker\" cx=\"" << x << "\" cy=\"" << coord(py(e.p_hat))
           << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
        os << "    <text class=\"value\" x=\"" << coord(px(e.n) + 6) << "\" y=\"" << coord(py(e.p_hat) - 6)
           << "\" font-family=\"sans-serif\" font-size=\"10\">" << format_double(e.p_hat) << "</text>\n";
        os << "  </g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void emit_plot(const ConvergenceReport& r, const std::string& path) {
    const std::string svg = render_svg(r);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot write plot to '" + path + "'");
    out << svg;
    if (!out) throw ParameterError("failed writing plot to '" + path + "'");
}

}  // namespace wzlab
