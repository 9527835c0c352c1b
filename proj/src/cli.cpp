#include "wzlab/cli.hpp"

#include "wzlab/errors.hpp"
#include "wzlab/experiments.hpp"
#include "wzlab/expression.hpp"
#include "wzlab/integrators.hpp"
#include "wzlab/models.hpp"
#include "wzlab/report_io.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

namespace wzlab::cli {

namespace {

namespace fs = std::filesystem;

enum class Kind { text, integer, seed, number, numbers, integers, params, control };

struct Key {
    std::string name;
    Kind kind;
    std::string help;
};

struct Command {
    std::string name;
    std::string help;
    std::vector<Key> keys;
    Json defaults;
};

const Key k_model{"model", Kind::text, "builtin model name"};
const Key k_params{"params", Kind::params, "model parameter, repeatable"};
const Key k_x0{"x0", Kind::numbers, "initial state, comma separated"};
const Key k_level{"L", Kind::integer, "fine Brownian level"};
const Key k_seed{"seed", Kind::seed, "RNG seed (default from WZ_LAB_SEED, else 0)"};
const Key k_levels{"levels", Kind::integers, "dyadic levels n, comma separated"};
const Key k_delta{"delta", Kind::number, "exceedance threshold"};
const Key k_samples_mc{"M", Kind::integer, "Monte Carlo sample count"};
const Key k_variant{"variant", Kind::text, "reduction of (b, sigma): skeleton or shifted"};
const Key k_control{"h", Kind::control, "control path: slope, slope vector, or 't0,..,1:s1;s2;..'"};
const Key k_workers{"workers", Kind::integer, "cap on concurrent samples (0 = OpenMP default)"};
const Key k_out{"out", Kind::text, "primary output file"};

std::vector<Command> make_commands() {
    std::vector<Command> c;
    c.push_back({"simulate",
                 "Euler-Maruyama path of the SDE on the level-L grid, written as CSV",
                 {k_model, k_params, k_x0, k_level, k_seed, k_out},
                 {{"model", "cubic"}, {"L", 12}, {"out", "trajectory.csv"}}});
    c.push_back({"skeleton",
                 "RK4 solution of the skeleton equation driven by h, written as CSV",
                 {k_model, k_params, k_x0, k_level, k_control, k_out},
                 {{"model", "cubic"}, {"L", 12}, {"h", nullptr}, {"out", "skeleton.csv"}}});
    c.push_back({"wong-zakai",
                 "exceedance probabilities P(|Y^n - Z| > delta) over dyadic levels",
                 {k_model, k_params, k_x0, k_variant, k_control, k_levels, k_delta, k_samples_mc, k_level, k_seed,
                  k_workers, k_out},
                 {{"model", "cubic"},
                  {"variant", "skeleton"},
                  {"h", nullptr},
                  {"levels", {2, 4, 6, 8}},
                  {"delta", 0.25},
                  {"M", 500},
                  {"L", 12},
                  {"workers", 0},
                  {"out", "wong_zakai.json"}}});
    c.push_back({"support-upper",
                 "exceedance probabilities P(|X - S(w^n)| > delta) over dyadic levels",
                 {k_model, k_params, k_x0, k_levels, k_delta, k_samples_mc, k_level, k_seed,
                  {"reference", Kind::text, "X oracle: auto, euler or linear_exact"}, k_workers, k_out},
                 {{"model", "cubic"},
                  {"levels", {3, 5, 7}},
                  {"delta", 0.25},
                  {"M", 300},
                  {"L", 12},
                  {"reference", "auto"},
                  {"workers", 0},
                  {"out", "support_upper.json"}}});
    c.push_back({"support-lower",
                 "probabilities P(|X(w - w^n + h) - S(h)| < epsilon) over dyadic levels",
                 {k_model, k_params, k_x0, k_control, k_levels, {"epsilon", Kind::number, "tube radius"},
                  k_samples_mc, k_level, k_seed, k_workers, k_out},
                 {{"model", "cubic"},
                  {"h", nullptr},
                  {"levels", {3, 5, 7}},
                  {"epsilon", 0.3},
                  {"M", 300},
                  {"L", 12},
                  {"workers", 0},
                  {"out", "support_lower.json"}}});
    c.push_back({"truncation",
                 "step-for-step agreement of Y^n with its theta_R truncation on paths inside ball(R)",
                 {k_model, k_params, k_x0, k_variant, k_control, {"n", Kind::integer, "dyadic level"},
                  {"radii", Kind::numbers, "truncation radii R, comma separated"}, k_samples_mc, k_level, k_seed,
                  k_workers, k_out},
                 {{"model", "cubic"},
                  {"variant", "skeleton"},
                  {"h", nullptr},
                  {"n", 4},
                  {"radii", {1, 2, 4}},
                  {"M", 100},
                  {"L", 12},
                  {"workers", 0},
                  {"out", "truncation.json"}}});
    c.push_back({"lyapunov",
                 "randomized audit of the Lyapunov growth and trace conditions",
                 {k_model, k_params,
                  {"equation", Kind::text, "sde (b, sigma) or coupled (reduced system)"},
                  k_variant,
                  {"V", Kind::text, "Lyapunov function as an expression in x1..xm (default: the model's)"},
                  {"theta", Kind::number, "theta"},
                  {"eta", Kind::number, "eta"},
                  {"C", Kind::number, "growth constant C"},
                  {"M", Kind::number, "trace constant M"},
                  {"domain", Kind::text, "box:lo:hi, ball:r, ball:c:r, logradial[:rmin:rmax]"},
                  {"samples", Kind::integer, "audit points"},
                  k_seed,
                  k_workers,
                  k_out},
                 {{"model", "cubic"},
                  {"equation", "sde"},
                  {"variant", "skeleton"},
                  {"V", nullptr},
                  {"samples", 2000},
                  {"workers", 0},
                  {"out", "audit.json"}}});
    c.push_back({"plot",
                 "SVG chart of a convergence report",
                 {{"in", Kind::text, "report JSON written by an experiment"}, {"out", Kind::text, "SVG path"}},
                 {{"out", "plot.svg"}}});
    return c;
}

// ---- conversion of flag text -------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& what) {
    const std::string s = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ParameterError(what + ": '" + text + "' is not a number");
    return v;
}

long long parse_integer(const std::string& text, const std::string& what) {
    const std::string s = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ParameterError(what + ": '" + text + "' is not an integer");
    return v;
}

Json number_list(const std::string& text, const std::string& what) {
    Json arr = Json::array();
    if (trim(text).empty()) return arr;
    for (const auto& part : split(text, ',')) arr.push_back(parse_number(part, what));
    return arr;
}

Json control_from_text(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty() || s == "none") return nullptr;
    const auto colon = s.find(':');
    if (colon == std::string::npos) {
        Json slope = number_list(s, "--h");
        return slope.size() == 1 ? slope[0] : slope;
    }
    Json obj{{"breakpoints", number_list(s.substr(0, colon), "--h breakpoints")}, {"slopes", Json::array()}};
    for (const auto& piece : split(s.substr(colon + 1), ';')) obj["slopes"].push_back(number_list(piece, "--h slopes"));
    return obj;
}

Json flag_to_json(const Key& key, const std::vector<std::string>& values) {
    const std::string what = "--" + key.name;
    const std::string& v = values.back();
    switch (key.kind) {
        case Kind::text: return v;
        case Kind::integer: return parse_integer(v, what);
        case Kind::seed: {
            const long long s = parse_integer(v, what);
            if (s < 0) throw ParameterError(what + " must be non-negative");
            return static_cast<std::uint64_t>(s);
        }
        case Kind::number: return parse_number(v, what);
        case Kind::numbers: return number_list(v, what);
        case Kind::integers: {
            Json arr = Json::array();
            for (const auto& part : split(v, ',')) arr.push_back(parse_integer(part, what));
            return arr;
        }
        case Kind::params: {
            Json obj = Json::object();
            for (const auto& item : values) {
                const auto eq = item.find('=');
                if (eq == std::string::npos || eq == 0)
                    throw ParameterError("--param expects key=value, got '" + item + "'");
                Json vals = number_list(item.substr(eq + 1), "--param " + item.substr(0, eq));
                obj[trim(item.substr(0, eq))] = vals.size() == 1 ? vals[0] : vals;
            }
            return obj;
        }
        case Kind::control: return control_from_text(v);
    }
    return nullptr;
}

// ---- configuration file ----------------------------------------------------

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

class ConfigError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

[[noreturn]] void config_error(const std::string& path, const std::string& text, const std::string& key,
                               const std::string& message) {
    const auto pos = text.find("\"" + key + "\"");
    if (pos == std::string::npos) throw ConfigError(path + ": " + message);
    const auto [line, col] = line_column(text, pos);
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + message);
}

bool is_number_array(const Json& j) {
    if (!j.is_array()) return false;
    for (const auto& e : j)
        if (!e.is_number()) return false;
    return true;
}

// Returns an empty string when `value` has the expected shape.
std::string shape_problem(Kind kind, const Json& value) {
    switch (kind) {
        case Kind::text: return value.is_string() || value.is_null() ? "" : "expected a string";
        case Kind::integer: return value.is_number_integer() ? "" : "expected an integer";
        case Kind::seed: return value.is_number_unsigned() ? "" : "expected a non-negative integer";
        case Kind::number: return value.is_number() ? "" : "expected a number";
        case Kind::numbers: return is_number_array(value) ? "" : "expected an array of numbers";
        case Kind::integers: {
            if (!value.is_array()) return "expected an array of integers";
            for (const auto& e : value)
                if (!e.is_number_integer()) return "expected an array of integers";
            return "";
        }
        case Kind::params: {
            if (!value.is_object()) return "expected an object of numbers or number arrays";
            for (const auto& [k, v] : value.items())
                if (!v.is_number() && !is_number_array(v)) return "parameter '" + k + "' must be a number or array";
            return "";
        }
        case Kind::control: {
            if (value.is_null() || value.is_number() || is_number_array(value)) return "";
            if (value.is_object() && value.contains("breakpoints") && value.contains("slopes") && value.size() == 2 &&
                is_number_array(value["breakpoints"]) && value["slopes"].is_array())
                return "";
            return "expected null, a slope, a slope array or {\"breakpoints\": [...], \"slopes\": [...]}";
        }
    }
    return "";
}

Json load_config(const std::string& path, const Command& cmd) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
    }
    if (!doc.is_object()) throw ConfigError(path + ":1:1: top level must be an object");
    for (const auto& [name, value] : doc.items()) {
        if (name == "command") {
            if (!value.is_string() || value.get<std::string>() != cmd.name)
                config_error(path, text, name, "config is for command " + value.dump() + ", not '" + cmd.name + "'");
            continue;
        }
        const auto it = std::find_if(cmd.keys.begin(), cmd.keys.end(), [&](const Key& k) { return k.name == name; });
        if (it == cmd.keys.end()) config_error(path, text, name, "unknown key '" + name + "' for " + cmd.name);
        if (const std::string problem = shape_problem(it->kind, value); !problem.empty())
            config_error(path, text, name, "key '" + name + "': " + problem);
    }
    doc.erase("command");
    return doc;
}

// ---- building library objects from resolved settings ------------------------

ParamMap params_from_json(const Json& j) {
    ParamMap out;
    if (j.is_null()) return out;
    for (const auto& [k, v] : j.items())
        out[k] = v.is_number() ? std::vector<double>{v.get<double>()} : v.get<std::vector<double>>();
    return out;
}

Json params_to_json(const ParamMap& p) {
    Json obj = Json::object();
    for (const auto& [k, v] : p) obj[k] = v.size() == 1 ? Json(v[0]) : Json(v);
    return obj;
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::optional<CameronMartinPath> control_from_json(const Json& j, int dim) {
    if (j.is_null()) return std::nullopt;
    auto slope_vector = [&](const Json& s) -> Vector {
        if (s.is_number()) return Vector::Constant(dim, s.get<double>());
        if (!is_number_array(s)) throw ParameterError("h: each slope must be a number or an array of numbers");
        const Vector v = to_vector(s.get<std::vector<double>>());
        if (v.size() == 1 && dim > 1) return Vector::Constant(dim, v[0]);
        if (v.size() != dim)
            throw ParameterError("h: slope has " + std::to_string(v.size()) + " components, noise dimension is " +
                                 std::to_string(dim));
        return v;
    };
    if (j.is_object()) {
        std::vector<Vector> slopes;
        for (const auto& s : j.at("slopes")) slopes.push_back(slope_vector(s));
        return CameronMartinPath(j.at("breakpoints").get<std::vector<double>>(), std::move(slopes));
    }
    return CameronMartinPath::constant_slope(slope_vector(j));
}

Json control_to_json(const std::optional<CameronMartinPath>& h) {
    if (!h) return nullptr;
    Json slopes = Json::array();
    for (const auto& s : h->slopes()) slopes.push_back(to_std(s));
    return Json{{"breakpoints", h->breakpoints()}, {"slopes", slopes}};
}

std::uint64_t default_seed() {
    const char* env = std::getenv("WZ_LAB_SEED");
    if (env == nullptr || *env == '\0') return 0;
    const long long s = parse_integer(env, "WZ_LAB_SEED");
    if (s < 0) throw ParameterError("WZ_LAB_SEED must be non-negative");
    return static_cast<std::uint64_t>(s);
}

int as_int(const Json& j, const std::string& name) {
    const long long v = j.at(name).get<long long>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ParameterError(name + " is out of range");
    return static_cast<int>(v);
}

std::size_t as_count(const Json& j, const std::string& name) {
    const long long v = j.at(name).get<long long>();
    if (v < 0) throw ParameterError(name + " must be non-negative");
    return static_cast<std::size_t>(v);
}

MonteCarloOptions mc_options(const Json& s) {
    MonteCarloOptions o;
    if (s.contains("levels")) o.levels = s.at("levels").get<std::vector<int>>();
    o.samples = as_count(s, "M");
    o.level = as_int(s, "L");
    o.seed = s.at("seed").get<std::uint64_t>();
    o.execution = Execution::parallel;
    o.workers = as_int(s, "workers");
    if (o.workers < 0) throw ParameterError("workers must be non-negative");
    return o;
}

fs::path sibling(const fs::path& out, const std::string& name) { return out.parent_path() / name; }

void write_file(const fs::path& path, const std::string& content) {
    if (!path.parent_path().empty()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParameterError("cannot write '" + path.string() + "'");
    f << content;
    if (!f) throw ParameterError("failed writing '" + path.string() + "'");
}

int exit_for(Verdict v) {
    switch (v) {
        case Verdict::pass: return ok;
        case Verdict::inconclusive: return inconclusive;
        case Verdict::fail: return failed;
    }
    return failed;
}

// Fills model-derived settings (params with defaults, x0) back into `s`.
BuiltinModel resolve_model(Json& s, bool with_x0) {
    const std::string name = s.at("model").get<std::string>();
    const ParamMap params = params_from_json(s.value("params", Json::object()));
    Vector x0;
    if (s.contains("x0")) x0 = to_vector(s.at("x0").get<std::vector<double>>());
    BuiltinModel b = builtin(name, params, x0);
    s["params"] = params_to_json(b.params);
    if (with_x0) s["x0"] = to_std(b.model.x0);
    return b;
}

int execute(const Command& cmd, Json s, std::ostream& out) {
    const fs::path out_path = s.at("out").get<std::string>();
    auto finish = [&](const Json& settings) {
        Json resolved{{"command", cmd.name}};
        for (const auto& [k, v] : settings.items()) resolved[k] = v;
        write_file(sibling(out_path, "config.resolved.json"), dump(resolved));
    };

    if (cmd.name == "plot") {
        if (!s.contains("in") || s.at("in").is_null()) throw ParameterError("plot needs --in report.json");
        std::ifstream in(s.at("in").get<std::string>(), std::ios::binary);
        if (!in) throw ParameterError("cannot read report '" + s.at("in").get<std::string>() + "'");
        Json doc;
        try {
            doc = Json::parse(in);
        } catch (const Json::parse_error& e) {
            throw ParameterError(std::string("report is not valid JSON: ") + e.what());
        }
        emit_plot(convergence_from_json(doc), out_path.string());
        finish(s);
        out << out_path.string() << '\n';
        return ok;
    }

    const BuiltinModel b = resolve_model(s, cmd.name != "lyapunov");
    const SdeModel& model = b.model;

    if (cmd.name == "simulate") {
        const int L = as_int(s, "L");
        const auto w = sample_wiener(model.noise_dim, L, s.at("seed").get<std::uint64_t>());
        const Trajectory traj = integrate_sde(model, w, model.x0);
        std::ostringstream csv;
        traj.write_csv(csv);
        write_file(out_path, csv.str());
        finish(s);
        out << "status=" << to_string(traj.status()) << " points=" << traj.size() << " out=" << out_path.string()
            << '\n';
        return ok;
    }
    if (cmd.name == "skeleton") {
        const int L = as_int(s, "L");
        auto h = control_from_json(s.at("h"), model.noise_dim);
        if (!h) h = CameronMartinPath::zero(model.noise_dim);
        s["h"] = control_to_json(h);
        const Trajectory traj = solve_skeleton(model, *h, model.x0, L);
        std::ostringstream csv;
        traj.write_csv(csv);
        write_file(out_path, csv.str());
        finish(s);
        out << "status=" << to_string(traj.status()) << " points=" << traj.size() << " out=" << out_path.string()
            << '\n';
        return ok;
    }

    if (cmd.name == "lyapunov") {
        const int m = model.state_dim;
        LyapunovData lyap = b.lyapunov;
        if (!s.at("V").is_null()) {
            const auto expr = std::make_shared<Expression>(s.at("V").get<std::string>(), m);
            lyap = finite_difference_lyapunov(expr->source(), [expr](const Vector& x) { return (*expr)(x); });
            lyap.theta = b.lyapunov.theta;
            lyap.eta = b.lyapunov.eta;
            lyap.C = b.lyapunov.C;
            lyap.M = b.lyapunov.M;
        }
        if (s.contains("theta")) lyap.theta = s.at("theta").get<double>();
        if (s.contains("eta")) lyap.eta = s.at("eta").get<double>();
        if (s.contains("C")) lyap.C = s.at("C").get<double>();
        if (s.contains("M")) lyap.M = s.at("M").get<double>();
        s["theta"] = lyap.theta;
        s["eta"] = lyap.eta;
        s["C"] = lyap.C;
        s["M"] = lyap.M;
        if (!s.contains("domain") || s.at("domain").is_null())
            s["domain"] = model.region.kind() == AdmissibleRegion::Kind::whole_space ||
                                  model.region.kind() == AdmissibleRegion::Kind::half_space
                              ? "box:-10:10"
                              : "box:0.01:10";
        const SamplingDomain domain = parse_domain(s.at("domain").get<std::string>(), m);
        AuditOptions opts;
        opts.seed = s.at("seed").get<std::uint64_t>();
        opts.samples = as_count(s, "samples");
        opts.workers = as_int(s, "workers");
        const std::string equation = s.at("equation").get<std::string>();
        AuditReport report;
        if (equation == "sde") {
            report = audit(model, lyap, domain, opts);
        } else if (equation == "coupled") {
            report = audit(reduce_to_wz_form(model, parse_wz_variant(s.at("variant").get<std::string>())), lyap,
                           domain, opts);
        } else {
            throw ParameterError("equation must be 'sde' or 'coupled', got '" + equation + "'");
        }
        const std::string text = dump(to_json(report));
        write_file(out_path, text);
        finish(s);
        out << text;
        return report.passed() ? ok : failed;
    }

    auto persist = [&](const ConvergenceReport& r) {
        const std::string text = dump(to_json(r));
        write_file(out_path, text);
        std::ostringstream csv;
        write_convergence_csv(r, csv);
        fs::path csv_path = out_path;
        csv_path.replace_extension(".csv");
        write_file(csv_path, csv.str());
        finish(s);
        out << text;
        return exit_for(r.verdict);
    };

    const MonteCarloOptions opts = mc_options(s);
    if (cmd.name == "wong-zakai") {
        const CoefficientSystem sys = reduce_to_wz_form(model, parse_wz_variant(s.at("variant").get<std::string>()));
        const auto h = control_from_json(s.at("h"), model.noise_dim);
        s["h"] = control_to_json(h);
        return persist(wong_zakai_convergence(sys, h, model.x0, s.at("delta").get<double>(), opts));
    }
    if (cmd.name == "support-upper") {
        const std::string ref = s.at("reference").get<std::string>();
        UpperReference reference;
        if (ref == "auto")
            reference = model.linear ? UpperReference::linear_exact : UpperReference::euler;
        else if (ref == "euler")
            reference = UpperReference::euler;
        else if (ref == "linear_exact")
            reference = UpperReference::linear_exact;
        else
            throw ParameterError("reference must be auto, euler or linear_exact, got '" + ref + "'");
        s["reference"] = reference == UpperReference::linear_exact ? "linear_exact" : "euler";
        return persist(support_upper(model, s.at("delta").get<double>(), opts, reference));
    }
    if (cmd.name == "support-lower") {
        auto h = control_from_json(s.at("h"), model.noise_dim);
        if (!h) h = CameronMartinPath::zero(model.noise_dim);
        s["h"] = control_to_json(h);
        return persist(support_lower(model, *h, s.at("epsilon").get<double>(), opts));
    }
    if (cmd.name == "truncation") {
        const CoefficientSystem sys = reduce_to_wz_form(model, parse_wz_variant(s.at("variant").get<std::string>()));
        const auto h = control_from_json(s.at("h"), model.noise_dim);
        s["h"] = control_to_json(h);
        MonteCarloOptions t = opts;
        t.levels = {as_int(s, "n")};
        const TruncationReport r =
            truncation_consistency(sys, h, model.x0, s.at("radii").get<std::vector<double>>(), t);
        const std::string text = dump(to_json(r));
        write_file(out_path, text);
        finish(s);
        out << text;
        return exit_for(r.verdict);
    }
    throw ParameterError("unhandled command " + cmd.name);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const std::vector<Command> commands = make_commands();
    CLI::App app{"wz-lab: Wong-Zakai approximation and support theorem experiments for SDEs"};
    app.name(args.empty() ? "wz-lab" : args[0]);
    app.require_subcommand(1);
    // -h is taken by the control path flag
    app.set_help_flag("--help", "Print this help message and exit");

    struct Bound {
        const Command* cmd;
        CLI::App* sub;
        std::string config;
        std::map<std::string, std::vector<std::string>> values;
        std::map<std::string, CLI::Option*> options;
    };
    std::vector<std::unique_ptr<Bound>> bound;
    for (const Command& cmd : commands) {
        auto b = std::make_unique<Bound>();
        b->cmd = &cmd;
        b->sub = app.add_subcommand(cmd.name, cmd.help);
        b->sub->add_option("--config", b->config, "JSON config; flags given on the command line take precedence");
        for (const Key& key : cmd.keys) {
            const std::string flag = key.kind == Kind::params ? "--param" : "--" + key.name;
            auto* opt = b->sub->add_option(flag, b->values[key.name], key.help);
            if (key.kind == Kind::params) {
                opt->take_all();
            } else {
                opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
                opt->allow_extra_args(false);
            }
            b->options[key.name] = opt;
        }
        bound.push_back(std::move(b));
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : validation_error;
    }

    for (const auto& b : bound) {
        if (!b->sub->parsed()) continue;
        const Command& cmd = *b->cmd;
        try {
            Json s = cmd.defaults;
            bool has_seed = false;
            for (const Key& k : cmd.keys) has_seed |= k.kind == Kind::seed;
            if (has_seed) s["seed"] = default_seed();
            if (!b->config.empty()) {
                const Json file = load_config(b->config, cmd);
                for (const auto& [k, v] : file.items()) s[k] = v;
            }
            for (const Key& key : cmd.keys) {
                const auto& vals = b->values[key.name];
                if (b->options[key.name]->count() == 0 || vals.empty()) continue;
                if (key.kind == Kind::params && s.contains("params")) {
                    const Json given = flag_to_json(key, vals);
                    for (const auto& [k, v] : given.items()) s["params"][k] = v;
                } else {
                    s[key.name] = flag_to_json(key, vals);
                }
            }
            return execute(cmd, std::move(s), out);
        } catch (const std::invalid_argument& e) {
            err << "error: " << e.what() << '\n';
            return validation_error;
        } catch (const std::domain_error& e) {
            err << "error: " << e.what() << '\n';
            return validation_error;
        } catch (const Json::exception& e) {
            err << "error: " << e.what() << '\n';
            return validation_error;
        }
    }
    return validation_error;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace wzlab::cli
