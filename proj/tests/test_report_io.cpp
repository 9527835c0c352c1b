#include "wzlab/errors.hpp"
#include "wzlab/report_io.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace wzlab;
namespace pt = boost::property_tree;

namespace {

ConvergenceReport sample_report(std::size_t levels) {
    ConvergenceReport r;
    r.kind = ExperimentKind::wong_zakai;
    r.model = "cubic|skeleton";
    r.reference = "ito_limit_euler";
    r.level = 12;
    r.seed = 42;
    r.samples = 500;
    r.control = "none";
    r.x0 = {0.5};
    const double p[] = {0.256, 0.138, 0.05, 0.016};
    for (std::size_t i = 0; i < levels; ++i) {
        const auto k = static_cast<std::size_t>(p[i] * 500 + 0.5);
        r.estimates.push_back(make_estimate(2 + 2 * int(i), 0.25, 500, k, 0, {0.1, 0.2, 0.3}));
    }
    r.estimates[0].p_hat = 1.0 / 3.0;  // a value that needs all 17 digits
    judge_decreasing(r);
    return r;
}

std::filesystem::path tmp(const std::string& name) {
    std::filesystem::create_directories(WZLAB_TEST_TMP);
    return std::filesystem::path(WZLAB_TEST_TMP) / name;
}

}  // namespace

TEST(Csv, Layout) {
    std::ostringstream os;
    write_convergence_csv(sample_report(2), os);
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "n,delta,M,escaped,p_hat,ci_low,ci_high");
    EXPECT_EQ(s.find('\r'), std::string::npos);
    EXPECT_NE(s.find("\n2,0.25,500,0,0.3333333333333333,"), std::string::npos);
}

TEST(Json, ConvergenceRoundTrip) {
    const ConvergenceReport r = sample_report(4);
    const Json j = to_json(r);
    EXPECT_EQ(j["experiment"], "wong_zakai");
    EXPECT_EQ(j["metadata"]["seed"], 42);
    EXPECT_FALSE(j.contains("workers"));
    const ConvergenceReport back = convergence_from_json(Json::parse(dump(j)));
    EXPECT_EQ(dump(to_json(back)), dump(j));
    EXPECT_EQ(back.estimates[0].p_hat, 1.0 / 3.0);
}

TEST(Json, MalformedReportRejected) {
    Json j = to_json(sample_report(2));
    j.erase("estimates");
    EXPECT_THROW((void)convergence_from_json(j), ParameterError);
}

TEST(Svg, WellFormedWithMarkers) {
    const std::string svg = render_svg(sample_report(2));
    pt::ptree tree;
    std::istringstream in(svg);
    ASSERT_NO_THROW(pt::read_xml(in, tree));
    int markers = 0;
    for (const auto& [name, node] : tree.get_child("svg"))
        if (name == "g" && node.get<std::string>("<xmlattr>.class", "") == "estimate") ++markers;
    EXPECT_EQ(markers, 2);
}

TEST(Svg, DeterministicBytes) {
    const auto a = tmp("a.svg"), b = tmp("b.svg");
    emit_plot(sample_report(4), a.string());
    emit_plot(sample_report(4), b.string());
    std::ifstream fa(a), fb(b);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_FALSE(sa.str().empty());
}

TEST(Svg, LabelsRoundTripCsv) {
    const ConvergenceReport r = sample_report(4);
    const std::string svg = render_svg(r);
    std::ostringstream csv;
    write_convergence_csv(r, csv);
    // p_hat column of the CSV.
    std::vector<double> from_csv;
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        from_csv.push_back(std::stod(cells.at(4)));
    }
    std::vector<double> from_svg;
    const std::regex label(R"(<text class="value"[^>]*>([^<]+)</text>)");
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), label); it != std::sregex_iterator(); ++it)
        from_svg.push_back(std::stod((*it)[1].str()));
    EXPECT_EQ(from_svg, from_csv);
}

TEST(Svg, Errors) {
    EXPECT_THROW((void)render_svg(sample_report(1)), ParameterError);
    EXPECT_THROW(emit_plot(sample_report(2), "/nonexistent-dir/x/plot.svg"), ParameterError);
}
