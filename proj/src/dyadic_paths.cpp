#include "wzlab/dyadic_paths.hpp"

#include "wzlab/errors.hpp"
#include "wzlab/rng.hpp"
#include "wzlab/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace wzlab {

namespace {

void check_time(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw ParameterError("time " + std::to_string(t) + " outside [0, 1]");
}

}  // namespace

DyadicWienerPath::DyadicWienerPath(int dim, int level, std::uint64_t seed, std::uint64_t stream,
                                   std::vector<double> increments)
    : dim_(dim), level_(level), seed_(seed), stream_(stream), increments_(std::move(increments)) {
    if (dim < 1) throw ParameterError("Wiener path dimension must be >= 1");
    if (level < 1 || level > kMaxLevel) throw ParameterError("Wiener path level must be in [1, 30]");
    if (increments_.size() != steps() * dim_) throw ParameterError("increment count does not match 2^level * dim");

    values_.assign((steps() + 1) * dim_, 0.0);
    for (std::size_t k = 0; k < steps(); ++k)
        for (int c = 0; c < dim_; ++c)
            values_[(k + 1) * dim_ + c] = values_[k * dim_ + c] + increments_[k * dim_ + c];
}

Vector DyadicWienerPath::evaluate(double t) const {
    check_time(t);
    const double scaled = t * static_cast<double>(steps());
    const auto k = std::min(static_cast<std::size_t>(scaled), steps() - 1);
    const double frac = scaled - static_cast<double>(k);
    Vector out(dim_);
    for (int c = 0; c < dim_; ++c) out[c] = value(k)[c] + frac * increment(k)[c];
    return out;
}

void DyadicWienerPath::write_csv(std::ostream& os) const {
    os << "t";
    for (int c = 0; c < dim_; ++c) os << ",w_" << (c + 1);
    os << '\n';
    for (std::size_t k = 0; k <= steps(); ++k) {
        os << format_double(static_cast<double>(k) * step_size());
        for (double v : value(k)) os << ',' << format_double(v);
        os << '\n';
    }
}

WienerHandle sample_wiener(int dim, int level, std::uint64_t seed, std::uint64_t stream) {
    if (dim < 1) throw ParameterError("Wiener path dimension must be >= 1");
    if (level < 1 || level > kMaxLevel) throw ParameterError("Wiener path level must be in [1, 30]");

    const std::size_t count = (std::size_t{1} << level) * static_cast<std::size_t>(dim);
    const double scale = std::sqrt(std::ldexp(1.0, -level));
    const Philox4x32 gen(seed);
    std::vector<double> increments(count);
    for (std::size_t q = 0; q < count; q += 2) {
        const auto z = normal_pair(gen, kWienerStreamBase + stream, q / 2);
        increments[q] = scale * z[0];
        if (q + 1 < count) increments[q + 1] = scale * z[1];
    }
    return std::make_shared<const DyadicWienerPath>(dim, level, seed, stream, std::move(increments));
}

WienerHandle make_wiener(int dim, int level, std::vector<double> increments) {
    return std::make_shared<const DyadicWienerPath>(dim, level, 0, 0, std::move(increments));
}

PolygonalPath::PolygonalPath(WienerHandle source, int n) : source_(std::move(source)), n_(n) {
    if (!source_) throw ParameterError("polygonal path needs a source Wiener path");
    if (n < 1 || n > source_->level())
        throw ParameterError("interpolation level " + std::to_string(n) + " must lie in [1, " +
                             std::to_string(source_->level()) + "]");

    const int d = source_->dim();
    const std::size_t stride = std::size_t{1} << (source_->level() - n_);
    const double rate = std::ldexp(1.0, n_);
    slopes_.assign((intervals() + 1) * d, 0.0);
    for (std::size_t k = 1; k <= intervals(); ++k) {
        const auto now = source_->value(k * stride);
        const auto before = source_->value((k - 1) * stride);
        for (int c = 0; c < d; ++c) slopes_[k * d + c] = rate * (now[c] - before[c]);
    }
}

std::size_t PolygonalPath::coarse_index(double t) const {
    check_time(t);
    return static_cast<std::size_t>(std::ldexp(t, n_));
}

Vector PolygonalPath::value(double t) const {
    const std::size_t k = coarse_index(t);
    const std::size_t stride = std::size_t{1} << (source_->level() - n_);
    const double offset = t - std::ldexp(static_cast<double>(k), -n_);
    const auto anchor = source_->value(k == 0 ? 0 : (k - 1) * stride);
    const auto s = slope(k);
    Vector out(dim());
    for (int c = 0; c < dim(); ++c) out[c] = anchor[c] + s[c] * offset;
    return out;
}

Vector PolygonalPath::derivative(double t) const {
    const auto s = slope(coarse_index(t));
    return Eigen::Map<const Vector>(s.data(), dim());
}

Vector PolygonalPath::value_on_fine_grid(std::size_t i) const {
    const int shift = source_->level() - n_;
    const std::size_t k = i >> shift;
    const std::size_t within = i - (k << shift);
    const double offset = std::ldexp(static_cast<double>(within), -source_->level());
    const auto anchor = source_->value(k == 0 ? 0 : (k - 1) << shift);
    const auto s = slope(k);
    Vector out(dim());
    for (int c = 0; c < dim(); ++c) out[c] = anchor[c] + s[c] * offset;
    return out;
}

PolygonalPath linearize(const WienerHandle& w, int n) { return PolygonalPath(w, n); }

CameronMartinPath::CameronMartinPath(std::vector<double> breakpoints, std::vector<Vector> slopes)
    : breakpoints_(std::move(breakpoints)), slopes_(std::move(slopes)) {
    if (breakpoints_.size() < 2) throw ParameterError("Cameron-Martin path needs at least two breakpoints");
    if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
        throw ParameterError("Cameron-Martin breakpoints must start at 0 and end at 1");
    for (std::size_t j = 1; j < breakpoints_.size(); ++j)
        if (!(breakpoints_[j] > breakpoints_[j - 1]))
            throw ParameterError("Cameron-Martin breakpoints must be strictly increasing");
    if (slopes_.size() != breakpoints_.size() - 1)
        throw ParameterError("Cameron-Martin path needs one slope per interval");
    dim_ = static_cast<int>(slopes_.front().size());
    if (dim_ < 1) throw ParameterError("Cameron-Martin path dimension must be >= 1");
    for (const auto& s : slopes_) {
        if (s.size() != dim_) throw ParameterError("Cameron-Martin slopes must share one dimension");
        if (!s.allFinite()) throw ParameterError("Cameron-Martin slopes must be finite");
    }

    nodes_.reserve(breakpoints_.size());
    nodes_.push_back(Vector::Zero(dim_));
    for (std::size_t j = 0; j < slopes_.size(); ++j)
        nodes_.push_back(nodes_.back() + slopes_[j] * (breakpoints_[j + 1] - breakpoints_[j]));
}

CameronMartinPath::CameronMartinPath(std::vector<double> breakpoints, std::vector<Vector> slopes,
                                     std::vector<Vector> nodes)
    : dim_(static_cast<int>(slopes.front().size())),
      breakpoints_(std::move(breakpoints)),
      slopes_(std::move(slopes)),
      nodes_(std::move(nodes)) {}

CameronMartinPath CameronMartinPath::zero(int dim) { return constant_slope(Vector::Zero(dim)); }

CameronMartinPath CameronMartinPath::constant_slope(const Vector& slope) {
    return CameronMartinPath({0.0, 1.0}, {slope});
}

std::size_t CameronMartinPath::interval_of(double t) const {
    check_time(t);
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    const auto j = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    return std::min(j, slopes_.size() - 1);
}

Vector CameronMartinPath::evaluate(double t) const {
    if (t == 1.0) return nodes_.back();
    const std::size_t j = interval_of(t);
    return nodes_[j] + slopes_[j] * (t - breakpoints_[j]);
}

Vector CameronMartinPath::derivative(double t) const { return slopes_[interval_of(t)]; }

double CameronMartinPath::energy() const {
    double total = 0.0;
    for (std::size_t j = 0; j < slopes_.size(); ++j)
        total += slopes_[j].squaredNorm() * (breakpoints_[j + 1] - breakpoints_[j]);
    return total;
}

bool CameronMartinPath::aligned_to_level(int level) const {
    return std::all_of(breakpoints_.begin(), breakpoints_.end(), [level](double b) {
        const double scaled = std::ldexp(b, level);
        return scaled == std::floor(scaled);
    });
}

std::vector<double> CameronMartinPath::slopes_on_grid(int level) const {
    const std::size_t steps = std::size_t{1} << level;
    std::vector<double> out(steps * dim_);
    std::size_t j = 0;
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = std::ldexp(static_cast<double>(i), -level);
        while (j + 1 < slopes_.size() && breakpoints_[j + 1] <= t) ++j;
        for (int c = 0; c < dim_; ++c) out[i * dim_ + c] = slopes_[j][c];
    }
    return out;
}

CameronMartinPath wn_as_cameron_martin(const PolygonalPath& wn) {
    const std::size_t count = wn.intervals();
    const int d = wn.dim();
    const std::size_t stride = std::size_t{1} << (wn.source()->level() - wn.level());
    std::vector<double> breakpoints(count + 1);
    std::vector<Vector> slopes(count);
    std::vector<Vector> nodes(count + 1);
    for (std::size_t k = 0; k <= count; ++k) {
        breakpoints[k] = std::ldexp(static_cast<double>(k), -wn.level());
        const auto anchor = wn.source()->value(k == 0 ? 0 : (k - 1) * stride);
        nodes[k] = Eigen::Map<const Vector>(anchor.data(), d);
        if (k < count) {
            const auto s = wn.slope(k);
            slopes[k] = Eigen::Map<const Vector>(s.data(), d);
        }
    }
    return CameronMartinPath(std::move(breakpoints), std::move(slopes), std::move(nodes));
}

}  // namespace wzlab
