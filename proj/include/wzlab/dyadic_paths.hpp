#pragma once

#include "wzlab/linalg.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace wzlab {

inline constexpr int kMaxLevel = 30;

/// Brownian motion sampled on the dyadic grid t_k = k / 2^level.
///
/// Values are stored as prefix sums of the increments, so value(k) is
/// exactly the running sum a caller would compute from increment(0..k-1).
/// Instances are immutable and meant to be shared through
/// std::shared_ptr<const DyadicWienerPath>; coupled processes compare the
/// pointer to prove they were driven by the same realization.
class DyadicWienerPath {
public:
    /// Takes ownership of `increments` laid out step-major (2^level rows of `dim`).
    DyadicWienerPath(int dim, int level, std::uint64_t seed, std::uint64_t stream, std::vector<double> increments);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] int level() const noexcept { return level_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }
    [[nodiscard]] std::size_t steps() const noexcept { return std::size_t{1} << level_; }
    [[nodiscard]] double step_size() const noexcept { return 1.0 / static_cast<double>(steps()); }

    [[nodiscard]] std::span<const double> increment(std::size_t step) const noexcept {
        return {increments_.data() + step * dim_, static_cast<std::size_t>(dim_)};
    }
    [[nodiscard]] std::span<const double> value(std::size_t k) const noexcept {
        return {values_.data() + k * dim_, static_cast<std::size_t>(dim_)};
    }
    [[nodiscard]] std::span<const double> increments() const noexcept { return increments_; }

    /// Linear interpolation between grid values; used only for diagnostics.
    [[nodiscard]] Vector evaluate(double t) const;

    void write_csv(std::ostream& os) const;

private:
    int dim_;
    int level_;
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::vector<double> increments_;
    std::vector<double> values_;
};

using WienerHandle = std::shared_ptr<const DyadicWienerPath>;

/// Brownian path of `dim` components at `level`, stream `stream` of `seed`.
/// Increment q of component c is normal number (q * dim + c) of the stream.
[[nodiscard]] WienerHandle sample_wiener(int dim, int level, std::uint64_t seed, std::uint64_t stream = 0);

/// Path built from caller-supplied increments (tests, zero paths).
[[nodiscard]] WienerHandle make_wiener(int dim, int level, std::vector<double> increments);

/// Delayed piecewise-linear interpolation W^n of a finer Brownian path.
///
/// On [k/2^n, (k+1)/2^n) the segment runs from W((k-1)/2^n v 0) to W(k/2^n),
/// so the slope on that interval uses only W values at times <= k/2^n.
class PolygonalPath {
public:
    PolygonalPath(WienerHandle source, int n);

    [[nodiscard]] const WienerHandle& source() const noexcept { return source_; }
    [[nodiscard]] int level() const noexcept { return n_; }
    [[nodiscard]] int dim() const noexcept { return source_->dim(); }
    [[nodiscard]] std::size_t intervals() const noexcept { return std::size_t{1} << n_; }

    [[nodiscard]] Vector value(double t) const;
    /// Right-continuous derivative.
    [[nodiscard]] Vector derivative(double t) const;

    /// Coarse slope on [k/2^n, (k+1)/2^n); k = 2^n denotes the point t = 1.
    [[nodiscard]] std::span<const double> slope(std::size_t k) const noexcept {
        return {slopes_.data() + k * dim(), static_cast<std::size_t>(dim())};
    }
    /// Slope in force on fine step i of the source grid.
    [[nodiscard]] std::span<const double> slope_on_fine_step(std::size_t i) const noexcept {
        return slope(i >> (source_->level() - n_));
    }
    /// W^n at fine grid point i, computed from grid integers (no rounding of t).
    [[nodiscard]] Vector value_on_fine_grid(std::size_t i) const;

private:
    [[nodiscard]] std::size_t coarse_index(double t) const;

    WienerHandle source_;
    int n_;
    std::vector<double> slopes_;
};

[[nodiscard]] PolygonalPath linearize(const WienerHandle& w, int n);

/// Element of the Cameron-Martin space with piecewise-constant derivative.
class CameronMartinPath {
public:
    /// `breakpoints` strictly increasing from 0 to 1; one slope vector per interval.
    CameronMartinPath(std::vector<double> breakpoints, std::vector<Vector> slopes);

    /// Zero path of dimension `dim`.
    static CameronMartinPath zero(int dim);
    /// Single interval [0, 1] with constant slope.
    static CameronMartinPath constant_slope(const Vector& slope);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    [[nodiscard]] const std::vector<Vector>& slopes() const noexcept { return slopes_; }

    [[nodiscard]] Vector evaluate(double t) const;
    [[nodiscard]] Vector derivative(double t) const;
    [[nodiscard]] double energy() const;

    /// True when every breakpoint is an exact multiple of 2^-level.
    [[nodiscard]] bool aligned_to_level(int level) const;

    /// Slope per fine step of the level grid, step-major, dim entries each.
    [[nodiscard]] std::vector<double> slopes_on_grid(int level) const;

private:
    friend CameronMartinPath wn_as_cameron_martin(const PolygonalPath& wn);
    CameronMartinPath(std::vector<double> breakpoints, std::vector<Vector> slopes, std::vector<Vector> nodes);

    [[nodiscard]] std::size_t interval_of(double t) const;

    int dim_ = 0;
    std::vector<double> breakpoints_;
    std::vector<Vector> slopes_;
    std::vector<Vector> nodes_;  // h at each breakpoint
};

/// W^n re-expressed as a Cameron-Martin element (breakpoints k/2^n).
[[nodiscard]] CameronMartinPath wn_as_cameron_martin(const PolygonalPath& wn);

}  // namespace wzlab
