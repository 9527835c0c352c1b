#pragma once

#include "wzlab/coefficients.hpp"
#include "wzlab/dyadic_paths.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wzlab {

enum class TrajectoryStatus { completed, escaped, nonfinite };

[[nodiscard]] std::string to_string(TrajectoryStatus s);

/// States above this magnitude (or NaN) stop integration with status nonfinite.
inline constexpr double kBlowUpThreshold = 1e150;

/// Discrete path on the uniform grid t_i = i / 2^level.
///
/// A trajectory that stopped early (escaped or nonfinite) holds only the
/// states up to and including the first offending one; event_time() is the
/// grid time of that state.
class Trajectory {
public:
    Trajectory(int level, int state_dim) : level_(level), state_dim_(state_dim) {}

    [[nodiscard]] int level() const noexcept { return level_; }
    [[nodiscard]] int state_dim() const noexcept { return state_dim_; }
    [[nodiscard]] std::size_t steps() const noexcept { return std::size_t{1} << level_; }
    /// Number of stored states (steps() + 1 when completed).
    [[nodiscard]] std::size_t size() const noexcept { return states_.size() / state_dim_; }
    [[nodiscard]] double time(std::size_t i) const noexcept;

    [[nodiscard]] Eigen::Map<const Vector> state(std::size_t i) const noexcept {
        return {states_.data() + i * state_dim_, state_dim_};
    }
    [[nodiscard]] const std::vector<double>& raw() const noexcept { return states_; }

    [[nodiscard]] TrajectoryStatus status() const noexcept { return status_; }
    [[nodiscard]] bool completed() const noexcept { return status_ == TrajectoryStatus::completed; }
    [[nodiscard]] std::optional<double> event_time() const noexcept { return event_time_; }

    /// max_i |x_i| over stored states.
    [[nodiscard]] double sup_norm() const;

    void push(const Vector& x) { states_.insert(states_.end(), x.data(), x.data() + x.size()); }
    void stop(TrajectoryStatus status) {
        status_ = status;
        event_time_ = time(size() - 1);
    }

    void write_csv(std::ostream& os) const;

private:
    int level_;
    int state_dim_;
    std::vector<double> states_;
    TrajectoryStatus status_ = TrajectoryStatus::completed;
    std::optional<double> event_time_;
};

/// Noise inputs for one coupled sample: a Brownian path, optionally its
/// interpolation W^n (which must come from the same path) and a control h.
class DriverBundle {
public:
    explicit DriverBundle(WienerHandle w, std::optional<PolygonalPath> wn = std::nullopt,
                          std::optional<CameronMartinPath> h = std::nullopt);

    [[nodiscard]] const WienerHandle& wiener() const noexcept { return w_; }
    [[nodiscard]] const std::optional<PolygonalPath>& polygonal() const noexcept { return wn_; }
    [[nodiscard]] const std::optional<CameronMartinPath>& control() const noexcept { return h_; }
    [[nodiscard]] int level() const noexcept { return w_->level(); }

private:
    WienerHandle w_;
    std::optional<PolygonalPath> wn_;
    std::optional<CameronMartinPath> h_;
};

/// Euler-Maruyama for dY = [B + H hdot + G Wn_dot] dt + F dW on the Brownian grid.
/// Requires W^n with level(W) >= n + 4.
[[nodiscard]] Trajectory integrate_mixed(const CoefficientSystem& sys, const DriverBundle& drivers, const Vector& x0);

/// Euler-Maruyama for dZ = [B + H hdot + dG[F + G/2]] dt + [F + G] dW.
[[nodiscard]] Trajectory integrate_ito_limit(const CoefficientSystem& sys, const DriverBundle& drivers,
                                             const Vector& x0);

/// Euler-Maruyama for dX = b dt + sigma dW.
[[nodiscard]] Trajectory integrate_sde(const SdeModel& model, const WienerHandle& w, const Vector& x0);

/// RK4 for S' = b - (d sigma) sigma / 2 + sigma hdot on the level grid, hdot frozen per step.
[[nodiscard]] Trajectory solve_skeleton(const SdeModel& model, const CameronMartinPath& h, const Vector& x0,
                                        int level);

/// Skeleton driven by h = W^n, on the grid of W^n's source path.
[[nodiscard]] Trajectory solve_skeleton_wn(const SdeModel& model, const PolygonalPath& wn, const Vector& x0);

/// X(w - w^n + h): integrate_mixed on the shifted reduction (b, sigma, -sigma, sigma).
[[nodiscard]] Trajectory integrate_shifted(const SdeModel& model, const DriverBundle& drivers, const Vector& x0);

/// Exponential-integrator solution of dX = (beta - alpha X) dt + sigma dW using
/// E[int e^{-alpha(dt - s)} dW_s | dW] per step; exact in law of the mean and
/// within O(dt) of the exact pathwise solution.
[[nodiscard]] Trajectory solve_linear_sde(const LinearCoefficients& lin, const WienerHandle& w, double x0);

/// max_i |a_i - b_i|; +inf if either trajectory did not complete.
[[nodiscard]] double sup_distance(const Trajectory& a, const Trajectory& b);

}  // namespace wzlab
