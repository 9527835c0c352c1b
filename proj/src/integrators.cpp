#include "wzlab/integrators.hpp"

#include "wzlab/errors.hpp"
#include "wzlab/serialization.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace wzlab {

std::string to_string(TrajectoryStatus s) {
    switch (s) {
        case TrajectoryStatus::completed: return "completed";
        case TrajectoryStatus::escaped: return "escaped";
        case TrajectoryStatus::nonfinite: return "nonfinite";
    }
    return "unknown";
}

double Trajectory::time(std::size_t i) const noexcept { return std::ldexp(static_cast<double>(i), -level_); }

double Trajectory::sup_norm() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < size(); ++i) worst = std::max(worst, state(i).norm());
    return worst;
}

void Trajectory::write_csv(std::ostream& os) const {
    os << "t";
    for (int c = 0; c < state_dim_; ++c) os << ",x_" << (c + 1);
    os << '\n';
    for (std::size_t i = 0; i < size(); ++i) {
        os << format_double(time(i));
        for (int c = 0; c < state_dim_; ++c) os << ',' << format_double(states_[i * state_dim_ + c]);
        os << '\n';
    }
    os << "# status=" << to_string(status_);
    if (event_time_) os << ",t=" << format_double(*event_time_);
    os << '\n';
}

DriverBundle::DriverBundle(WienerHandle w, std::optional<PolygonalPath> wn, std::optional<CameronMartinPath> h)
    : w_(std::move(w)), wn_(std::move(wn)), h_(std::move(h)) {
    if (!w_) throw ParameterError("driver bundle needs a Wiener path");
    if (wn_ && wn_->source().get() != w_.get())
        throw ParameterError("W^n must be built from the bundle's own Wiener path");
    if (h_ && h_->dim() != w_->dim()) throw ParameterError("control h and Wiener path dimensions differ");
}

namespace {

bool blown_up(const Vector& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!(std::abs(x[i]) <= kBlowUpThreshold)) return true;
    return false;
}

void check_initial(const AdmissibleRegion& region, int m, const Vector& x0) {
    if (x0.size() != m) throw ParameterError("initial state has " + std::to_string(x0.size()) +
                                             " components, model needs " + std::to_string(m));
    if (!x0.allFinite()) throw ParameterError("initial state must be finite");
    if (!region.contains(x0)) throw DomainError("initial state outside " + region.description());
}

/// Runs x_{i+1} = advance(i, x_i) with blow-up and region checks after each step.
template <class Advance>
Trajectory march(int level, const AdmissibleRegion& region, const Vector& x0, Advance&& advance) {
    Trajectory traj(level, static_cast<int>(x0.size()));
    const std::size_t steps = std::size_t{1} << level;
    Vector x = x0;
    traj.push(x);
    for (std::size_t i = 0; i < steps; ++i) {
        x = advance(i, x);
        traj.push(x);
        if (blown_up(x)) {
            traj.stop(TrajectoryStatus::nonfinite);
            break;
        }
        if (!region.contains(x)) {
            traj.stop(TrajectoryStatus::escaped);
            break;
        }
    }
    return traj;
}

void check_system(const CoefficientSystem& sys, const DriverBundle& drivers) {
    if (sys.noise_dim != drivers.wiener()->dim())
        throw ParameterError("system noise dimension does not match the Wiener path");
}

}  // namespace

Trajectory integrate_mixed(const CoefficientSystem& sys, const DriverBundle& drivers, const Vector& x0) {
    check_system(sys, drivers);
    if (!drivers.polygonal()) throw ParameterError("integrate_mixed needs W^n in the driver bundle");
    const PolygonalPath& wn = *drivers.polygonal();
    const DyadicWienerPath& w = *drivers.wiener();
    if (w.level() < wn.level() + 4)
        throw ParameterError("Brownian level " + std::to_string(w.level()) + " must be >= n + 4 = " +
                             std::to_string(wn.level() + 4));
    check_initial(sys.region, sys.state_dim, x0);

    const int d = w.dim();
    const double dt = w.step_size();
    const bool has_control = drivers.control().has_value();
    const std::vector<double> hdot = has_control ? drivers.control()->slopes_on_grid(w.level()) : std::vector<double>{};

    return march(w.level(), sys.region, x0, [&](std::size_t i, const Vector& x) -> Vector {
        const Eigen::Map<const Vector> wn_dot(wn.slope_on_fine_step(i).data(), d);
        const Eigen::Map<const Vector> dw(w.increment(i).data(), d);
        Vector noise_terms = sys.smooth_noise(x) * wn_dot;
        if (has_control) {
            const Eigen::Map<const Vector> h_dot(hdot.data() + i * d, d);
            noise_terms = sys.control(x) * h_dot + noise_terms;
        }
        const Vector drift = sys.drift(x) + noise_terms;
        return x + drift * dt + sys.ito_noise(x) * dw;
    });
}

Trajectory integrate_ito_limit(const CoefficientSystem& sys, const DriverBundle& drivers, const Vector& x0) {
    check_system(sys, drivers);
    check_initial(sys.region, sys.state_dim, x0);
    const DyadicWienerPath& w = *drivers.wiener();
    const int d = w.dim();
    const double dt = w.step_size();
    const bool has_control = drivers.control().has_value();
    const std::vector<double> hdot = has_control ? drivers.control()->slopes_on_grid(w.level()) : std::vector<double>{};

    return march(w.level(), sys.region, x0, [&](std::size_t i, const Vector& x) -> Vector {
        const Eigen::Map<const Vector> dw(w.increment(i).data(), d);
        const Matrix g = sys.smooth_noise(x);
        const Matrix f = sys.ito_noise(x);
        Vector drift = sys.drift(x) + sys.smooth_noise_jacobian(x).contract(f + 0.5 * g);
        if (has_control) {
            const Eigen::Map<const Vector> h_dot(hdot.data() + i * d, d);
            drift += sys.control(x) * h_dot;
        }
        return x + drift * dt + (f + g) * dw;
    });
}

Trajectory integrate_sde(const SdeModel& model, const WienerHandle& w, const Vector& x0) {
    if (!w) throw ParameterError("integrate_sde needs a Wiener path");
    if (model.noise_dim != w->dim()) throw ParameterError("model noise dimension does not match the Wiener path");
    check_initial(model.region, model.state_dim, x0);
    const int d = w->dim();
    const double dt = w->step_size();
    return march(w->level(), model.region, x0, [&](std::size_t i, const Vector& x) -> Vector {
        const Eigen::Map<const Vector> dw(w->increment(i).data(), d);
        const Vector drift = model.drift(x);
        return x + drift * dt + model.diffusion(x) * dw;
    });
}

Trajectory solve_skeleton(const SdeModel& model, const CameronMartinPath& h, const Vector& x0, int level) {
    if (level < 1 || level > kMaxLevel) throw ParameterError("skeleton level must be in [1, 30]");
    if (h.dim() != model.noise_dim) throw ParameterError("control h dimension does not match the model noise");
    if (!h.aligned_to_level(level))
        throw ParameterError("control h has breakpoints off the level-" + std::to_string(level) + " grid");
    check_initial(model.region, model.state_dim, x0);

    const int d = model.noise_dim;
    const double dt = std::ldexp(1.0, -level);
    const std::vector<double> hdot = h.slopes_on_grid(level);

    return march(level, model.region, x0, [&](std::size_t i, const Vector& x) -> Vector {
        const Eigen::Map<const Vector> h_dot(hdot.data() + i * d, d);
        auto rhs = [&](const Vector& y) -> Vector {
            const Matrix sigma = model.diffusion(y);
            return model.drift(y) - 0.5 * model.diffusion_jacobian(y).contract(sigma) + sigma * h_dot;
        };
        const Vector k1 = rhs(x);
        const Vector k2 = rhs(x + 0.5 * dt * k1);
        const Vector k3 = rhs(x + 0.5 * dt * k2);
        const Vector k4 = rhs(x + dt * k3);
        return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    });
}

Trajectory solve_skeleton_wn(const SdeModel& model, const PolygonalPath& wn, const Vector& x0) {
    return solve_skeleton(model, wn_as_cameron_martin(wn), x0, wn.source()->level());
}

Trajectory integrate_shifted(const SdeModel& model, const DriverBundle& drivers, const Vector& x0) {
    if (!drivers.polygonal() || !drivers.control())
        throw ParameterError("integrate_shifted needs W, W^n and h in the driver bundle");
    return integrate_mixed(reduce_to_wz_form(model, WzVariant::shifted), drivers, x0);
}

Trajectory solve_linear_sde(const LinearCoefficients& lin, const WienerHandle& w, double x0) {
    if (!w || w->dim() != 1) throw ParameterError("linear SDE reference needs a one-dimensional Wiener path");
    if (!(lin.alpha > 0.0)) throw ParameterError("linear SDE reference needs alpha > 0");
    const double dt = w->step_size();
    const double decay_m1 = std::expm1(-lin.alpha * dt);  // e^{-alpha dt} - 1
    const double decay = 1.0 + decay_m1;
    const double drift_gain = -decay_m1 / lin.alpha;             // (1 - e^{-alpha dt}) / alpha
    const double noise_gain = lin.sigma * drift_gain / dt;       // sigma (1 - e^{-alpha dt}) / (alpha dt)
    return march(w->level(), AdmissibleRegion::whole_space(), Vector::Constant(1, x0),
                 [&](std::size_t i, const Vector& x) -> Vector {
                     return Vector::Constant(1, decay * x[0] + lin.beta * drift_gain + noise_gain * w->increment(i)[0]);
                 });
}

double sup_distance(const Trajectory& a, const Trajectory& b) {
    if (a.level() != b.level() || a.state_dim() != b.state_dim())
        throw ParameterError("sup_distance needs trajectories on the same grid");
    if (!a.completed() || !b.completed()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, (a.state(i) - b.state(i)).norm());
    return worst;
}

}  // namespace wzlab
