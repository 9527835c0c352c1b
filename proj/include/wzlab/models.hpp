#pragma once

#include "wzlab/coefficients.hpp"
#include "wzlab/lyapunov.hpp"

#include <map>
#include <string>
#include <vector>

namespace wzlab {

/// Named numeric parameters; scalars are one-element vectors.
using ParamMap = std::map<std::string, std::vector<double>>;

struct BuiltinModel {
    SdeModel model;
    LyapunovData lyapunov;
    ParamMap params;  // fully resolved, defaults filled
};

/// Identifiers accepted by builtin().
[[nodiscard]] const std::vector<std::string>& builtin_names();

/// Builds one of the example models:
///   cubic            b = -x^3, sigma = x^2
///   duffing_vdp      alpha1..3, eta0, eta1; g(x) = sqrt(eta0 + eta1 x^4)
///   lotka_volterra3  r, gamma, a (3x3 row-major), Ito form on (0, inf)^3
///   sir              alpha, beta, gamma, kappa on [0, inf)^3
///   threshold_ou     beta[n], alpha[n], thresholds[n-1], sigma
/// Unknown names, unknown keys and non-positive rates throw ParameterError.
/// An empty `x0` selects the model's default initial state.
[[nodiscard]] BuiltinModel builtin(const std::string& name, const ParamMap& params = {}, const Vector& x0 = {});

/// Duffing-van der Pol with a caller-supplied noise amplitude g and its derivative.
[[nodiscard]] BuiltinModel duffing_vdp(const ParamMap& params, std::function<double(double)> g,
                                       std::function<double(double)> dg, const Vector& x0 = {});

}  // namespace wzlab
