#pragma once

#include "wzlab/linalg.hpp"

#include <functional>
#include <optional>
#include <string>

namespace wzlab {

using VectorField = std::function<Vector(const Vector&)>;
using MatrixField = std::function<Matrix(const Vector&)>;
using TensorField = std::function<GradientTensor(const Vector&)>;

/// State-space region on which a model is defined.
class AdmissibleRegion {
public:
    enum class Kind { whole_space, positive_orthant, nonnegative_orthant, half_space };

    static AdmissibleRegion whole_space();
    static AdmissibleRegion positive_orthant();
    static AdmissibleRegion nonnegative_orthant();
    /// {x : <normal, x> >= offset}
    static AdmissibleRegion half_space(Vector normal, double offset);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& description() const noexcept { return description_; }
    [[nodiscard]] bool contains(const Vector& x) const;

private:
    AdmissibleRegion(Kind kind, std::string description) : kind_(kind), description_(std::move(description)) {}

    Kind kind_;
    std::string description_;
    Vector normal_;
    double offset_ = 0.0;
};

/// Coefficients of the coupled family
///   dY = B dt + H hdot dt + G Wn_dot dt + F dW
/// together with the Jacobian of G that enters its Ito limit.
struct CoefficientSystem {
    std::string name;
    int state_dim = 0;  // m
    int noise_dim = 0;  // d
    VectorField drift;                  // B
    MatrixField control;                // H
    MatrixField smooth_noise;           // G
    MatrixField ito_noise;              // F
    TensorField smooth_noise_jacobian;  // dG
    AdmissibleRegion region = AdmissibleRegion::whole_space();
};

/// Affine drift beta - alpha x with constant scalar diffusion (m = d = 1).
struct LinearCoefficients {
    double beta = 0.0;
    double alpha = 0.0;
    double sigma = 0.0;
};

/// dX = b(X) dt + sigma(X) dW.
struct SdeModel {
    std::string name;
    int state_dim = 0;
    int noise_dim = 0;
    VectorField drift;               // b
    MatrixField diffusion;           // sigma, m x d
    TensorField diffusion_jacobian;  // d sigma_ij / d x_k
    Vector x0;
    AdmissibleRegion region = AdmissibleRegion::whole_space();
    bool non_lipschitz_drift = false;
    std::optional<LinearCoefficients> linear;
};

/// Smooth radial cutoff: 1 on |x| <= R+1, 0 on |x| >= 2(R+1), quintic
/// smoothstep in between (C^2 across both seams).
class TruncationBump {
public:
    explicit TruncationBump(double radius);

    [[nodiscard]] double radius() const noexcept { return radius_; }
    [[nodiscard]] double value(const Vector& x) const;
    [[nodiscard]] Vector gradient(const Vector& x) const;

    /// Radial profile as a function of r = |x|.
    [[nodiscard]] double profile(double r) const;
    [[nodiscard]] double profile_derivative(double r) const;

private:
    double radius_;
};

/// ((d sigma) sigma)_i = sum_{k,j} d_k sigma_ij sigma_kj. Caller applies the 1/2.
[[nodiscard]] Vector stratonovich_correction(const SdeModel& model, const Vector& x);

/// Every coefficient multiplied by the bump; the Jacobian uses the product rule.
[[nodiscard]] CoefficientSystem truncate_system(const CoefficientSystem& sys, double radius);

enum class WzVariant {
    skeleton,  // (b - 1/2 (d sigma) sigma, 0, sigma, 0)
    shifted,   // (b, sigma, -sigma, sigma)
};

[[nodiscard]] CoefficientSystem reduce_to_wz_form(const SdeModel& model, WzVariant variant);

[[nodiscard]] std::string to_string(WzVariant v);
[[nodiscard]] WzVariant parse_wz_variant(const std::string& s);

/// Central-difference Jacobian of a matrix field at x with step h_k = step * (1 + |x|).
[[nodiscard]] GradientTensor finite_difference_jacobian(const MatrixField& f, const Vector& x, int cols, double step);

/// Worst relative error (|num - fd| / (1 + |fd|)) of `jacobian` against central differences of `f`.
[[nodiscard]] double jacobian_consistency_error(const MatrixField& f, const TensorField& jacobian, const Vector& x,
                                                int cols, double step = 1e-5);

[[nodiscard]] MatrixField zero_matrix_field(int rows, int cols);
[[nodiscard]] TensorField zero_tensor_field(int rows, int cols);

}  // namespace wzlab
