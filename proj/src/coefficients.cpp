#include "wzlab/coefficients.hpp"

#include "wzlab/errors.hpp"

#include <cmath>
#include <sstream>

namespace wzlab {

AdmissibleRegion AdmissibleRegion::whole_space() { return {Kind::whole_space, "R^m"}; }

AdmissibleRegion AdmissibleRegion::positive_orthant() { return {Kind::positive_orthant, "(0, inf)^m"}; }

AdmissibleRegion AdmissibleRegion::nonnegative_orthant() { return {Kind::nonnegative_orthant, "[0, inf)^m"}; }

AdmissibleRegion AdmissibleRegion::half_space(Vector normal, double offset) {
    std::ostringstream desc;
    desc << "{x : <n, x> >= " << offset << "}";
    AdmissibleRegion r(Kind::half_space, desc.str());
    r.normal_ = std::move(normal);
    r.offset_ = offset;
    return r;
}

bool AdmissibleRegion::contains(const Vector& x) const {
    switch (kind_) {
        case Kind::whole_space:
            return true;
        case Kind::positive_orthant:
            return (x.array() > 0.0).all();
        case Kind::nonnegative_orthant:
            return (x.array() >= 0.0).all();
        case Kind::half_space:
            return x.size() == normal_.size() && normal_.dot(x) >= offset_;
    }
    return false;
}

TruncationBump::TruncationBump(double radius) : radius_(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ParameterError("truncation radius must be positive");
}

double TruncationBump::profile(double r) const {
    const double inner = radius_ + 1.0;
    if (r <= inner) return 1.0;
    if (r >= 2.0 * inner) return 0.0;
    const double s = (r - inner) / inner;
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double TruncationBump::profile_derivative(double r) const {
    const double inner = radius_ + 1.0;
    if (r <= inner || r >= 2.0 * inner) return 0.0;
    const double s = (r - inner) / inner;
    const double one_minus = 1.0 - s;
    return -30.0 * s * s * one_minus * one_minus / inner;
}

double TruncationBump::value(const Vector& x) const { return profile(x.norm()); }

Vector TruncationBump::gradient(const Vector& x) const {
    const double r = x.norm();
    const double dr = profile_derivative(r);
    if (dr == 0.0) return Vector::Zero(x.size());
    return (dr / r) * x;
}

Vector stratonovich_correction(const SdeModel& model, const Vector& x) {
    if (!model.region.contains(x)) throw DomainError("state outside " + model.region.description());
    const Matrix sigma = model.diffusion(x);
    return model.diffusion_jacobian(x).contract(sigma);
}

CoefficientSystem truncate_system(const CoefficientSystem& sys, double radius) {
    const TruncationBump bump(radius);
    CoefficientSystem out = sys;
    out.name = sys.name + "|R=" + std::to_string(radius);
    out.drift = [bump, f = sys.drift](const Vector& x) -> Vector { return bump.value(x) * f(x); };
    out.control = [bump, f = sys.control](const Vector& x) -> Matrix { return bump.value(x) * f(x); };
    out.smooth_noise = [bump, f = sys.smooth_noise](const Vector& x) -> Matrix { return bump.value(x) * f(x); };
    out.ito_noise = [bump, f = sys.ito_noise](const Vector& x) -> Matrix { return bump.value(x) * f(x); };
    out.smooth_noise_jacobian = [bump, g = sys.smooth_noise, dg = sys.smooth_noise_jacobian](const Vector& x) {
        const double theta = bump.value(x);
        const Vector grad_theta = bump.gradient(x);
        const Matrix gx = g(x);
        GradientTensor out = dg(x);
        for (int i = 0; i < out.rows(); ++i)
            for (int j = 0; j < out.cols(); ++j)
                for (int k = 0; k < out.rows(); ++k) out(i, j, k) = grad_theta[k] * gx(i, j) + theta * out(i, j, k);
        return out;
    };
    return out;
}

CoefficientSystem reduce_to_wz_form(const SdeModel& model, WzVariant variant) {
    CoefficientSystem sys;
    sys.name = model.name + "|" + to_string(variant);
    sys.state_dim = model.state_dim;
    sys.noise_dim = model.noise_dim;
    sys.region = model.region;
    const int m = model.state_dim;
    const int d = model.noise_dim;

    if (variant == WzVariant::skeleton) {
        sys.drift = [b = model.drift, s = model.diffusion, ds = model.diffusion_jacobian](const Vector& x) -> Vector {
            return b(x) - 0.5 * ds(x).contract(s(x));
        };
        sys.control = zero_matrix_field(m, d);
        sys.smooth_noise = model.diffusion;
        sys.ito_noise = zero_matrix_field(m, d);
        sys.smooth_noise_jacobian = model.diffusion_jacobian;
    } else {
        sys.drift = model.drift;
        sys.control = model.diffusion;
        sys.smooth_noise = [s = model.diffusion](const Vector& x) -> Matrix { return -s(x); };
        sys.ito_noise = model.diffusion;
        sys.smooth_noise_jacobian = [ds = model.diffusion_jacobian](const Vector& x) { return ds(x).scaled(-1.0); };
    }
    return sys;
}

std::string to_string(WzVariant v) { return v == WzVariant::skeleton ? "skeleton" : "shifted"; }

WzVariant parse_wz_variant(const std::string& s) {
    if (s == "skeleton") return WzVariant::skeleton;
    if (s == "shifted") return WzVariant::shifted;
    throw ParameterError("unknown variant '" + s + "' (expected skeleton or shifted)");
}

GradientTensor finite_difference_jacobian(const MatrixField& f, const Vector& x, int cols, double step) {
    const int m = static_cast<int>(x.size());
    GradientTensor out(m, cols);
    for (int k = 0; k < m; ++k) {
        const double h = step * (1.0 + std::abs(x[k]));
        Vector up = x;
        Vector down = x;
        up[k] += h;
        down[k] -= h;
        const Matrix diff = (f(up) - f(down)) / (up[k] - down[k]);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < cols; ++j) out(i, j, k) = diff(i, j);
    }
    return out;
}

double jacobian_consistency_error(const MatrixField& f, const TensorField& jacobian, const Vector& x, int cols,
                                  double step) {
    const GradientTensor fd = finite_difference_jacobian(f, x, cols, step);
    const GradientTensor exact = jacobian(x);
    double worst = 0.0;
    for (int i = 0; i < fd.rows(); ++i)
        for (int j = 0; j < fd.cols(); ++j)
            for (int k = 0; k < fd.rows(); ++k) {
                const double err = std::abs(exact(i, j, k) - fd(i, j, k)) / (1.0 + std::abs(fd(i, j, k)));
                worst = std::max(worst, err);
            }
    return worst;
}

MatrixField zero_matrix_field(int rows, int cols) {
    return [rows, cols](const Vector&) -> Matrix { return Matrix::Zero(rows, cols); };
}

TensorField zero_tensor_field(int rows, int cols) {
    return [rows, cols](const Vector&) { return GradientTensor(rows, cols); };
}

}  // namespace wzlab
