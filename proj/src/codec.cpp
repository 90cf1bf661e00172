#include "textray/codec.hpp"

#include "textray/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace textray {

double grid_angle(std::size_t i, std::size_t n_rays) {
    return -std::numbers::pi + static_cast<double>(i) * (2.0 * std::numbers::pi / static_cast<double>(n_rays));
}

std::vector<double> grid_angles(std::size_t n_rays) {
    std::vector<double> out(n_rays);
    for (std::size_t i = 0; i < n_rays; ++i) out[i] = grid_angle(i, n_rays);
    return out;
}

bool RadialProfile::is_miss(std::size_t i) const {
    return std::binary_search(misses.begin(), misses.end(), i);
}

ShapeVector::ShapeVector(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw std::invalid_argument("shape vector needs at least one coefficient");
    for (double c : coeffs_) {
        if (!std::isfinite(c)) throw std::invalid_argument("non-finite shape coefficient");
    }
}

void chebyshev_basis(double x, std::span<double> out) {
    if (out.empty()) return;
    out[0] = 1.0;
    if (out.size() > 1) out[1] = x;
    for (std::size_t k = 2; k < out.size(); ++k) out[k] = 2.0 * x * out[k - 1] - out[k - 2];
}

double chebyshev_eval(const ShapeVector& shape, double angle) {
    const double x = angle / std::numbers::pi;
    const auto c = shape.coeffs();
    // Forward recurrence, matching the basis used by the fit.
    double t_prev = 1.0;
    double acc = c[0];
    if (c.size() == 1) return acc;
    double t_cur = x;
    acc += c[1] * t_cur;
    for (std::size_t k = 2; k < c.size(); ++k) {
        const double t_next = 2.0 * x * t_cur - t_prev;
        acc += c[k] * t_next;
        t_prev = t_cur;
        t_cur = t_next;
    }
    return acc;
}

RadialProfile sample_radial_profile(const Polygon& polygon, Point2 center, std::size_t n_rays) {
    validate(polygon);
    if (n_rays < 4) throw std::invalid_argument("sample_radial_profile needs at least 4 rays");
    RadialProfile profile;
    profile.angles = grid_angles(n_rays);
    profile.radii.assign(n_rays, 0.0);
    for (std::size_t i = 0; i < n_rays; ++i) {
        const auto hits = ray_polygon_intersections_unchecked(polygon, center, profile.angles[i]);
        if (hits.empty()) {
            profile.misses.push_back(i);
        } else {
            profile.radii[i] = hits.back();
        }
    }
    if (profile.misses.size() == n_rays) {
        throw AllRaysMiss("no ray from the center reaches the contour");
    }
    return profile;
}

FitResult chebyshev_fit(const RadialProfile& profile, int degree) {
    if (degree < 0) throw std::invalid_argument("negative fitting degree");
    const std::size_t n_coeffs = static_cast<std::size_t>(degree) + 1;
    const std::size_t n_valid = profile.n_rays() - profile.misses.size();
    if (n_valid < n_coeffs) {
        throw Underdetermined("degree " + std::to_string(degree) + " needs " + std::to_string(n_coeffs) +
                              " samples, profile has " + std::to_string(n_valid));
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < profile.n_rays(); ++i) {
        if (!profile.is_miss(i)) scale = std::max(scale, profile.radii[i]);
    }
    if (!(scale > 0.0)) throw DegenerateScale("longest sampled radius is zero");

    Eigen::MatrixXd design(static_cast<Eigen::Index>(n_valid), static_cast<Eigen::Index>(n_coeffs));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n_valid));
    std::vector<double> basis(n_coeffs);
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < profile.n_rays(); ++i) {
        if (profile.is_miss(i)) continue;
        chebyshev_basis(profile.angles[i] / std::numbers::pi, basis);
        for (std::size_t k = 0; k < n_coeffs; ++k) design(row, static_cast<Eigen::Index>(k)) = basis[k];
        rhs(row) = profile.radii[i] / scale;
        ++row;
    }
    const Eigen::VectorXd solution = design.householderQr().solve(rhs);
    return {ShapeVector(std::vector<double>(solution.data(), solution.data() + solution.size())), scale};
}

GeometricEncoding encode(const Polygon& polygon, const std::optional<PairedPolyline>& pairing, std::size_t n_rays,
                         int degree) {
    const Point2 center = text_center(polygon, pairing);
    const RadialProfile profile = sample_radial_profile(polygon, center, n_rays);
    auto [shape, scale] = chebyshev_fit(profile, degree);
    return {std::move(shape), scale, center};
}

std::vector<double> decode_radii(const GeometricEncoding& encoding, std::size_t n_rays) {
    std::vector<double> radii(n_rays);
    for (std::size_t i = 0; i < n_rays; ++i) {
        radii[i] = std::max(0.0, encoding.scale * chebyshev_eval(encoding.shape, grid_angle(i, n_rays)));
    }
    return radii;
}

Polygon decode(const GeometricEncoding& encoding, std::size_t n_rays) {
    if (n_rays < 3) throw std::invalid_argument("decode needs at least 3 rays");
    if (!(encoding.scale > 0.0)) throw DegenerateScale("encoding scale must be positive");
    const auto radii = decode_radii(encoding, n_rays);
    std::vector<Point2> vertices;
    vertices.reserve(n_rays);
    for (std::size_t i = 0; i < n_rays; ++i) {
        const double theta = grid_angle(i, n_rays);
        const Point2 v{encoding.center.x + radii[i] * std::cos(theta), encoding.center.y + radii[i] * std::sin(theta)};
        if (!vertices.empty() && vertices.back() == v) continue;
        vertices.push_back(v);
    }
    while (vertices.size() > 1 && vertices.back() == vertices.front()) vertices.pop_back();
    return Polygon(std::move(vertices));
}

double mean_radial_error(const RadialProfile& profile, const GeometricEncoding& encoding) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < profile.n_rays(); ++i) {
        if (profile.is_miss(i)) continue;
        acc += std::abs(chebyshev_eval(encoding.shape, profile.angles[i]) - profile.radii[i] / encoding.scale);
        ++count;
    }
    return count ? acc / static_cast<double>(count) : 0.0;
}

Fidelity reconstruction_fidelity(const Polygon& polygon, const GeometricEncoding& encoding, std::size_t n_rays) {
    const RadialProfile profile = sample_radial_profile(polygon, encoding.center, n_rays);
    Fidelity out;
    out.mean_radial_error = mean_radial_error(profile, encoding);
    try {
        out.iou = polygon_iou(polygon, decode(encoding, n_rays));
    } catch (const InvalidPolygon&) {
        // Reconstruction collapsed to the pole.
        out.iou = 0.0;
    }
    return out;
}

}  // namespace textray
