#pragma once

#include "textray/geometry.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace textray {

inline constexpr std::size_t kDefaultRays = 360;
/// Fitting degree for line-level annotations.
inline constexpr int kLineLevelDegree = 44;
/// Fitting degree for word-level annotations.
inline constexpr int kWordLevelDegree = 33;

/// Ray angle i of an N-ray grid over the half-open interval [-pi, pi).
double grid_angle(std::size_t i, std::size_t n_rays);
std::vector<double> grid_angles(std::size_t n_rays);

struct RadialProfile {
    std::vector<double> angles;
    /// Farthest boundary distance per ray; 0 for entries listed in misses.
    std::vector<double> radii;
    std::vector<std::size_t> misses;

    std::size_t n_rays() const noexcept { return angles.size(); }
    bool is_miss(std::size_t i) const;
};

class ShapeVector {
public:
    ShapeVector() : coeffs_{0.0} {}
    explicit ShapeVector(std::vector<double> coeffs);

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    double operator[](std::size_t k) const { return coeffs_[k]; }

    friend bool operator==(const ShapeVector&, const ShapeVector&) = default;

private:
    std::vector<double> coeffs_;
};

struct GeometricEncoding {
    ShapeVector shape;
    double scale = 1.0;
    Point2 center;

    friend bool operator==(const GeometricEncoding&, const GeometricEncoding&) = default;
};

struct FitResult {
    ShapeVector shape;
    double scale;
};

struct Fidelity {
    double iou = 0.0;
    double mean_radial_error = 0.0;

    friend bool operator==(const Fidelity&, const Fidelity&) = default;
};

/// T_0(x) .. T_degree(x) by the three-term recurrence.
void chebyshev_basis(double x, std::span<double> out);

/// sum_k c_k T_k(angle / pi).
double chebyshev_eval(const ShapeVector& shape, double angle);

/// Casts the grid rays from `center` and keeps the farthest hit of each.
RadialProfile sample_radial_profile(const Polygon& polygon, Point2 center, std::size_t n_rays = kDefaultRays);

/// Least-squares Chebyshev fit of radii / max(radii) over the non-miss rays.
FitResult chebyshev_fit(const RadialProfile& profile, int degree);

GeometricEncoding encode(const Polygon& polygon, const std::optional<PairedPolyline>& pairing = std::nullopt,
                         std::size_t n_rays = kDefaultRays, int degree = kLineLevelDegree);

/// Reconstructed radius per grid ray, s * f_K(theta_i), clamped at 0.
std::vector<double> decode_radii(const GeometricEncoding& encoding, std::size_t n_rays = kDefaultRays);

/// N-vertex contour in grid order. Rays whose reconstructed point
/// coincides with the previous one are merged, so the result can have
/// fewer than N vertices when radii clamp to 0.
Polygon decode(const GeometricEncoding& encoding, std::size_t n_rays = kDefaultRays);

/// Mean |f_K(theta_i) - r_i / s| over the non-miss rays of `profile`.
double mean_radial_error(const RadialProfile& profile, const GeometricEncoding& encoding);

/// IoU between `polygon` and decode(encoding), plus the mean radial error
/// against the profile sampled from `polygon` at the encoding's center.
Fidelity reconstruction_fidelity(const Polygon& polygon, const GeometricEncoding& encoding,
                                 std::size_t n_rays = kDefaultRays);

}  // namespace textray
