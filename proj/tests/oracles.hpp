#pragma once

// Independent reference computations used by the test suites. Nothing
// here calls into the routines it is meant to check.

#include "textray/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace textray::oracle {

/// T_k(x) through the trigonometric identity T_k(cos phi) = cos(k phi).
inline double chebyshev_t(int k, double x) {
    x = std::clamp(x, -1.0, 1.0);
    return std::cos(static_cast<double>(k) * std::acos(x));
}

inline double chebyshev_sum(const std::vector<double>& c, double angle) {
    double acc = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * chebyshev_t(static_cast<int>(k), angle / std::numbers::pi);
    return acc;
}

inline double grid_theta(std::size_t i, std::size_t n) {
    return -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
}

/// Every ray/segment hit, solving the 2x2 system by Cramer's rule over the
/// closed segment, sorted with duplicates (shared vertices) merged.
inline std::vector<double> ray_hits(const std::vector<Point2>& ring, Point2 o, double angle) {
    const double ux = std::cos(angle), uy = std::sin(angle);
    std::vector<double> out;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const Point2 a = ring[i], b = ring[(i + 1) % ring.size()];
        // o + t u = a + s (b - a)  ->  [ux, -(bx-ax); uy, -(by-ay)] [t; s] = a - o
        const double m00 = ux, m01 = -(b.x - a.x), m10 = uy, m11 = -(b.y - a.y);
        const double det = m00 * m11 - m01 * m10;
        if (std::abs(det) < 1e-14) continue;
        const double rx = a.x - o.x, ry = a.y - o.y;
        const double t = (rx * m11 - m01 * ry) / det;
        const double s = (m00 * ry - rx * m10) / det;
        if (s < -1e-12 || s > 1.0 + 1e-12 || t < -1e-12) continue;
        out.push_back(std::max(t, 0.0));
    }
    std::sort(out.begin(), out.end());
    std::vector<double> merged;
    for (double d : out) {
        if (merged.empty() || d - merged.back() > 1e-9) merged.push_back(d);
    }
    return merged;
}

/// Least squares through the normal equations A^T A c = A^T b, solved by
/// Gaussian elimination with partial pivoting.
inline std::vector<double> normal_equations_fit(const std::vector<double>& angles, const std::vector<double>& values,
                                                int degree) {
    const std::size_t n = static_cast<std::size_t>(degree) + 1;
    std::vector<std::vector<double>> m(n, std::vector<double>(n + 1, 0.0));
    std::vector<double> row(n);
    for (std::size_t i = 0; i < angles.size(); ++i) {
        for (std::size_t k = 0; k < n; ++k) row[k] = chebyshev_t(static_cast<int>(k), angles[i] / std::numbers::pi);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) m[r][c] += row[r] * row[c];
            m[r][n] += row[r] * values[i];
        }
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        }
        std::swap(m[col], m[pivot]);
        if (m[col][col] == 0.0) throw std::runtime_error("singular normal equations");
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = m[r][col] / m[col][col];
            for (std::size_t c = col; c <= n; ++c) m[r][c] -= f * m[col][c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double acc = m[r][n];
        for (std::size_t c = r + 1; c < n; ++c) acc -= m[r][c] * x[c];
        x[r] = acc / m[r][r];
    }
    return x;
}

inline double residual(const std::vector<double>& angles, const std::vector<double>& values,
                       const std::vector<double>& coeffs) {
    double acc = 0.0;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const double d = chebyshev_sum(coeffs, angles[i]) - values[i];
        acc += d * d;
    }
    return acc;
}

inline double huber(double x) { return std::abs(x) < 1.0 ? 0.5 * x * x : std::abs(x) - 0.5; }

inline double content_loss(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double th = grid_theta(i, n);
        acc += huber(chebyshev_sum(a, th) - chebyshev_sum(b, th));
    }
    return acc / static_cast<double>(n);
}

/// T_k(theta_i / pi) over the N-ray grid for k = 0..max_degree, filled
/// through the trigonometric identity once so repeated loss evaluations
/// (finite differences) stay cheap.
struct GridBasis {
    std::size_t n = 0;
    std::vector<std::vector<double>> t;  // t[i][k]

    GridBasis(std::size_t n_rays, int max_degree) : n(n_rays), t(n_rays) {
        for (std::size_t i = 0; i < n; ++i) {
            const double x = grid_theta(i, n) / std::numbers::pi;
            for (int k = 0; k <= max_degree; ++k) t[i].push_back(chebyshev_t(k, x));
        }
    }

    double content_loss(const std::vector<double>& a, const std::vector<double>& b) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) d += (a[k] - b[k]) * t[i][k];
            acc += huber(d);
        }
        return acc / static_cast<double>(n);
    }
};

inline double seg_dist(Point2 p, Point2 a, Point2 b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double l2 = dx * dx + dy * dy;
    double t = l2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / l2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

inline bool inside_even_odd(const std::vector<Point2>& ring, Point2 p) {
    bool in = false;
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
        if (((ring[i].y > p.y) != (ring[j].y > p.y)) &&
            (p.x < (ring[j].x - ring[i].x) * (p.y - ring[i].y) / (ring[j].y - ring[i].y) + ring[i].x)) {
            in = !in;
        }
    }
    return in;
}

/// Interior grid point of maximal boundary distance at spacing `step`.
inline std::pair<Point2, double> max_inscribed_grid(const std::vector<Point2>& ring, double step) {
    double x0 = ring[0].x, x1 = x0, y0 = ring[0].y, y1 = y0;
    for (const auto& v : ring) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
    }
    Point2 best{};
    double best_d = -1.0;
    for (double y = y0; y <= y1; y += step) {
        for (double x = x0; x <= x1; x += step) {
            if (!inside_even_odd(ring, {x, y})) continue;
            double d = 1e300;
            for (std::size_t i = 0; i < ring.size(); ++i) d = std::min(d, seg_dist({x, y}, ring[i], ring[(i + 1) % ring.size()]));
            if (d > best_d) {
                best_d = d;
                best = {x, y};
            }
        }
    }
    return {best, best_d};
}

/// Area of a ∩ b estimated on a regular grid of `cells` per side over the
/// joint bounding box.
inline double raster_iou(const std::vector<Point2>& a, const std::vector<Point2>& b, int cells) {
    double x0 = a[0].x, x1 = x0, y0 = a[0].y, y1 = y0;
    for (const auto* ring : {&a, &b}) {
        for (const auto& v : *ring) {
            x0 = std::min(x0, v.x);
            x1 = std::max(x1, v.x);
            y0 = std::min(y0, v.y);
            y1 = std::max(y1, v.y);
        }
    }
    const double dx = (x1 - x0) / cells, dy = (y1 - y0) / cells;
    long inter = 0, uni = 0;
    for (int j = 0; j < cells; ++j) {
        for (int i = 0; i < cells; ++i) {
            const Point2 p{x0 + (i + 0.5) * dx, y0 + (j + 0.5) * dy};
            const bool ia = inside_even_odd(a, p), ib = inside_even_odd(b, p);
            inter += ia && ib;
            uni += ia || ib;
        }
    }
    return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

}  // namespace textray::oracle
