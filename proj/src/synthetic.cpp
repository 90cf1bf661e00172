#include "textray/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace textray::synthetic {

namespace {

constexpr double kPi = std::numbers::pi;

Point2 place(Point2 center, double rotation, Point2 local) {
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    return {center.x + c * local.x - s * local.y, center.y + s * local.x + c * local.y};
}

AnnotatedImage frame(std::string id, Polygon polygon, std::optional<std::size_t> split) {
    // Shift into a canvas with a fixed margin so every vertex is in bounds.
    constexpr double margin = 16.0;
    double min_x = polygon[0].x, min_y = polygon[0].y, max_x = min_x, max_y = min_y;
    for (const auto& v : polygon.vertices()) {
        min_x = std::min(min_x, v.x);
        min_y = std::min(min_y, v.y);
        max_x = std::max(max_x, v.x);
        max_y = std::max(max_y, v.y);
    }
    std::vector<Point2> shifted;
    shifted.reserve(polygon.size());
    for (const auto& v : polygon.vertices()) shifted.push_back({v.x - min_x + margin, v.y - min_y + margin});
    AnnotatedImage image;
    image.id = std::move(id);
    image.width = std::ceil(max_x - min_x + 2.0 * margin);
    image.height = std::ceil(max_y - min_y + 2.0 * margin);
    image.instances.push_back({Polygon(std::move(shifted)), split, false});
    return image;
}

}  // namespace

Polygon ellipse(Point2 center, double semi_major, double semi_minor, double rotation, std::size_t n_vertices) {
    std::vector<Point2> v(n_vertices);
    for (std::size_t i = 0; i < n_vertices; ++i) {
        const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_vertices);
        v[i] = place(center, rotation, {semi_major * std::cos(t), semi_minor * std::sin(t)});
    }
    return Polygon(std::move(v));
}

Polygon rounded_rectangle(Point2 center, double width, double height, double corner_radius, double rotation,
                          std::size_t arc_vertices) {
    const double r = std::min({corner_radius, width / 2.0, height / 2.0});
    const double hx = width / 2.0 - r;
    const double hy = height / 2.0 - r;
    const Point2 corners[4] = {{hx, hy}, {-hx, hy}, {-hx, -hy}, {hx, -hy}};
    std::vector<Point2> v;
    for (int c = 0; c < 4; ++c) {
        for (std::size_t k = 0; k < arc_vertices; ++k) {
            const double t = (static_cast<double>(c) + static_cast<double>(k) / static_cast<double>(arc_vertices - 1)) *
                             (kPi / 2.0);
            const Point2 p = place(center, rotation, {corners[c].x + r * std::cos(t), corners[c].y + r * std::sin(t)});
            if (v.empty() || !(v.back() == p)) v.push_back(p);
        }
    }
    if (v.back() == v.front()) v.pop_back();
    return Polygon(std::move(v));
}

Ribbon sinusoidal_ribbon(Point2 center, double length, double thickness, double amplitude, double cycles,
                         double rotation, std::size_t samples) {
    const double freq = 2.0 * kPi * cycles / length;
    std::vector<Point2> top, bottom;
    for (std::size_t i = 0; i < samples; ++i) {
        const double x = -length / 2.0 + length * static_cast<double>(i) / static_cast<double>(samples - 1);
        const double y = amplitude * std::sin(freq * (x + length / 2.0));
        const double slope = amplitude * freq * std::cos(freq * (x + length / 2.0));
        const double inv = 1.0 / std::sqrt(1.0 + slope * slope);
        const Point2 normal{-slope * inv, inv};
        const double h = thickness / 2.0;
        top.push_back(place(center, rotation, {x - h * normal.x, y - h * normal.y}));
        bottom.push_back(place(center, rotation, {x + h * normal.x, y + h * normal.y}));
    }
    std::vector<Point2> v = top;
    v.insert(v.end(), bottom.rbegin(), bottom.rend());
    return {Polygon(std::move(v)), samples};
}

Polygon spiral(Point2 center, double inner_radius, double pitch, double width, double turns,
               std::size_t samples_per_turn) {
    const auto n = static_cast<std::size_t>(std::ceil(turns * static_cast<double>(samples_per_turn))) + 1;
    const double t_max = turns * 2.0 * kPi;
    std::vector<Point2> outer, inner;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t_max * static_cast<double>(i) / static_cast<double>(n - 1);
        const double r = inner_radius + pitch * t / (2.0 * kPi);
        outer.push_back({center.x + (r + width / 2.0) * std::cos(t), center.y + (r + width / 2.0) * std::sin(t)});
        inner.push_back({center.x + (r - width / 2.0) * std::cos(t), center.y + (r - width / 2.0) * std::sin(t)});
    }
    std::vector<Point2> v = outer;
    v.insert(v.end(), inner.rbegin(), inner.rend());
    return Polygon(std::move(v));
}

ShapeKind corpus_kind(std::size_t i) { return static_cast<ShapeKind>(i % 3); }

std::vector<AnnotatedImage> make_corpus(const CorpusSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<AnnotatedImage> images;
    images.reserve(spec.instances);
    const double log_lo = std::log(spec.min_aspect);
    const double log_hi = std::log(spec.max_aspect);
    for (std::size_t i = 0; i < spec.instances; ++i) {
        const double aspect = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
        const double rotation = (unit(rng) * 2.0 - 1.0) * kPi;
        const double major = 40.0 + 160.0 * unit(rng);
        const Point2 origin{0.0, 0.0};
        const std::string id = "synth_" + std::to_string(i);
        switch (corpus_kind(i)) {
            case ShapeKind::ellipse:
                images.push_back(frame(id, ellipse(origin, major, major / aspect, rotation), std::nullopt));
                break;
            case ShapeKind::rounded_rectangle: {
                const double h = 2.0 * major / aspect;
                const double r = (0.1 + 0.4 * unit(rng)) * h;
                images.push_back(frame(id, rounded_rectangle(origin, 2.0 * major, h, r, rotation), std::nullopt));
                break;
            }
            case ShapeKind::ribbon: {
                const double length = 2.0 * major;
                const double thickness = length / aspect;
                const double cycles = 0.5 + 0.5 * unit(rng);
                const double freq = 2.0 * kPi * cycles / length;
                // Keep the inner offset curve free of cusps.
                const double amp_limit = std::min(length / 8.0, 1.6 / (thickness * freq * freq));
                const double amplitude = (0.3 + 0.7 * unit(rng)) * amp_limit;
                auto ribbon = sinusoidal_ribbon(origin, length, thickness, amplitude, cycles, rotation);
                images.push_back(frame(id, std::move(ribbon.polygon), ribbon.pairing_split));
                break;
            }
        }
    }
    return images;
}

std::vector<AnnotatedImage> make_spiral_corpus() {
    return {frame("spiral_0", spiral({0.0, 0.0}, 10.0, 30.0, 12.0, 2.5), std::nullopt)};
}

}  // namespace textray::synthetic
