#include "textray/geometry.hpp"

#include "textray/errors.hpp"

#define BOOST_GEOMETRY_NO_ROBUSTNESS
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace textray {

namespace bg = boost::geometry;

namespace {

using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, /*ClockWise=*/false, /*Closed=*/true>;
using BgMultiPolygon = bg::model::multi_polygon<BgPolygon>;

BgPolygon to_boost(const Polygon& polygon) {
    BgPolygon out;
    auto& ring = out.outer();
    ring.reserve(polygon.size() + 1);
    for (const auto& v : polygon.vertices()) ring.emplace_back(v.x, v.y);
    ring.emplace_back(polygon[0].x, polygon[0].y);
    bg::correct(out);
    return out;
}

int orientation(Point2 a, Point2 b, Point2 c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

bool segments_touch(Point2 a, Point2 b, Point2 c, Point2 d) {
    const int o1 = orientation(a, b, c);
    const int o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a);
    const int o4 = orientation(c, d, b);
    if (o1 * o2 < 0 && o3 * o4 < 0) return true;
    return distance_to_segment(c, a, b) <= kGeomEps || distance_to_segment(d, a, b) <= kGeomEps ||
           distance_to_segment(a, c, d) <= kGeomEps || distance_to_segment(b, c, d) <= kGeomEps;
}

// Clips a convex CCW polygon against the half-plane left of a->b.
std::vector<Point2> clip_half_plane(const std::vector<Point2>& poly, Point2 a, Point2 b) {
    std::vector<Point2> out;
    if (poly.empty()) return out;
    const Point2 dir = b - a;
    auto side = [&](Point2 p) { return cross(dir, p - a); };
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 cur = poly[i];
        const Point2 nxt = poly[(i + 1) % poly.size()];
        const double sc = side(cur);
        const double sn = side(nxt);
        if (sc >= 0.0) out.push_back(cur);
        if ((sc >= 0.0) != (sn >= 0.0)) {
            const double t = sc / (sc - sn);
            out.push_back(cur + t * (nxt - cur));
        }
    }
    return out;
}

double ring_area(const std::vector<Point2>& ring) {
    double acc = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) acc += cross(ring[i], ring[(i + 1) % ring.size()]);
    return 0.5 * acc;
}

struct Triangle {
    Point2 a, b, c;
    double sign;
    double min_x, min_y, max_x, max_y;
};

std::vector<Triangle> fan(const Polygon& polygon, Point2 origin) {
    std::vector<Triangle> tris;
    tris.reserve(polygon.size());
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Point2 p = polygon.edge_start(i) - origin;
        const Point2 q = polygon.edge_end(i) - origin;
        const double c = cross(p, q);
        if (c == 0.0) continue;
        Triangle t{{0.0, 0.0}, p, q, c > 0.0 ? 1.0 : -1.0, 0, 0, 0, 0};
        if (c < 0.0) std::swap(t.b, t.c);
        t.min_x = std::min({0.0, p.x, q.x});
        t.max_x = std::max({0.0, p.x, q.x});
        t.min_y = std::min({0.0, p.y, q.y});
        t.max_y = std::max({0.0, p.y, q.y});
        tris.push_back(t);
    }
    return tris;
}

// Signed distance to the boundary, positive inside.
double signed_boundary_distance(const Polygon& polygon, Point2 p) {
    const double d = distance_to_boundary(polygon, p);
    return point_in_polygon(polygon, p) == Location::outside ? -d : d;
}

}  // namespace

double norm(Point2 p) { return std::hypot(p.x, p.y); }

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) {
        throw InvalidPolygon("polygon needs at least 3 vertices, got " + std::to_string(vertices_.size()));
    }
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const auto& v = vertices_[i];
        if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
            throw InvalidPolygon("non-finite vertex at index " + std::to_string(i));
        }
        if (v == vertices_[(i + 1) % vertices_.size()]) {
            throw InvalidPolygon("repeated consecutive vertex at index " + std::to_string(i));
        }
    }
}

double signed_area(const Polygon& polygon) {
    double acc = 0.0;
    const Point2 o = polygon[0];
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        acc += cross(polygon.edge_start(i) - o, polygon.edge_end(i) - o);
    }
    return 0.5 * acc;
}

double area(const Polygon& polygon) { return std::abs(signed_area(polygon)); }

double perimeter(const Polygon& polygon) {
    double acc = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) acc += norm(polygon.edge_end(i) - polygon.edge_start(i));
    return acc;
}

Point2 centroid(const Polygon& polygon) {
    // Relative to vertex 0 to limit cancellation for far-off coordinates.
    const Point2 o = polygon[0];
    double a2 = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Point2 p = polygon.edge_start(i) - o;
        const Point2 q = polygon.edge_end(i) - o;
        const double c = cross(p, q);
        a2 += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    if (a2 == 0.0) throw InvalidPolygon("centroid of a zero-area polygon");
    return {o.x + cx / (3.0 * a2), o.y + cy / (3.0 * a2)};
}

double distance_to_segment(Point2 p, Point2 a, Point2 b) {
    const Point2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return norm(p - a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

double distance_to_boundary(const Polygon& polygon, Point2 p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        best = std::min(best, distance_to_segment(p, polygon.edge_start(i), polygon.edge_end(i)));
    }
    return best;
}

bool is_simple(const Polygon& polygon) {
    const std::size_t n = polygon.size();
    if (n < 3) return false;
    if (area(polygon) <= 0.0) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = polygon.edge_start(i);
        const Point2 b = polygon.edge_end(i);
        // Adjacent edge shares vertex b; it must not fold back onto this one.
        const Point2 c = polygon.edge_end((i + 1) % n);
        if (orientation(a, b, c) == 0 && dot(b - a, c - b) < 0.0) return false;
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (segments_touch(a, b, polygon.edge_start(j), polygon.edge_end(j))) return false;
        }
    }
    return true;
}

void validate(const Polygon& polygon) {
    if (!is_simple(polygon)) throw InvalidPolygon("polygon is not simple or has zero area");
}

std::vector<double> ray_polygon_intersections_unchecked(const Polygon& polygon, Point2 origin, double angle) {
    const Point2 dir{std::cos(angle), std::sin(angle)};
    std::vector<double> hits;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Point2 a = polygon.edge_start(i);
        const Point2 b = polygon.edge_end(i);
        const Point2 e = b - a;
        const double len = norm(e);
        const Point2 ao = a - origin;
        const double denom = cross(dir, e);
        if (std::abs(denom) <= 1e-15 * len) {
            // Parallel; a collinear edge contributes its start vertex (the
            // end vertex belongs to the next edge).
            if (std::abs(cross(ao, dir)) <= kGeomEps) {
                const double t = dot(ao, dir);
                if (t >= -kGeomEps) hits.push_back(std::max(t, 0.0));
            }
            continue;
        }
        const double t = cross(ao, e) / denom;
        const double s = cross(ao, dir) / denom;
        const double along = s * len;
        // Half-open edge [start, end): a hit within the band before the end
        // vertex is left to the next edge.
        if (along < -kGeomEps || along >= len - kGeomEps) continue;
        if (t < -kGeomEps) continue;
        hits.push_back(std::max(t, 0.0));
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end(), [](double x, double y) { return y - x <= kGeomEps; }),
               hits.end());
    return hits;
}

std::vector<double> ray_polygon_intersections(const Polygon& polygon, Point2 origin, double angle) {
    validate(polygon);
    if (!std::isfinite(origin.x) || !std::isfinite(origin.y)) throw InvalidPolygon("non-finite ray origin");
    return ray_polygon_intersections_unchecked(polygon, origin, angle);
}

Location point_in_polygon(const Polygon& polygon, Point2 p) {
    if (distance_to_boundary(polygon, p) <= kGeomEps) return Location::boundary;
    bool inside = false;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Point2 a = polygon.edge_start(i);
        const Point2 b = polygon.edge_end(i);
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside ? Location::inside : Location::outside;
}

double intersection_area_fan(const Polygon& a, const Polygon& b) {
    const Point2 origin = a[0];
    const auto ta = fan(a, origin);
    const auto tb = fan(b, origin);
    double acc = 0.0;
    for (const auto& s : ta) {
        for (const auto& t : tb) {
            if (s.max_x <= t.min_x || t.max_x <= s.min_x || s.max_y <= t.min_y || t.max_y <= s.min_y) continue;
            std::vector<Point2> piece{s.a, s.b, s.c};
            piece = clip_half_plane(piece, t.a, t.b);
            piece = clip_half_plane(piece, t.b, t.c);
            piece = clip_half_plane(piece, t.c, t.a);
            if (piece.size() < 3) continue;
            acc += s.sign * t.sign * ring_area(piece);
        }
    }
    // Orientation of each input flips the sign of its fan; normalize.
    const double sa = signed_area(a) < 0.0 ? -1.0 : 1.0;
    const double sb = signed_area(b) < 0.0 ? -1.0 : 1.0;
    return std::max(0.0, acc * sa * sb);
}

double polygon_iou(const Polygon& a, const Polygon& b) {
    const double area_a = area(a);
    const double area_b = area(b);
    if (area_a <= 0.0 || area_b <= 0.0) throw InvalidPolygon("polygon_iou on a zero-area polygon");

    double inter = 0.0;
    const BgPolygon pa = to_boost(a);
    const BgPolygon pb = to_boost(b);
    bool boost_ok = bg::is_valid(pa) && bg::is_valid(pb);
    if (boost_ok) {
        try {
            BgMultiPolygon out;
            bg::intersection(pa, pb, out);
            inter = bg::area(out);
        } catch (const bg::exception&) {
            boost_ok = false;
        }
    }
    if (!boost_ok) inter = intersection_area_fan(a, b);

    inter = std::clamp(inter, 0.0, std::min(area_a, area_b));
    const double uni = area_a + area_b - inter;
    return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

Point2 pole_of_inaccessibility(const Polygon& polygon, double precision) {
    double min_x = polygon[0].x, max_x = polygon[0].x, min_y = polygon[0].y, max_y = polygon[0].y;
    for (const auto& v : polygon.vertices()) {
        min_x = std::min(min_x, v.x);
        max_x = std::max(max_x, v.x);
        min_y = std::min(min_y, v.y);
        max_y = std::max(max_y, v.y);
    }
    const double cell = std::min(max_x - min_x, max_y - min_y);
    if (cell <= 0.0) return polygon[0];

    struct Cell {
        Point2 c;
        double h;
        double d;
        double potential;
    };
    auto make = [&](Point2 c, double h) {
        const double d = signed_boundary_distance(polygon, c);
        return Cell{c, h, d, d + h * std::sqrt(2.0)};
    };
    auto cmp = [](const Cell& l, const Cell& r) { return l.potential < r.potential; };
    std::priority_queue<Cell, std::vector<Cell>, decltype(cmp)> queue(cmp);

    const double h = cell / 2.0;
    for (double x = min_x; x < max_x; x += cell) {
        for (double y = min_y; y < max_y; y += cell) queue.push(make({x + h, y + h}, h));
    }

    Cell best = make(centroid(polygon), 0.0);
    const Cell bbox_center = make({(min_x + max_x) / 2.0, (min_y + max_y) / 2.0}, 0.0);
    if (bbox_center.d > best.d) best = bbox_center;

    while (!queue.empty()) {
        const Cell c = queue.top();
        queue.pop();
        if (c.d > best.d) best = c;
        if (c.potential - best.d <= precision) continue;
        const double hh = c.h / 2.0;
        queue.push(make({c.c.x - hh, c.c.y - hh}, hh));
        queue.push(make({c.c.x + hh, c.c.y - hh}, hh));
        queue.push(make({c.c.x - hh, c.c.y + hh}, hh));
        queue.push(make({c.c.x + hh, c.c.y + hh}, hh));
    }
    return best.c;
}

Point2 text_center(const Polygon& polygon, const std::optional<PairedPolyline>& pairing) {
    validate(polygon);
    if (pairing) {
        const auto& top = pairing->top;
        const auto& bottom = pairing->bottom;
        if (top.size() != bottom.size() || top.size() < 2) {
            throw InvalidPolygon("pairing needs equal top/bottom lengths >= 2");
        }
        std::vector<Point2> mid(top.size());
        for (std::size_t i = 0; i < top.size(); ++i) mid[i] = 0.5 * (top[i] + bottom[i]);
        std::vector<double> seg(mid.size() - 1);
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < mid.size(); ++i) {
            seg[i] = norm(mid[i + 1] - mid[i]);
            total += seg[i];
        }
        double remaining = total / 2.0;
        for (std::size_t i = 0; i < seg.size(); ++i) {
            if (remaining <= seg[i] && seg[i] > 0.0) {
                return mid[i] + (remaining / seg[i]) * (mid[i + 1] - mid[i]);
            }
            remaining -= seg[i];
        }
        return mid.back();
    }
    const Point2 c = centroid(polygon);
    if (point_in_polygon(polygon, c) == Location::inside) return c;
    return pole_of_inaccessibility(polygon, 0.5);
}

}  // namespace textray
