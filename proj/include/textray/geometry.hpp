#pragma once

#include <optional>
#include <span>
#include <vector>

namespace textray {

/// Geometric tolerance in pixels used by every boundary test.
inline constexpr double kGeomEps = 1e-9;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double norm(Point2 p);

/// Closed polygon given by its vertex ring; the closing edge is implicit.
/// Construction only enforces the cheap invariants (>= 3 vertices, finite,
/// no repeated consecutive vertex). Simplicity is checked by validate().
class Polygon {
public:
    Polygon() = default;
    explicit Polygon(std::vector<Point2> vertices);

    const std::vector<Point2>& vertices() const noexcept { return vertices_; }
    std::size_t size() const noexcept { return vertices_.size(); }
    const Point2& operator[](std::size_t i) const { return vertices_[i]; }
    /// Edge i runs from vertex i to vertex (i + 1) mod n.
    Point2 edge_start(std::size_t i) const { return vertices_[i]; }
    Point2 edge_end(std::size_t i) const { return vertices_[(i + 1) % vertices_.size()]; }

    friend bool operator==(const Polygon&, const Polygon&) = default;

private:
    std::vector<Point2> vertices_;
};

/// Top and bottom edges of a text instance, vertex i of one paired with
/// vertex i of the other. Both run in the same reading direction.
struct PairedPolyline {
    std::vector<Point2> top;
    std::vector<Point2> bottom;

    friend bool operator==(const PairedPolyline&, const PairedPolyline&) = default;
};

enum class Location { inside, outside, boundary };

bool is_simple(const Polygon& polygon);
/// Throws InvalidPolygon unless the polygon is simple with non-zero area.
void validate(const Polygon& polygon);

double signed_area(const Polygon& polygon);
double area(const Polygon& polygon);
double perimeter(const Polygon& polygon);
Point2 centroid(const Polygon& polygon);
double distance_to_segment(Point2 p, Point2 a, Point2 b);
double distance_to_boundary(const Polygon& polygon, Point2 p);

/// Distances along the ray origin + t (cos angle, sin angle), t >= 0, at
/// which it meets the boundary, ascending and de-duplicated. Vertex hits
/// are counted once through half-open edges [start, end).
std::vector<double> ray_polygon_intersections(const Polygon& polygon, Point2 origin, double angle);

/// Same as above without the simplicity check, for hot loops over a
/// polygon that was validated once.
std::vector<double> ray_polygon_intersections_unchecked(const Polygon& polygon, Point2 origin,
                                                        double angle);

/// Even-odd classification with a kGeomEps boundary band.
Location point_in_polygon(const Polygon& polygon, Point2 p);

/// Area(a ∩ b) / area(a ∪ b). Handles non-convex inputs.
double polygon_iou(const Polygon& a, const Polygon& b);

/// Intersection area through signed triangle-fan decomposition. Exact for
/// any closed ring under winding-number semantics; used as the fallback
/// route of polygon_iou.
double intersection_area_fan(const Polygon& a, const Polygon& b);

/// Interior point farthest from the boundary, found to within `precision`
/// pixels by quadtree cell refinement.
Point2 pole_of_inaccessibility(const Polygon& polygon, double precision = 0.5);

/// Pole of the polar frame. With a pairing, the arc-length midpoint of the
/// centerline through the top/bottom midpoints. Without one, the centroid,
/// or the pole of inaccessibility when the centroid is not strictly inside.
Point2 text_center(const Polygon& polygon, const std::optional<PairedPolyline>& pairing = std::nullopt);

}  // namespace textray
