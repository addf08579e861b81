#pragma once

#include <array>
#include <span>
#include <vector>

#include "lumisep/image.hpp"

namespace lumisep {

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Signed area, positive for counter-clockwise polygons.
double polygon_area(std::span<const Vec2> polygon);

/// Andrew's monotone chain. Returns the hull counter-clockwise, starting at
/// the lowest-x (then lowest-y) point, with collinear boundary points dropped.
/// Throws AllCollinear when fewer than three hull vertices remain.
std::vector<Vec2> convex_hull_2d(std::span<const Vec2> points);

struct Triangle2 {
    std::array<Vec2, 3> vertices;

    double area() const;
    /// True when p is inside or within `slack` (distance) of every edge.
    bool contains(const Vec2& p, double slack) const;
};

/// Smallest-area triangle enclosing a convex counter-clockwise polygon.
///
/// Some optimal triangle always has two sides flush with polygon edges:
/// at least one side is flush, and with that side fixed the area is
/// stationary in the remaining two only when both touch the polygon at their
/// midpoints, which forces a constant-area family that ends in a flush
/// configuration. So every pair of edge lines is tried, and for each pair the
/// third side is the best of (a) the remaining edge lines and (b) for every
/// vertex, the line through it that has it as its midpoint, when that line
/// supports the polygon. O(h³) for h hull vertices.
///
/// Throws DegenerateHull for fewer than three vertices or zero area.
Triangle2 min_area_enclosing_triangle(std::span<const Vec2> hull);

}  // namespace lumisep
