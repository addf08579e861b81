#include "lumisep/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace lumisep {

double polygon_area(std::span<const Vec2> polygon)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        acc += cross2(polygon[i], polygon[(i + 1) % polygon.size()]);
    }
    return 0.5 * acc;
}

std::vector<Vec2> convex_hull_2d(std::span<const Vec2> points)
{
    std::vector<Vec2> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) throw Error(ErrorCode::AllCollinear, "fewer than three distinct points");

    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    auto turn = [&](const Vec2& o, const Vec2& a, const Vec2& b) { return cross2(a - o, b - o); };
    for (const auto& p : pts) {
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
        while (k >= lower && turn(hull[k - 2], hull[k - 1], *it) <= 0) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    if (hull.size() < 3) throw Error(ErrorCode::AllCollinear, "points are collinear");
    return hull;
}

double Triangle2::area() const
{
    return 0.5 * std::abs(cross2(vertices[1] - vertices[0], vertices[2] - vertices[0]));
}

bool Triangle2::contains(const Vec2& p, double slack) const
{
    const double orient = cross2(vertices[1] - vertices[0], vertices[2] - vertices[0]) >= 0 ? 1.0 : -1.0;
    for (int i = 0; i < 3; ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % 3];
        const double len = (b - a).norm();
        if (orient * cross2(b - a, p - a) < -slack * len) return false;
    }
    return true;
}

namespace {

/// Half-plane n·x ≤ c with unit outward normal n.
struct Line {
    Vec2 n;
    double c;
    Vec2 direction() const { return {-n.y(), n.x()}; }
};

std::optional<Vec2> intersect(const Line& a, const Line& b)
{
    const double det = cross2(a.n, b.n);
    if (std::abs(det) < 1e-14) return std::nullopt;
    return Vec2((a.c * b.n.y() - b.c * a.n.y()) / det, (a.n.x() * b.c - b.n.x() * a.c) / det);
}

/// The three half-planes bound a triangle iff their normals positively span the plane.
bool bounded(const Line& a, const Line& b, const Line& c)
{
    const double l1 = cross2(b.n, c.n);
    const double l2 = cross2(c.n, a.n);
    const double l3 = cross2(a.n, b.n);
    return (l1 > 0 && l2 > 0 && l3 > 0) || (l1 < 0 && l2 < 0 && l3 < 0);
}

struct Candidate {
    double area = std::numeric_limits<double>::infinity();
    Triangle2 triangle;
};

struct Search {
    std::span<const Vec2> hull;
    double hull_area;
    double slack;
    Candidate best;

    void consider(const Line& a, const Line& b, const Line& c)
    {
        if (!bounded(a, b, c)) return;
        auto p = intersect(a, b);
        auto q = intersect(b, c);
        auto r = intersect(c, a);
        if (!p || !q || !r) return;
        Triangle2 t{{*p, *q, *r}};
        const double area = t.area();
        // Near-concurrent lines give slivers that cannot enclose anything.
        if (!std::isfinite(area) || area >= best.area || area < hull_area * (1 - 1e-9)) return;
        for (const auto& v : hull) {
            if (!t.contains(v, slack)) return;
        }
        best.area = area;
        best.triangle = t;
    }
};

}  // namespace

Triangle2 min_area_enclosing_triangle(std::span<const Vec2> hull)
{
    const std::size_t h = hull.size();
    if (h < 3) throw Error(ErrorCode::DegenerateHull, "hull has fewer than three vertices");
    const double area = polygon_area(hull);
    double scale = 0.0;
    for (const auto& p : hull) scale = std::max(scale, (p - hull[0]).norm());
    if (!(area > 1e-14 * scale * scale)) {
        throw Error(ErrorCode::DegenerateHull, "hull must be counter-clockwise with positive area");
    }

    std::vector<Line> edges(h);
    for (std::size_t i = 0; i < h; ++i) {
        const Vec2 d = hull[(i + 1) % h] - hull[i];
        const double len = d.norm();
        if (!(len > 0)) throw Error(ErrorCode::DegenerateHull, "repeated hull vertex");
        Vec2 n(d.y() / len, -d.x() / len);
        edges[i] = Line{n, n.dot(hull[i])};
    }

    Search search{hull, area, 1e-9 * std::max(1.0, scale), {}};
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < h; ++j) {
            if (j == i) continue;
            const Line& la = edges[i];
            const Line& lb = edges[j];
            auto apex = intersect(la, lb);
            if (!apex) continue;

            for (std::size_t k = 0; k < h; ++k) {
                if (k != i && k != j) search.consider(la, lb, edges[k]);
            }

            // Third side through vertex v with v at its midpoint:
            // X = apex + s·dA on la, Y = apex + t·dB on lb, X + Y = 2v.
            const Vec2 da = la.direction();
            const Vec2 db = lb.direction();
            const double det = cross2(da, db);
            for (std::size_t v = 0; v < h; ++v) {
                const Vec2 rhs = 2.0 * (hull[v] - *apex);
                const double s = cross2(rhs, db) / det;
                const double t = cross2(da, rhs) / det;
                const Vec2 x = *apex + s * da;
                const Vec2 y = *apex + t * db;
                const Vec2 side = y - x;
                const double len = side.norm();
                // Both flush edges meet at v: the "line" collapses to a point.
                if (!(len > 1e-12 * scale)) continue;
                Vec2 n(side.y() / len, -side.x() / len);
                if (n.dot(*apex) > n.dot(hull[v])) n = -n;  // outward = away from the apex
                // Supporting iff n lies in the normal cone of v.
                const Vec2& n_prev = edges[(v + h - 1) % h].n;
                const Vec2& n_next = edges[v].n;
                if (cross2(n_prev, n) < -1e-12 || cross2(n, n_next) < -1e-12) continue;
                search.consider(la, lb, Line{n, n.dot(hull[v])});
            }
        }
    }
    if (!std::isfinite(search.best.area)) throw Error(ErrorCode::DegenerateHull, "no enclosing triangle found");

    Triangle2 out = search.best.triangle;
    if (cross2(out.vertices[1] - out.vertices[0], out.vertices[2] - out.vertices[0]) < 0) {
        std::swap(out.vertices[1], out.vertices[2]);
    }
    for (const auto& p : hull) {
        if (!out.contains(p, search.slack)) {
            throw Error(ErrorCode::DegenerateHull, "enclosing triangle failed containment check");
        }
    }
    return out;
}

}  // namespace lumisep
