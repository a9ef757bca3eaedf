#ifndef FLOODOPT_GEOMETRY_HPP
#define FLOODOPT_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace floodopt {

struct Point {
    double x = 0.0; // easting, m
    double y = 0.0; // northing, m

    friend bool operator==(const Point&, const Point&) = default;
};

/// Simple polygon as an ordered ring. A closing vertex equal to the first is tolerated.
using Ring = std::vector<Point>;

struct Box {
    double x0, y0, x1, y1;
};

inline Ring open_ring(Ring ring)
{
    if (ring.size() > 1 && ring.front() == ring.back())
        ring.pop_back();
    return ring;
}

inline double signed_area(const Ring& ring)
{
    double a = 0.0;
    const auto n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = ring[i];
        const auto& q = ring[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

inline Box bounding_box(const Ring& ring)
{
    Box b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : ring) {
        b.x0 = std::min(b.x0, p.x);
        b.y0 = std::min(b.y0, p.y);
        b.x1 = std::max(b.x1, p.x);
        b.y1 = std::max(b.y1, p.y);
    }
    return b;
}

// Even-odd crossing test.
inline bool point_in_ring(const Point& pt, const Ring& ring)
{
    bool inside = false;
    const auto n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto& a = ring[i];
        const auto& b = ring[j];
        if ((a.y > pt.y) != (b.y > pt.y)) {
            const double xc = a.x + (pt.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (pt.x < xc)
                inside = !inside;
        }
    }
    return inside;
}

inline double segment_distance(const Point& p, const Point& a, const Point& b)
{
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double ex = a.x + t * dx - p.x;
    const double ey = a.y + t * dy - p.y;
    return std::sqrt(ex * ex + ey * ey);
}

/// Euclidean distance from a point to a polygon; zero inside.
inline double distance_to_ring(const Point& p, const Ring& ring)
{
    if (ring.empty())
        return std::numeric_limits<double>::infinity();
    if (ring.size() >= 3 && point_in_ring(p, ring))
        return 0.0;
    double best = std::numeric_limits<double>::infinity();
    const auto n = ring.size();
    for (std::size_t i = 0; i < n; ++i)
        best = std::min(best, segment_distance(p, ring[i], ring[(i + 1) % n]));
    return best;
}

/// Area of the overlap between a simple polygon and an axis-aligned box
/// (Sutherland-Hodgman clip against the four box edges).
inline double overlap_area(const Ring& ring, const Box& box)
{
    Ring poly = ring;
    auto clip = [&poly](auto inside, auto intersect) {
        Ring out;
        const auto n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto& cur = poly[i];
            const auto& prev = poly[(i + n - 1) % n];
            const bool ci = inside(cur);
            const bool pi = inside(prev);
            if (ci) {
                if (!pi)
                    out.push_back(intersect(prev, cur));
                out.push_back(cur);
            } else if (pi) {
                out.push_back(intersect(prev, cur));
            }
        }
        poly = std::move(out);
    };
    auto at_x = [](double x) {
        return [x](const Point& a, const Point& b) {
            const double t = (x - a.x) / (b.x - a.x);
            return Point{x, a.y + t * (b.y - a.y)};
        };
    };
    auto at_y = [](double y) {
        return [y](const Point& a, const Point& b) {
            const double t = (y - a.y) / (b.y - a.y);
            return Point{a.x + t * (b.x - a.x), y};
        };
    };
    clip([&](const Point& p) { return p.x >= box.x0; }, at_x(box.x0));
    if (poly.empty())
        return 0.0;
    clip([&](const Point& p) { return p.x <= box.x1; }, at_x(box.x1));
    if (poly.empty())
        return 0.0;
    clip([&](const Point& p) { return p.y >= box.y0; }, at_y(box.y0));
    if (poly.empty())
        return 0.0;
    clip([&](const Point& p) { return p.y <= box.y1; }, at_y(box.y1));
    if (poly.size() < 3)
        return 0.0;
    return std::abs(signed_area(poly));
}

} // namespace floodopt

#endif
