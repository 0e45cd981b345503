#include "shelfsim/geometry.hpp"

#include <algorithm>

namespace shelfsim {

double polygon_area(const Polygon2& poly) {
    if (poly.size() < 3) return 0.0;
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        a += cross(p, q);
    }
    return 0.5 * std::fabs(a);
}

Polygon2 convex_hull(std::vector<Vec2> pts) {
    if (pts.size() < 3) return pts;
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
                  return a.x == b.x && a.y == b.y;
              }),
              pts.end());
    if (pts.size() < 3) return pts;

    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {  // lower
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {  // upper
        while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

Polygon2 clip_convex(const Polygon2& subject, const Polygon2& clip) {
    if (subject.empty() || clip.size() < 3) return {};
    Polygon2 output = subject;
    for (std::size_t i = 0; i < clip.size(); ++i) {
        const Vec2 a = clip[i];
        const Vec2 b = clip[(i + 1) % clip.size()];
        const Vec2 edge = b - a;
        Polygon2 input = std::move(output);
        output.clear();
        if (input.empty()) return {};
        for (std::size_t j = 0; j < input.size(); ++j) {
            const Vec2 cur = input[j];
            const Vec2 nxt = input[(j + 1) % input.size()];
            const double cur_side = cross(edge, cur - a);
            const double nxt_side = cross(edge, nxt - a);
            if (cur_side >= 0.0) {
                output.push_back(cur);
                if (nxt_side < 0.0) {
                    double t = cur_side / (cur_side - nxt_side);
                    output.push_back(cur + (nxt - cur) * t);
                }
            } else if (nxt_side >= 0.0) {
                double t = cur_side / (cur_side - nxt_side);
                output.push_back(cur + (nxt - cur) * t);
            }
        }
    }
    return output;
}

double overlap_area(const Polygon2& a, const Polygon2& b) {
    return polygon_area(clip_convex(a, b));
}

bool point_in_convex(const Polygon2& poly, const Vec2& p, double margin) {
    if (poly.size() < 3) return false;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 a = poly[i];
        const Vec2 b = poly[(i + 1) % poly.size()];
        const Vec2 edge = b - a;
        double len = length(edge);
        if (len <= 0.0) return false;
        // signed distance of p left of edge, must clear the margin
        double d = cross(edge, p - a) / len;
        if (d < margin) return false;
    }
    return true;
}

OrientedRect min_area_rect(const std::vector<Vec2>& points) {
    Polygon2 hull = convex_hull(points);
    OrientedRect best;
    if (hull.size() < 3) {
        // Degenerate: axis-aligned bounding box of whatever we have.
        double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
        if (!points.empty()) {
            min_x = max_x = points[0].x;
            min_y = max_y = points[0].y;
            for (const Vec2& p : points) {
                min_x = std::min(min_x, p.x); max_x = std::max(max_x, p.x);
                min_y = std::min(min_y, p.y); max_y = std::max(max_y, p.y);
            }
        }
        best.center = {0.5 * (min_x + max_x), 0.5 * (min_y + max_y)};
        best.size = {max_x - min_x, max_y - min_y};
        best.angle = 0.0;
        return best;
    }

    double best_area = -1.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        Vec2 e = hull[(i + 1) % hull.size()] - hull[i];
        double elen = length(e);
        if (elen <= 0.0) continue;
        Vec2 u{e.x / elen, e.y / elen};       // rect local x
        Vec2 v{-u.y, u.x};                    // rect local y
        double min_u = 0, max_u = 0, min_v = 0, max_v = 0;
        bool first = true;
        for (const Vec2& p : hull) {
            double pu = dot(p, u), pv = dot(p, v);
            if (first) {
                min_u = max_u = pu; min_v = max_v = pv; first = false;
            } else {
                min_u = std::min(min_u, pu); max_u = std::max(max_u, pu);
                min_v = std::min(min_v, pv); max_v = std::max(max_v, pv);
            }
        }
        double area = (max_u - min_u) * (max_v - min_v);
        if (best_area < 0.0 || area < best_area - 1e-15) {
            best_area = area;
            double cu = 0.5 * (min_u + max_u), cv = 0.5 * (min_v + max_v);
            best.center = {cu * u.x + cv * v.x, cu * u.y + cv * v.y};
            best.size = {max_u - min_u, max_v - min_v};
            best.angle = std::atan2(u.y, u.x);
        }
    }

    // Normalize: angle in (-pi/4, pi/4], swapping axes when a quarter turn
    // gives a smaller tilt. Keeps width/height assignment stable for the
    // near-upright boxes this pipeline deals in.
    while (best.angle > M_PI / 2) best.angle -= M_PI;
    while (best.angle <= -M_PI / 2) best.angle += M_PI;
    if (best.angle > M_PI / 4) {
        best.angle -= M_PI / 2;
        std::swap(best.size.x, best.size.y);
    } else if (best.angle <= -M_PI / 4) {
        best.angle += M_PI / 2;
        std::swap(best.size.x, best.size.y);
    }
    return best;
}

Polygon2 rect_corners(const OrientedRect& r) {
    double c = std::cos(r.angle), s = std::sin(r.angle);
    double hx = 0.5 * r.size.x, hy = 0.5 * r.size.y;
    Polygon2 out;
    out.reserve(4);
    const double sx[4] = {-1, 1, 1, -1};
    const double sy[4] = {-1, -1, 1, 1};
    for (int i = 0; i < 4; ++i) {
        double lx = sx[i] * hx, ly = sy[i] * hy;
        out.push_back({r.center.x + c * lx - s * ly, r.center.y + s * lx + c * ly});
    }
    return out;
}

}  // namespace shelfsim
