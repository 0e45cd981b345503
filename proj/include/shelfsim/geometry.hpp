#ifndef SHELFSIM_GEOMETRY_HPP
#define SHELFSIM_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace shelfsim {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    bool operator==(const Vec3&) const = default;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length_sq(const Vec3& v) { return dot(v, v); }
inline double length(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) {
    double len = length(v);
    return len > 0.0 ? v / len : Vec3{};
}
inline Vec3 comp_mul(const Vec3& a, const Vec3& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
inline Vec3 abs(const Vec3& v) { return {std::fabs(v.x), std::fabs(v.y), std::fabs(v.z)}; }

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double length(const Vec2& v) { return std::hypot(v.x, v.y); }

// Column-major not needed; plain row-vector 3x3 with explicit members.
struct Mat3 {
    // m[row][col]
    std::array<std::array<double, 3>, 3> m{};

    static Mat3 identity() {
        Mat3 r;
        r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
        return r;
    }
    static Mat3 diagonal(double a, double b, double c) {
        Mat3 r;
        r.m[0][0] = a; r.m[1][1] = b; r.m[2][2] = c;
        return r;
    }

    Vec3 col(int j) const { return {m[0][j], m[1][j], m[2][j]}; }
    Vec3 row(int i) const { return {m[i][0], m[i][1], m[i][2]}; }

    Vec3 operator*(const Vec3& v) const {
        return {dot(row(0), v), dot(row(1), v), dot(row(2), v)};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j] + m[i][2] * o.m[2][j];
        return r;
    }
    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r.m[i][j] = m[j][i];
        return r;
    }
};

struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    Quat() = default;
    Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    bool operator==(const Quat&) const = default;

    static Quat from_axis_angle(const Vec3& axis, double angle) {
        double half = 0.5 * angle;
        double s = std::sin(half);
        Vec3 a = shelfsim::normalized(axis);
        return {std::cos(half), a.x * s, a.y * s, a.z * s};
    }
    static Quat yaw_z(double yaw) { return from_axis_angle({0, 0, 1}, yaw); }

    Quat operator*(const Quat& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }
    Quat conjugate() const { return {w, -x, -y, -z}; }

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    Quat normalized() const {
        double n = norm();
        return n > 0.0 ? Quat{w / n, x / n, y / n, z / n} : Quat{};
    }

    Vec3 rotate(const Vec3& v) const {
        // q v q* expanded
        Vec3 u{x, y, z};
        return u * (2.0 * dot(u, v)) + v * (w * w - dot(u, u)) + cross(u, v) * (2.0 * w);
    }

    Mat3 to_mat3() const {
        Mat3 r;
        double xx = x * x, yy = y * y, zz = z * z;
        double xy = x * y, xz = x * z, yz = y * z;
        double wx = w * x, wy = w * y, wz = w * z;
        r.m[0] = {1 - 2 * (yy + zz), 2 * (xy - wz), 2 * (xz + wy)};
        r.m[1] = {2 * (xy + wz), 1 - 2 * (xx + zz), 2 * (yz - wx)};
        r.m[2] = {2 * (xz - wy), 2 * (yz + wx), 1 - 2 * (xx + yy)};
        return r;
    }

    // Rotation angle about z assuming the quaternion is (close to) a pure z rotation.
    double yaw_angle() const { return 2.0 * std::atan2(z, w); }

    // Magnitude of the rotation component that is not about the z axis, in radians.
    double out_of_plane_angle() const {
        double s = std::sqrt(x * x + y * y);
        return 2.0 * std::asin(std::min(1.0, s));
    }
};

// ---------------------------------------------------------------------------
// 2D convex polygon utilities (footprint overlap, support hulls, min-area rect)
// ---------------------------------------------------------------------------

using Polygon2 = std::vector<Vec2>;  // counter-clockwise convex polygon

double polygon_area(const Polygon2& poly);

// Andrew monotone chain; returns CCW hull, collinear points dropped.
Polygon2 convex_hull(std::vector<Vec2> points);

// Sutherland-Hodgman clip of a convex subject polygon against a convex CCW clip polygon.
Polygon2 clip_convex(const Polygon2& subject, const Polygon2& clip);

// Intersection area of two convex CCW polygons.
double overlap_area(const Polygon2& a, const Polygon2& b);

// True when p lies at least `margin` inside every edge of the CCW convex polygon.
bool point_in_convex(const Polygon2& poly, const Vec2& p, double margin);

struct OrientedRect {
    Vec2 center;
    Vec2 size;       // full extents along the rect's local x/y
    double angle;    // radians, normalized to (-pi/4, pi/4] where possible
};

// Minimum-area enclosing rectangle of a point set (rotating calipers over the hull).
OrientedRect min_area_rect(const std::vector<Vec2>& points);

// Corners of an oriented rectangle, CCW.
Polygon2 rect_corners(const OrientedRect& r);

// ---------------------------------------------------------------------------
// Deterministic RNG (splitmix64 core) - portable across runs and platforms.
// ---------------------------------------------------------------------------

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    std::uint64_t uniform_index(std::uint64_t n) { return n ? next_u64() % n : 0; }

    // Standard normal via Box-Muller (uses two draws every call; no cached state,
    // which keeps snapshot/restore trivial).
    double gaussian(double mean, double stddev) {
        double u1 = 0.0;
        do { u1 = next_double(); } while (u1 <= 0.0);
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * M_PI * u2);
    }

    std::uint64_t state() const { return state_; }
    void set_state(std::uint64_t s) { state_ = s; }

private:
    std::uint64_t state_;
};

// Stable derivation of sub-seeds (sample k of a batch, scene index, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    Rng r(base ^ (0xD6E8FEB86659FD93ull * (index + 1)));
    return r.next_u64();
}

}  // namespace shelfsim

#endif
