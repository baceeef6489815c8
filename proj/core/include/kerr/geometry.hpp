#ifndef KERR_GEOMETRY_HPP
#define KERR_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace kerr {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double a) const { return {a * x, a * y, a * z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double a) { x *= a; y *= a; z *= a; return *this; }
};

constexpr Vec3 operator*(double a, const Vec3& v) { return v * a; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
constexpr double norm2(const Vec3& v) { return dot(v, v); }

/** Unit propagation direction. Construction normalizes and rejects
 *  near-zero input; the stored vector satisfies |omega| = 1 to 1e-12. */
class Direction {
  public:
    explicit Direction(const Vec3& v) {
        const double n = norm(v);
        if (n < 1e-14) throw std::invalid_argument("Direction: zero vector");
        omega_ = v * (1.0 / n);
    }
    const Vec3& vec() const { return omega_; }
    double operator[](int i) const { return omega_[i]; }

    /** True when the direction is orthogonal to e3, as required for
     *  runs with the bias field along e3. */
    bool transverse_to_e3(double tol = 1e-12) const { return std::abs(omega_.z) <= tol; }

    static Direction e1() { return Direction({1, 0, 0}); }

  private:
    Vec3 omega_;
};

/** Incoming phase -t + x.omega. */
inline double phase(double t, const Vec3& x, const Direction& omega) {
    return -t + dot(x, omega.vec());
}

/** Outgoing phase +t + x.omega. */
inline double outgoing_phase(double t, const Vec3& x, const Direction& omega) {
    return t + dot(x, omega.vec());
}

/** Characteristic variables (s, y) = (t, x - t*omega). */
inline std::pair<double, Vec3> to_characteristic(double t, const Vec3& x, const Direction& omega) {
    return {t, x - t * omega.vec()};
}

/** Inverse map (t, x) = (s, y + s*omega). */
inline std::pair<double, Vec3> from_characteristic(double s, const Vec3& y, const Direction& omega) {
    return {s, y + s * omega.vec()};
}

/** Unit-speed line s -> y + s*omega, restricted to [s_min, s_max]. */
struct Ray {
    Vec3 y;                 // base point in characteristic coordinates
    Direction omega;
    double s_min = 0.0;
    double s_max = 0.0;

    Ray(const Vec3& base, const Direction& dir, double s0, double s1)
        : y(base), omega(dir), s_min(s0), s_max(s1) {
        if (!(s1 >= s0)) throw std::invalid_argument("Ray: empty parameter range");
    }
    Vec3 at(double s) const { return y + s * omega.vec(); }
};

struct Grid1D {
    double origin = 0.0;
    double dx = 1.0;
    std::size_t n = 2;

    Grid1D() = default;
    Grid1D(double origin_, double dx_, std::size_t n_) : origin(origin_), dx(dx_), n(n_) {
        if (!(dx > 0) || n < 2) throw std::invalid_argument("Grid1D: need dx > 0 and n >= 2");
    }
    double node(std::size_t i) const { return origin + dx * double(i); }
    double length() const { return dx * double(n - 1); }
};

/** Axis-aligned uniform node grid. Linear index runs z fastest:
 *  idx = (ix*ny + iy)*nz + iz. */
struct Grid3D {
    Vec3 origin{};
    Vec3 spacing{1, 1, 1};
    std::array<std::size_t, 3> counts{2, 2, 2};

    Grid3D() = default;
    Grid3D(const Vec3& origin_, const Vec3& spacing_, std::array<std::size_t, 3> counts_)
        : origin(origin_), spacing(spacing_), counts(counts_) {
        if (!(spacing.x > 0 && spacing.y > 0 && spacing.z > 0))
            throw std::invalid_argument("Grid3D: spacing must be positive");
        if (counts[0] < 2 || counts[1] < 2 || counts[2] < 2)
            throw std::invalid_argument("Grid3D: need at least 2 nodes per axis");
    }

    std::size_t size() const { return counts[0] * counts[1] * counts[2]; }
    std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return (ix * counts[1] + iy) * counts[2] + iz;
    }
    Vec3 node(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return {origin.x + spacing.x * double(ix),
                origin.y + spacing.y * double(iy),
                origin.z + spacing.z * double(iz)};
    }
    bool is_boundary(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return ix == 0 || iy == 0 || iz == 0 ||
               ix == counts[0] - 1 || iy == counts[1] - 1 || iz == counts[2] - 1;
    }

    /** Cube [-half, half]^3 with n nodes per axis. */
    static Grid3D cube(double half, std::size_t n) {
        const double dx = 2 * half / double(n - 1);
        return Grid3D({-half, -half, -half}, {dx, dx, dx}, {n, n, n});
    }
};

using ScalarField = std::vector<double>;   // one value per Grid3D node
using VectorField = std::vector<Vec3>;     // one vector per Grid3D node

} // namespace kerr

#endif
