#ifndef CROSSING_LAB_CORE_HPP
#define CROSSING_LAB_CORE_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace crossing_lab {

inline constexpr const char* kVersion = "crossing-lab 0.1.0";
inline constexpr double kGravity = 9.81; // m/s^2

struct Vec2 {
    double x = 0.0;
    double z = 0.0;

    Vec2() = default;
    Vec2(double x_, double z_) : x(x_), z(z_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, z + o.z}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, z - o.z}; }
    Vec2 operator*(double s) const { return {x * s, z * s}; }
    Vec2 operator-() const { return {-x, -z}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; z += o.z; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; z -= o.z; return *this; }

    double dot(const Vec2& o) const { return x * o.x + z * o.z; }
    // 2D cross product, k-component of (this x o).
    double cross(const Vec2& o) const { return x * o.z - z * o.x; }
    double norm() const { return std::hypot(x, z); }
    Vec2 normalized() const {
        const double n = norm();
        return {x / n, z / n};
    }
    // 90 degree counterclockwise rotation.
    Vec2 perp() const { return {-z, x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.z}; }

// Rotation by angle theta applied to a body-frame vector.
inline Vec2 rotate(double theta, const Vec2& v) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * v.x - s * v.z, s * v.x + c * v.z};
}

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double t)
        : std::runtime_error(what + " at t=" + std::to_string(t)), time(t) {}
    double time;
};

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace crossing_lab

#endif
