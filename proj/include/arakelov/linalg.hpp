#pragma once

// Small fixed-size vector helpers shared by the lattice, unit and divisor code.

#include <array>
#include <cmath>
#include <cstddef>

namespace arakelov {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

template <typename T, std::size_t N>
constexpr T dot(const std::array<T, N>& a, const std::array<T, N>& b) noexcept {
    T s{};
    for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
    return s;
}

template <typename T, std::size_t N>
T norm(const std::array<T, N>& a) noexcept {
    return std::sqrt(dot(a, a));
}

template <typename T, std::size_t N>
constexpr std::array<T, N> operator+(std::array<T, N> a, const std::array<T, N>& b) noexcept {
    for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
    return a;
}

template <typename T, std::size_t N>
constexpr std::array<T, N> operator-(std::array<T, N> a, const std::array<T, N>& b) noexcept {
    for (std::size_t i = 0; i < N; ++i) a[i] -= b[i];
    return a;
}

template <typename T, std::size_t N>
constexpr std::array<T, N> operator-(std::array<T, N> a) noexcept {
    for (auto& x : a) x = -x;
    return a;
}

template <typename T, std::size_t N>
constexpr std::array<T, N> operator*(T s, std::array<T, N> a) noexcept {
    for (auto& x : a) x *= s;
    return a;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) noexcept {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Componentwise product, the action of a scaling triple u on an embedding.
inline Vec3 hadamard(const Vec3& a, const Vec3& b) noexcept {
    return {a[0] * b[0], a[1] * b[1], a[2] * b[2]};
}

} // namespace arakelov
