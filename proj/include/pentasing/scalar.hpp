// Coefficient types for the polynomial kernel: exact rationals for GCD /
// divisibility work and variable-precision floats for elimination cascades.

#ifndef PENTASING_SCALAR_HPP
#define PENTASING_SCALAR_HPP

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace pentasing {

using Rat = boost::multiprecision::mpq_rational;
using BigFloat = boost::multiprecision::mpfr_float;  // runtime precision

namespace hp {

// Minimum significand width for the elimination pipelines.
inline constexpr unsigned kMinBits = 128;
inline constexpr unsigned kDefaultBits = 256;

inline unsigned digits10_for_bits(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30103)) + 2;
}

// Reads PENTAPOD_PRECISION (bits) once; values below kMinBits are clamped.
inline void init_precision() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        unsigned bits = kDefaultBits;
        if (const char* env = std::getenv("PENTAPOD_PRECISION")) {
            long v = std::strtol(env, nullptr, 10);
            if (v > 0) bits = static_cast<unsigned>(v);
        }
        if (bits < kMinBits) bits = kMinBits;
        BigFloat::default_precision(digits10_for_bits(bits));
    });
}

// Unit roundoff for the scalar in use (honors the active BigFloat precision).
template <typename K>
K epsilon();

template <>
inline double epsilon<double>() {
    return std::numeric_limits<double>::epsilon();
}

template <>
inline BigFloat epsilon<BigFloat>() {
    init_precision();
    return std::numeric_limits<BigFloat>::epsilon();
}

}  // namespace hp

inline Rat rat_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("rat_from_double: non-finite value");
    return Rat(x);  // dyadic, exact
}

inline double to_double(const Rat& r) { return r.convert_to<double>(); }
inline double to_double(const BigFloat& f) { return f.convert_to<double>(); }
inline double to_double(double d) { return d; }

// Scalar from a double, exact where the type allows it.
template <typename K>
K from_double(double x) {
    if constexpr (std::is_same_v<K, Rat>)
        return rat_from_double(x);
    else
        return K(x);
}

// Minimal complex value over any real scalar; only what the root finder needs.
template <typename T>
struct Cplx {
    T re{}, im{};

    Cplx() = default;
    Cplx(T r) : re(std::move(r)) {}
    Cplx(T r, T i) : re(std::move(r)), im(std::move(i)) {}

    friend Cplx operator+(const Cplx& a, const Cplx& b) { return {a.re + b.re, a.im + b.im}; }
    friend Cplx operator-(const Cplx& a, const Cplx& b) { return {a.re - b.re, a.im - b.im}; }
    friend Cplx operator*(const Cplx& a, const Cplx& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Cplx operator/(const Cplx& a, const Cplx& b) {
        // Smith's formula, avoids overflow from squaring the larger part.
        using std::abs;
        if (abs(b.re) >= abs(b.im)) {
            T r = b.im / b.re;
            T den = b.re + b.im * r;
            return {(a.re + a.im * r) / den, (a.im - a.re * r) / den};
        }
        T r = b.re / b.im;
        T den = b.im + b.re * r;
        return {(a.re * r + a.im) / den, (a.im * r - a.re) / den};
    }
    Cplx& operator+=(const Cplx& o) { *this = *this + o; return *this; }
    Cplx& operator-=(const Cplx& o) { *this = *this - o; return *this; }

    // hypot without overflow; sqrt is ADL-resolved for multiprecision types
    T abs() const {
        using std::abs;
        using std::sqrt;
        using std::swap;
        T x = abs(re), y = abs(im);
        if (x < y) swap(x, y);
        if (x == 0) return x;
        T r = y / x;
        return x * sqrt(T(1) + r * r);
    }
    friend T abs(const Cplx& a) { return a.abs(); }
};

}  // namespace pentasing

#endif
