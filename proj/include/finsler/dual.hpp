// Forward-mode dual numbers, nestable for higher derivatives.
//
// Dual<double> carries one directional derivative; Dual<Dual<double>> carries
// two independent directions plus their cross derivative, and so on. All
// metric quantities in this library are evaluated through templates over the
// scalar type, so seeding the inputs at distinct nesting levels yields exact
// mixed partials of any order the geometry needs.
#pragma once

#include <cmath>
#include <cstdlib>

namespace finsler {

template <class T>
struct Dual {
    T a{};  // value
    T b{};  // derivative

    Dual() = default;
    Dual(double v) : a(v), b(0.0) {}  // lifts a constant (zero derivative)
    Dual(const T& value, const T& deriv) : a(value), b(deriv) {}
};

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

// Innermost value part, through any nesting depth.
inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& d) {
    return value_of(d.a);
}

template <class T>
Dual<T> operator+(const Dual<T>& x, const Dual<T>& y) {
    return {x.a + y.a, x.b + y.b};
}
template <class T>
Dual<T> operator-(const Dual<T>& x, const Dual<T>& y) {
    return {x.a - y.a, x.b - y.b};
}
template <class T>
Dual<T> operator-(const Dual<T>& x) {
    return {-x.a, -x.b};
}
template <class T>
Dual<T> operator*(const Dual<T>& x, const Dual<T>& y) {
    return {x.a * y.a, x.a * y.b + x.b * y.a};
}
template <class T>
Dual<T> operator/(const Dual<T>& x, const Dual<T>& y) {
    T inv_ya = T(1.0) / y.a;
    return {x.a * inv_ya, (x.b - x.a * inv_ya * y.b) * inv_ya};
}

template <class T> Dual<T> operator+(const Dual<T>& x, double c) { return x + Dual<T>(c); }
template <class T> Dual<T> operator+(double c, const Dual<T>& x) { return Dual<T>(c) + x; }
template <class T> Dual<T> operator-(const Dual<T>& x, double c) { return x - Dual<T>(c); }
template <class T> Dual<T> operator-(double c, const Dual<T>& x) { return Dual<T>(c) - x; }
template <class T> Dual<T> operator*(const Dual<T>& x, double c) { return x * Dual<T>(c); }
template <class T> Dual<T> operator*(double c, const Dual<T>& x) { return Dual<T>(c) * x; }
template <class T> Dual<T> operator/(const Dual<T>& x, double c) { return x / Dual<T>(c); }
template <class T> Dual<T> operator/(double c, const Dual<T>& x) { return Dual<T>(c) / x; }

template <class T>
Dual<T> sin(const Dual<T>& x) {
    using std::cos;
    using std::sin;
    return {sin(x.a), cos(x.a) * x.b};
}
template <class T>
Dual<T> cos(const Dual<T>& x) {
    using std::cos;
    using std::sin;
    return {cos(x.a), -(sin(x.a) * x.b)};
}
template <class T>
Dual<T> exp(const Dual<T>& x) {
    using std::exp;
    T e = exp(x.a);
    return {e, e * x.b};
}
template <class T>
Dual<T> log(const Dual<T>& x) {
    using std::log;
    return {log(x.a), x.b / x.a};
}
template <class T>
Dual<T> sqrt(const Dual<T>& x) {
    using std::sqrt;
    T s = sqrt(x.a);
    return {s, x.b / (s * 2.0)};
}
template <class T>
Dual<T> tanh(const Dual<T>& x) {
    using std::tanh;
    T t = tanh(x.a);
    return {t, (1.0 - t * t) * x.b};
}

// Power with a constant exponent (the only form the expression grammar
// admits, which keeps the derivative rule total away from 0 and negatives).
template <class T>
Dual<T> pow(const Dual<T>& x, double c) {
    using std::pow;
    if (c == 0.0) return Dual<T>(1.0);
    if (c == 1.0) return x;
    if (c == 2.0) return x * x;
    return {pow(x.a, c), pow(x.a, c - 1.0) * c * x.b};
}

// Seed constructors for independent variables. dN(v, s1, ..., sN) makes a
// depth-N dual whose level-k derivative slot is sk; all cross-derivative
// slots of an independent variable are zero.
inline D1 seed1(double v, double s1) { return {v, s1}; }
inline D2 seed2(double v, double s1, double s2) { return {{v, s1}, {s2, 0.0}}; }
inline D3 seed3(double v, double s1, double s2, double s3) {
    return {{{v, s1}, {s2, 0.0}}, {{s3, 0.0}, {0.0, 0.0}}};
}

// Derivative extraction, named by which seeded levels are differentiated.
inline double der1(const D1& r) { return r.b; }
inline double der1(const D2& r) { return r.a.b; }
inline double der2(const D2& r) { return r.b.a; }
inline double der12(const D2& r) { return r.b.b; }
inline double der1(const D3& r) { return r.a.a.b; }
inline double der2(const D3& r) { return r.a.b.a; }
inline double der3(const D3& r) { return r.b.a.a; }
inline double der12(const D3& r) { return r.a.b.b; }
inline double der13(const D3& r) { return r.b.a.b; }
inline double der23(const D3& r) { return r.b.b.a; }
inline double der123(const D3& r) { return r.b.b.b; }

}  // namespace finsler
