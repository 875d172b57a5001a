#pragma once

#include <gmpxx.h>

#include <complex>
#include <stdexcept>
#include <string>

namespace qbnf {

using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational rational_from_string(const std::string& s) {
    Rational q;
    if (q.set_str(s, 10) != 0)
        throw std::invalid_argument("bad rational literal: " + s);
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Gaussian rational: re + i*im with exact rational parts.
struct GaussianRational {
    Rational re{0};
    Rational im{0};

    GaussianRational() = default;
    GaussianRational(Rational r) : re(std::move(r)) {}
    GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    GaussianRational(long r) : re(r) {}
    GaussianRational(long num, long den) : re(Rational(num, den)) { re.canonicalize(); }

    static GaussianRational i() { return {Rational(0), Rational(1)}; }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    GaussianRational conj() const { return {re, -im}; }

    friend GaussianRational operator+(const GaussianRational& x, const GaussianRational& y) {
        return {x.re + y.re, x.im + y.im};
    }
    friend GaussianRational operator-(const GaussianRational& x, const GaussianRational& y) {
        return {x.re - y.re, x.im - y.im};
    }
    friend GaussianRational operator-(const GaussianRational& x) { return {-x.re, -x.im}; }
    friend GaussianRational operator*(const GaussianRational& x, const GaussianRational& y) {
        return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
    }
    friend GaussianRational operator/(const GaussianRational& x, const GaussianRational& y) {
        Rational n = y.re * y.re + y.im * y.im;
        if (n == 0) throw std::domain_error("division by zero GaussianRational");
        return {(x.re * y.re + x.im * y.im) / n, (x.im * y.re - x.re * y.im) / n};
    }
    GaussianRational& operator+=(const GaussianRational& y) { return *this = *this + y; }
    GaussianRational& operator-=(const GaussianRational& y) { return *this = *this - y; }
    GaussianRational& operator*=(const GaussianRational& y) { return *this = *this * y; }
    GaussianRational& operator/=(const GaussianRational& y) { return *this = *this / y; }
    friend bool operator==(const GaussianRational& x, const GaussianRational& y) {
        return x.re == y.re && x.im == y.im;
    }

    std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
};

/// Element of Q(i, sqrt2), stored as a + b*sqrt(2) with Gaussian-rational a, b.
/// The sqrt(2) part only appears through the Bargmann chart change; all
/// arithmetic stays exact.
struct Coeff {
    GaussianRational a;  // rational part
    GaussianRational b;  // coefficient of sqrt(2)

    Coeff() = default;
    Coeff(GaussianRational x) : a(std::move(x)) {}
    Coeff(GaussianRational x, GaussianRational y) : a(std::move(x)), b(std::move(y)) {}
    Coeff(Rational r) : a(std::move(r)) {}
    Coeff(long r) : a(r) {}
    Coeff(long num, long den) : a(GaussianRational(num, den)) {}

    static Coeff i() { return Coeff(GaussianRational::i()); }
    static Coeff sqrt2() { return {GaussianRational(0), GaussianRational(1)}; }

    bool is_zero() const { return a.is_zero() && b.is_zero(); }
    bool is_real() const { return a.is_real() && b.is_real(); }
    bool is_rational() const { return b.is_zero() && a.is_real(); }

    Coeff conj() const { return {a.conj(), b.conj()}; }

    friend Coeff operator+(const Coeff& x, const Coeff& y) { return {x.a + y.a, x.b + y.b}; }
    friend Coeff operator-(const Coeff& x, const Coeff& y) { return {x.a - y.a, x.b - y.b}; }
    friend Coeff operator-(const Coeff& x) { return {-x.a, -x.b}; }
    friend Coeff operator*(const Coeff& x, const Coeff& y) {
        GaussianRational two{Rational(2)};
        return {x.a * y.a + two * x.b * y.b, x.a * y.b + x.b * y.a};
    }
    friend Coeff operator/(const Coeff& x, const Coeff& y) {
        // multiply by the sqrt2-conjugate: 1/(a+b r) = (a-b r)/(a^2-2 b^2)
        GaussianRational two{Rational(2)};
        GaussianRational n = y.a * y.a - two * y.b * y.b;
        if (n.is_zero()) throw std::domain_error("division by zero Coeff");
        return {(x.a * y.a - two * x.b * y.b) / n, (x.b * y.a - x.a * y.b) / n};
    }
    Coeff& operator+=(const Coeff& y) { return *this = *this + y; }
    Coeff& operator-=(const Coeff& y) { return *this = *this - y; }
    Coeff& operator*=(const Coeff& y) { return *this = *this * y; }
    Coeff& operator/=(const Coeff& y) { return *this = *this / y; }
    friend bool operator==(const Coeff& x, const Coeff& y) { return x.a == y.a && x.b == y.b; }

    std::complex<double> to_complex() const {
        return a.to_complex() + 1.4142135623730950488 * b.to_complex();
    }
};

}  // namespace qbnf
