#pragma once

#include "qbnf/series.hpp"

namespace qbnf {

namespace detail {

// Substitute each phase-space variable by a linear series in the target chart
// and expand monomial powers. Exact; round trips are identities.
inline WeylSeries substitute_linear(const WeylSeries& A, Chart target, Convention conv,
                                    const std::vector<WeylSeries>& first_images,
                                    const std::vector<WeylSeries>& second_images) {
    const int n = A.dim();
    const int W = A.max_weight();
    WeylSeries r(n, target, W, conv);
    // memoized powers per variable image
    std::vector<std::vector<WeylSeries>> pow_first(n), pow_second(n);
    auto power = [&](std::vector<WeylSeries>& cache, const WeylSeries& base, int p) {
        if (cache.empty()) cache.push_back(WeylSeries::constant(n, target, W, Coeff(1L), conv));
        while (static_cast<int>(cache.size()) <= p) cache.push_back(cache.back() * base);
        return cache[p];
    };
    for (const auto& [m, c] : A.terms()) {
        WeylSeries term = WeylSeries::constant(n, target, W, c, conv);
        for (int j = 0; j < n; ++j) {
            if (m.first(j)) term = term * power(pow_first[j], first_images[j], m.first(j));
            if (m.second(j)) term = term * power(pow_second[j], second_images[j], m.second(j));
        }
        if (m.h) term = term.mul_hbar(m.h);
        r = r + term;
    }
    return r;
}

}  // namespace detail

inline WeylSeries to_real_chart(const WeylSeries& A) {
    if (A.chart() == Chart::Real) return A;
    const int n = A.dim();
    const int W = A.max_weight();
    std::vector<WeylSeries> z_img, zb_img;
    const Coeff i = Coeff::i();
    const Coeff half_sqrt2 = Coeff::sqrt2() * Coeff(1L, 2L);
    for (int j = 0; j < n; ++j) {
        WeylSeries x(n, Chart::Real, W), xi(n, Chart::Real, W);
        x.add_term(Monomial::var_first(j), Coeff(1L));
        xi.add_term(Monomial::var_second(j), Coeff(1L));
        if (A.convention() == Convention::Birkhoff) {
            z_img.push_back(x + xi.scaled(i));
            zb_img.push_back(x - xi.scaled(i));
        } else {
            z_img.push_back((x - xi.scaled(i)).scaled(half_sqrt2));
            zb_img.push_back((x + xi.scaled(i)).scaled(half_sqrt2));
        }
    }
    return detail::substitute_linear(A, Chart::Real, A.convention(), z_img, zb_img);
}

inline WeylSeries to_complex_chart(const WeylSeries& A, Convention conv) {
    if (A.chart() == Chart::Complex) {
        if (A.convention() == conv) return A;
        return to_complex_chart(to_real_chart(A), conv);
    }
    const int n = A.dim();
    const int W = A.max_weight();
    std::vector<WeylSeries> x_img, xi_img;
    const Coeff i = Coeff::i();
    const Coeff half_sqrt2 = Coeff::sqrt2() * Coeff(1L, 2L);
    for (int j = 0; j < n; ++j) {
        WeylSeries z(n, Chart::Complex, W, conv), zb(n, Chart::Complex, W, conv);
        z.add_term(Monomial::var_first(j), Coeff(1L));
        zb.add_term(Monomial::var_second(j), Coeff(1L));
        if (conv == Convention::Birkhoff) {
            // z = x + i xi
            x_img.push_back((z + zb).scaled(Coeff(1L, 2L)));
            xi_img.push_back((z - zb).scaled(-i * Coeff(1L, 2L)));
        } else {
            // z = (x - i xi)/sqrt(2)
            x_img.push_back((z + zb).scaled(half_sqrt2));
            xi_img.push_back((z - zb).scaled(i * half_sqrt2));
        }
    }
    return detail::substitute_linear(A, Chart::Complex, conv, x_img, xi_img);
}

inline WeylSeries change_chart(const WeylSeries& A, Chart target,
                               Convention conv = Convention::Birkhoff) {
    return target == Chart::Real ? to_real_chart(A) : to_complex_chart(A, conv);
}

/// exp(s_h * h * Laplacian) on a complex-chart polynomial, with the Laplacian
/// sum_j d_{z_j} d_{zbar_j}. Finite sum (the Laplacian lowers degree by 2) and
/// weight preserving, hence exact under truncation. s = +h/2 maps contravariant
/// symbols to Weyl symbols, and Weyl symbols to normal (Wick) symbols; s = -h/2
/// inverts both.
inline WeylSeries heat_transform(const WeylSeries& A, const Rational& s_h) {
    if (A.chart() != Chart::Complex)
        throw std::invalid_argument("heat_transform needs a complex chart");
    WeylSeries r = A;
    WeylSeries cur = A;
    Rational fact(1);
    for (int j = 1; !cur.empty(); ++j) {
        WeylSeries lap = WeylSeries::like(cur);
        for (const auto& [m, c] : cur.terms()) {
            for (int k = 0; k < cur.dim(); ++k) {
                int p = m.first(k), q = m.second(k);
                if (p == 0 || q == 0) continue;
                Monomial d = m;
                d.set_first(k, p - 1);
                d.set_second(k, q - 1);
                d.h = static_cast<std::uint8_t>(d.h + 1);
                lap.add_term(d, c * Coeff(GaussianRational(Rational(p) * q * s_h)));
            }
        }
        fact *= j;
        cur = lap;
        r = r + cur.scaled(Coeff(GaussianRational(Rational(1) / fact)));
    }
    return r;
}

}  // namespace qbnf
