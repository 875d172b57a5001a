#pragma once

#include "qbnf/series.hpp"

namespace qbnf {

namespace detail {

inline Rational falling_factorial(int a, int b) {
    Rational r(1);
    for (int k = 0; k < b; ++k) r *= (a - k);
    return r;
}

inline Rational factorial(int a) {
    Rational r(1);
    for (int k = 2; k <= a; ++k) r *= k;
    return r;
}

// One bidifferential pairing step between two monomials. The first block of
// derivative indices (beta) differentiates A in `slotA0` and B in the opposite
// slot; gamma the other way round. Shared by every chart.
template <typename Emit>
void bidifferential_terms(const Monomial& ma, const Monomial& mb, int n, const Emit& emit) {
    // beta_j <= min(ma.first, mb.second), gamma_j <= min(ma.second, mb.first)
    std::array<int, kMaxDim> bmax{}, gmax{};
    for (int j = 0; j < n; ++j) {
        bmax[j] = std::min(ma.first(j), mb.second(j));
        gmax[j] = std::min(ma.second(j), mb.first(j));
    }
    std::array<int, kMaxDim> beta{}, gamma{};
    // odometer over beta and gamma
    auto advance = [&](std::array<int, kMaxDim>& v, const std::array<int, kMaxDim>& vmax) {
        for (int j = 0; j < n; ++j) {
            if (v[j] < vmax[j]) {
                ++v[j];
                return true;
            }
            v[j] = 0;
        }
        return false;
    };
    do {
        std::array<int, kMaxDim> g{};
        gamma = g;
        do {
            emit(beta, gamma);
        } while (advance(gamma, gmax));
    } while (advance(beta, bmax));
}

}  // namespace detail

/// Weyl (Moyal) star product truncated at weight W, exact coefficients.
/// The expansion convention is pinned by [xi_j, x_j] = hbar/i, tested as an
/// axiom; hbar is central and each bidifferential order k carries hbar^k.
inline WeylSeries moyal_product(const WeylSeries& A, const WeylSeries& B, int W) {
    A.check_compatible(B);
    const int n = A.dim();
    WeylSeries r(n, A.chart(), W, A.convention());

    // base scalar lambda in  sum_k lambda^k hbar^k / (beta! gamma!) * (-1)^|gamma| ...
    Coeff lambda;
    if (A.chart() == Chart::Real)
        lambda = Coeff(GaussianRational(Rational(0), Rational(1, 2)));  // i/2
    else if (A.convention() == Convention::Birkhoff)
        lambda = Coeff(1L);
    else
        lambda = Coeff(-1L, 2L);

    for (const auto& [ma, ca] : A.terms()) {
        const int wa = ma.weight();
        if (wa > W) continue;
        for (const auto& [mb, cb] : B.terms()) {
            if (wa + mb.weight() > W) continue;  // the product is weight-graded
            Coeff cc = ca * cb;
            detail::bidifferential_terms(ma, mb, n, [&](const auto& beta, const auto& gamma) {
                int k = 0, gsum = 0;
                Rational num(1);
                for (int j = 0; j < n; ++j) {
                    k += beta[j] + gamma[j];
                    gsum += gamma[j];
                    num *= detail::falling_factorial(ma.first(j), beta[j]) *
                           detail::falling_factorial(ma.second(j), gamma[j]) *
                           detail::falling_factorial(mb.second(j), beta[j]) *
                           detail::falling_factorial(mb.first(j), gamma[j]);
                    num /= detail::factorial(beta[j]) * detail::factorial(gamma[j]);
                }
                if (gsum % 2) num = -num;
                Coeff factor{GaussianRational(num)};
                for (int p = 0; p < k; ++p) factor *= lambda;
                Monomial m;
                for (int j = 0; j < n; ++j) {
                    m.set_first(j, ma.first(j) - beta[j] + mb.first(j) - gamma[j]);
                    m.set_second(j, ma.second(j) - gamma[j] + mb.second(j) - beta[j]);
                }
                m.h = static_cast<std::uint8_t>(ma.h + mb.h + k);
                r.add_term(m, cc * factor);
            });
        }
    }
    return r;
}

inline WeylSeries moyal_bracket(const WeylSeries& A, const WeylSeries& B, int W) {
    return moyal_product(A, B, W) - moyal_product(B, A, W);
}

/// (i/hbar) [A, B] - exact, since every commutator term carries hbar.
inline WeylSeries i_over_h_bracket(const WeylSeries& A, const WeylSeries& B, int W) {
    WeylSeries r = moyal_bracket(A, B, W + 2).div_hbar().scaled(Coeff::i());
    r.set_max_weight(W);
    return r;
}

/// Classical Poisson bracket sum_j (d_xi A d_x B - d_x A d_xi B), truncated.
inline WeylSeries poisson_bracket(const WeylSeries& A, const WeylSeries& B, int W) {
    A.check_compatible(B);
    WeylSeries r(A.dim(), A.chart(), W, A.convention());
    for (int j = 0; j < A.dim(); ++j) {
        if (A.chart() == Chart::Real) {
            r = r + A.derivative(j, true) * B.derivative(j, false) -
                A.derivative(j, false) * B.derivative(j, true);
        } else {
            // birkhoff z = x+i xi:      {A,B} = 2i (dz A dzb B - dzb A dz B)
            // bargmann z = (x-i xi)/r2: {A,B} =  i (dzb A dz B - dz A dzb B)
            Coeff c = (A.convention() == Convention::Birkhoff)
                          ? Coeff(GaussianRational(Rational(0), Rational(2)))
                          : Coeff(GaussianRational(Rational(0), Rational(-1)));
            r = r + (A.derivative(j, false) * B.derivative(j, true) -
                     A.derivative(j, true) * B.derivative(j, false))
                        .scaled(c);
        }
    }
    r.set_max_weight(W);
    return r;
}

}  // namespace qbnf
