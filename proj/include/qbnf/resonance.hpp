#pragma once

#include "qbnf/exact.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

namespace qbnf {

struct CompleteResonance {
    Rational nu_c;        // common positive factor
    std::vector<long> p;  // coprime positive integers, nu = nu_c * p
};

struct ZetaStratum {
    long q = 0, d = 1;           // zeta = e^{2 pi i q/d}, gcd(q,d) = 1
    std::vector<int> i_zeta;     // indices i with zeta^{p_i} = 1 (0-based)
    int n_zeta = 0;              // |i_zeta| - 1
    long m_zeta = 1;             // gcd of the p_i over i_zeta
};

struct ResonanceData {
    std::vector<Rational> nu;
    std::vector<std::vector<long>> lattice_basis;
    int rank = 0;
    std::optional<int> raw_order;  // empty: exceeds the search bound
    std::optional<int> r_nu;       // max(3, raw_order)
    CompleteResonance complete;
    int band_r = 4;
};

namespace detail {

inline void require_positive(const std::vector<Rational>& nu) {
    if (nu.empty()) throw std::invalid_argument("empty frequency vector");
    for (const auto& f : nu)
        if (!(f > 0)) throw std::invalid_argument("frequencies must be positive");
}

/// Scale positive rationals to the primitive integer vector on the same ray.
inline std::vector<long> primitive_integer_vector(const std::vector<Rational>& nu) {
    require_positive(nu);
    BigInt l(1);
    for (const auto& f : nu) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), f.get_den_mpz_t());
    std::vector<BigInt> v;
    BigInt g(0);
    for (const auto& f : nu) {
        BigInt x = f.get_num() * (l / f.get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        v.push_back(x);
    }
    std::vector<long> r;
    for (auto& x : v) {
        BigInt y = x / g;
        if (!y.fits_slong_p()) throw std::overflow_error("frequency ratio too large");
        r.push_back(y.get_si());
    }
    return r;
}

}  // namespace detail

/// Basis of the integer kernel of <., nu> by exact gcd elimination. Rank n-1
/// for rational positive nu.
inline std::vector<std::vector<long>> resonance_lattice(const std::vector<Rational>& nu) {
    std::vector<long> p = detail::primitive_integer_vector(nu);
    const int n = static_cast<int>(p.size());
    std::vector<std::vector<long>> basis;
    // invariant: <col, p> = g; each new component p[j] yields one kernel vector
    std::vector<long> col(static_cast<std::size_t>(n), 0);
    col[0] = 1;
    long g = p[0];
    for (int j = 1; j < n; ++j) {
        long g2 = std::gcd(g, p[j]);
        std::vector<long> v(static_cast<std::size_t>(n), 0);
        for (int t = 0; t < n; ++t) v[static_cast<std::size_t>(t)] = (p[j] / g2) * col[static_cast<std::size_t>(t)];
        v[static_cast<std::size_t>(j)] -= g / g2;
        basis.push_back(v);
        // extended gcd to keep <col, p> = gcd so far
        long s = 1, t = 0, a = g, b = p[j];
        {
            long s0 = 1, s1 = 0, t0 = 0, t1 = 1;
            while (b != 0) {
                long q = a / b, r = a % b;
                a = b;
                b = r;
                long ns = s0 - q * s1;
                s0 = s1;
                s1 = ns;
                long nt = t0 - q * t1;
                t0 = t1;
                t1 = nt;
            }
            s = s0;
            t = t0;
        }
        for (int k = 0; k < n; ++k) col[static_cast<std::size_t>(k)] *= s;
        col[static_cast<std::size_t>(j)] += t;
        g = g2;
    }
    return basis;
}

/// Minimal l1 norm of a nonzero integer vector annihilating nu, searched up
/// to `bound`; empty optional when nothing is found within the bound.
inline std::optional<int> resonance_order(const std::vector<Rational>& nu, int bound) {
    if (bound < 2) throw std::invalid_argument("resonance_order: bound must be >= 2");
    std::vector<long> p = detail::primitive_integer_vector(nu);
    const int n = static_cast<int>(p.size());
    std::optional<int> best;
    std::vector<long> a(static_cast<std::size_t>(n), 0);
    // depth-first over exponent vectors with |a|_1 <= bound
    auto rec = [&](auto&& self, int j, int budget, long dot, int norm) -> void {
        if (j == n) {
            if (norm > 0 && dot == 0 && (!best || norm < *best)) best = norm;
            return;
        }
        for (long c = -budget; c <= budget; ++c)
            self(self, j + 1, budget - static_cast<int>(std::abs(c)), dot + c * p[static_cast<std::size_t>(j)],
                 norm + static_cast<int>(std::abs(c)));
    };
    rec(rec, 0, bound, 0, 0);
    return best;
}

/// nu = nu_c * p with p coprime positive integers; total for rational nu.
inline CompleteResonance complete_resonance(const std::vector<Rational>& nu) {
    CompleteResonance r;
    r.p = detail::primitive_integer_vector(nu);
    r.nu_c = nu[0] / r.p[0];
    for (std::size_t j = 0; j < nu.size(); ++j)
        if (nu[j] != r.nu_c * r.p[j]) throw std::logic_error("complete_resonance: reconstruction failed");
    return r;
}

/// 3 when the frequencies admit a low resonance relation (p_j = 2 p_i, or
/// p_i = p_j + p_k with j != k), else 4.
inline int band_exponent(const std::vector<long>& p) {
    const int n = static_cast<int>(p.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (p[static_cast<std::size_t>(j)] == 2 * p[static_cast<std::size_t>(i)]) return 3;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (j != k && p[static_cast<std::size_t>(i)] ==
                                  p[static_cast<std::size_t>(j)] + p[static_cast<std::size_t>(k)])
                    return 3;
    return 4;
}

/// Torus action data: Z-basis of the orthogonal lattice of the resonance
/// module and the exact coefficients reconstructing nu. For rational nu this
/// is the one-dimensional action generated by p.
inline std::pair<int, std::vector<std::pair<Rational, std::vector<long>>>> torus_decomposition(
    const std::vector<Rational>& nu) {
    CompleteResonance c = complete_resonance(nu);
    return {1, {{c.nu_c, c.p}}};
}

/// All roots of unity zeta with zeta^{p_i} = 1 for some i, with their index
/// sets and the attached integers (n_zeta, m_zeta).
inline std::vector<ZetaStratum> zeta_strata(const std::vector<long>& p) {
    std::vector<ZetaStratum> out;
    long dmax = *std::max_element(p.begin(), p.end());
    for (long d = 1; d <= dmax; ++d) {
        ZetaStratum proto;
        proto.d = d;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] % d == 0) proto.i_zeta.push_back(static_cast<int>(i));
        if (proto.i_zeta.empty()) continue;
        proto.n_zeta = static_cast<int>(proto.i_zeta.size()) - 1;
        proto.m_zeta = 0;
        for (int i : proto.i_zeta)
            proto.m_zeta = std::gcd(proto.m_zeta, p[static_cast<std::size_t>(i)]);
        for (long q = 0; q < d; ++q) {
            if (std::gcd(q, d) != 1) continue;  // gcd(0,1)=1 keeps zeta=1
            ZetaStratum s = proto;
            s.q = q;
            out.push_back(s);
        }
    }
    return out;
}

/// One-call analysis bundle.
inline ResonanceData analyze_resonance(const std::vector<Rational>& nu, int bound) {
    ResonanceData r;
    r.nu = nu;
    r.lattice_basis = resonance_lattice(nu);
    r.rank = static_cast<int>(r.lattice_basis.size());
    r.raw_order = resonance_order(nu, bound);
    if (r.raw_order) r.r_nu = std::max(3, *r.raw_order);
    r.complete = complete_resonance(nu);
    r.band_r = band_exponent(r.complete.p);
    return r;
}

}  // namespace qbnf
