#pragma once

#include "qbnf/fock.hpp"
#include "qbnf/resonance.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <vector>

namespace qbnf {

/// All gamma >= 0 with <gamma, p> = N - <alpha, p>; empty when negative.
inline std::vector<std::vector<int>> lattice_points(const std::vector<int>& alpha,
                                                    const std::vector<long>& p, long N) {
    long rhs = N;
    for (std::size_t i = 0; i < p.size(); ++i) rhs -= alpha[i] * p[i];
    if (rhs < 0) return {};
    return FockBasis::enumerate(p, rhs).states;
}

/// Exact big-integer sum of rising factorials over the polytope lattice:
/// sum over gamma of prod_i (gamma_i+1)...(gamma_i+alpha_i).
inline BigInt exact_sum(const std::vector<int>& alpha, const std::vector<long>& p, long N) {
    long rhs = N;
    for (std::size_t i = 0; i < p.size(); ++i) rhs -= alpha[i] * p[i];
    if (rhs < 0) return BigInt(0);
    const std::size_t n = p.size();
    BigInt total(0);
    std::vector<long> gamma(n, 0);
    auto rec = [&](auto&& self, std::size_t j, long rem, const BigInt& partial) -> void {
        if (j + 1 == n) {
            if (rem % p[j] != 0) return;
            long g = rem / p[j];
            BigInt f = partial;
            for (int k = 1; k <= alpha[j]; ++k) f *= g + k;
            total += f;
            return;
        }
        for (long g = 0; g * p[j] <= rem; ++g) {
            BigInt f = partial;
            for (int k = 1; k <= alpha[j]; ++k) f *= g + k;
            self(self, j + 1, rem - g * p[j], f);
        }
    };
    rec(rec, 0, rhs, BigInt(1));
    return total;
}

/// exact_sum for every N in [0, Nmax] at once, via big-integer convolution of
/// the generating function X^{<alpha,p>} prod_i sum_k (k+1)...(k+alpha_i)
/// X^{k p_i}. Much cheaper than per-N lattice walks when many N are needed.
inline std::vector<BigInt> exact_sums_upto(const std::vector<int>& alpha,
                                           const std::vector<long>& p, long Nmax) {
    if (alpha.size() != p.size()) throw std::invalid_argument("alpha and p must have equal length");
    long shift = 0;
    for (std::size_t i = 0; i < p.size(); ++i) shift += alpha[i] * p[i];
    std::vector<BigInt> c{BigInt(1)};
    for (std::size_t i = 0; i < p.size(); ++i) {
        long budget = Nmax - shift;
        if (budget < 0) return std::vector<BigInt>(static_cast<std::size_t>(Nmax) + 1, BigInt(0));
        std::vector<BigInt> factor;
        BigInt rising(1);
        for (int k = 1; k <= alpha[i]; ++k) rising *= k;  // k = 0 term
        for (long k = 0; k * p[i] <= budget; ++k) {
            if (k > 0) {
                rising = 1;
                for (int t = 1; t <= alpha[i]; ++t) rising *= k + t;
            }
            factor.push_back(rising);
        }
        std::vector<BigInt> next(std::min<std::size_t>(c.size() + (factor.size() - 1) * static_cast<std::size_t>(p[i]),
                                                       static_cast<std::size_t>(budget) + 1),
                                 BigInt(0));
        for (std::size_t a = 0; a < c.size(); ++a) {
            if (c[a] == 0) continue;
            for (std::size_t k = 0; k < factor.size(); ++k) {
                std::size_t deg = a + k * static_cast<std::size_t>(p[i]);
                if (deg >= next.size()) break;
                next[deg] += c[a] * factor[k];
            }
        }
        c = std::move(next);
    }
    std::vector<BigInt> out(static_cast<std::size_t>(Nmax) + 1, BigInt(0));
    for (std::size_t k = 0; k < c.size(); ++k) {
        std::size_t N = k + static_cast<std::size_t>(shift);
        if (N < out.size()) out[N] = c[k];
    }
    return out;
}

namespace detail {

inline std::complex<double> root_of_unity(long q, long d, long power) {
    // e^{2 pi i q power / d} via exact modular reduction of the phase
    long r = ((q * (power % d)) % d + d) % d;
    double ang = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(d);
    return {std::cos(ang), std::sin(ang)};
}

}  // namespace detail

/// Closed-form leading coefficient of the polytope expansion for one stratum,
/// read off from the pole of the exact generating function
/// X^{<alpha,p>} prod_i alpha_i! (1-X^{p_i})^{-(alpha_i+1)} at X = zeta:
/// the stratum contributes at order N^{n(zeta)} only when alpha vanishes on
/// the non-fixed indices, and then
///   a0 = prod_{i not in i_zeta} (1-zeta^{p_i})^{-1}
///        * prod_{i in i_zeta} Gamma(alpha_i+1)/p_i^{alpha_i+1}
///        / Gamma(sum_{i in i_zeta} (alpha_i+1)).
/// Validated against high-precision fits of the exact sums.
inline std::complex<double> a0(const std::vector<int>& alpha, const ZetaStratum& z,
                               const std::vector<long>& p) {
    std::vector<bool> in(p.size(), false);
    for (int i : z.i_zeta) in[static_cast<std::size_t>(i)] = true;
    std::complex<double> pref(1, 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (in[i]) continue;
        if (alpha[i] > 0) return {0, 0};  // pole order too low for N^{n(zeta)}
        std::complex<double> zp = detail::root_of_unity(z.q, z.d, p[i]);
        pref /= 1.0 - zp;
    }
    double denom = 1.0;
    double gammas = 1.0;
    int s = 0;
    for (int i : z.i_zeta) {
        int ai = alpha[static_cast<std::size_t>(i)];
        denom *= std::pow(static_cast<double>(p[static_cast<std::size_t>(i)]), ai + 1);
        gammas *= std::tgamma(ai + 1.0);
        s += ai + 1;
    }
    return pref * gammas / (denom * std::tgamma(static_cast<double>(s)));
}

/// Leading-order prediction for N^{-|alpha|} * exact_sum; asserts reality.
inline double leading_prediction(const std::vector<int>& alpha, const std::vector<long>& p,
                                 long N) {
    std::complex<double> s(0, 0);
    for (const auto& z : zeta_strata(p)) {
        std::complex<double> zmn = detail::root_of_unity(z.q, z.d, -N);
        s += zmn * std::pow(static_cast<double>(N), z.n_zeta) * a0(alpha, z, p);
    }
    if (std::abs(s.imag()) > 1e-10 * (1.0 + std::abs(s.real())))
        throw std::logic_error("leading prediction is not real");
    return s.real();
}

struct PolytopeExpansion {
    std::vector<int> alpha;
    std::vector<long> p;
    std::map<long, BigInt> exact_sums;
    std::vector<ZetaStratum> strata;
    std::map<std::pair<long, long>, std::complex<double>> a0_closed;       // (q,d) -> a0
    std::map<std::pair<std::pair<long, long>, int>, std::complex<double>> fitted;  // ((q,d),l)
    std::map<long, double> residuals;  // |data - fit| per N
    double condition = 0;
};

/// Least-squares fit of the expansion sum_zeta zeta^{-N} N^{n(zeta)-l}
/// a_l(zeta) against the normalized exact sums; N below 10*max(p) are
/// excluded. Throws on ill-conditioned design.
inline PolytopeExpansion fit_expansion(const std::vector<int>& alpha, const std::vector<long>& p,
                                       const std::vector<long>& Ns, int L) {
    PolytopeExpansion out;
    out.alpha = alpha;
    out.p = p;
    out.strata = zeta_strata(p);
    int asum = 0;
    for (int a : alpha) asum += a;

    long nmin = 10 * *std::max_element(p.begin(), p.end());
    std::vector<long> used;
    for (long N : Ns)
        if (N >= nmin) used.push_back(N);
    if (!used.empty()) {
        std::vector<BigInt> all = exact_sums_upto(alpha, p, *std::max_element(used.begin(), used.end()));
        for (long N : used) out.exact_sums[N] = all[static_cast<std::size_t>(N)];
    }
    const int rows = static_cast<int>(used.size());
    const int cols = static_cast<int>(out.strata.size()) * L;
    if (rows < 2 * cols) throw std::invalid_argument("not enough N values for the fit");

    Eigen::MatrixXcd A(rows, cols);
    Eigen::VectorXcd y(rows);
    for (int r = 0; r < rows; ++r) {
        long N = used[static_cast<std::size_t>(r)];
        y(r) = out.exact_sums[N].get_d() * std::pow(static_cast<double>(N), -asum);
        int c = 0;
        for (const auto& z : out.strata) {
            std::complex<double> zmn = detail::root_of_unity(z.q, z.d, -N);
            for (int l = 0; l < L; ++l)
                A(r, c++) = zmn * std::pow(static_cast<double>(N), z.n_zeta - l);
        }
    }
    // equilibrate columns so powers of N far apart in scale do not wreck
    // the conditioning; coefficients are unscaled afterwards
    Eigen::VectorXd colnorm(cols);
    for (int j = 0; j < cols; ++j) {
        colnorm(j) = A.col(j).norm();
        if (colnorm(j) == 0) colnorm(j) = 1;
        A.col(j) /= colnorm(j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.condition = svd.singularValues()(0) / svd.singularValues()(cols - 1);
    if (!(out.condition < 1e12)) throw std::runtime_error("ill-conditioned expansion fit");
    Eigen::VectorXcd coef = svd.solve(y);
    Eigen::VectorXcd res = y - A * coef;
    for (int j = 0; j < cols; ++j) coef(j) /= colnorm(j);

    int c = 0;
    for (const auto& z : out.strata) {
        out.a0_closed[{z.q, z.d}] = a0(alpha, z, p);
        for (int l = 0; l < L; ++l) out.fitted[{{z.q, z.d}, l}] = coef(c++);
    }
    for (int r = 0; r < rows; ++r) out.residuals[used[static_cast<std::size_t>(r)]] = std::abs(res(r));
    return out;
}

}  // namespace qbnf
