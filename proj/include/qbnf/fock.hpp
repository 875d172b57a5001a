#pragma once

#include "qbnf/chart.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace qbnf {

/// Basis of the harmonic eigenspace: all alpha with <p, alpha> = N, sorted
/// graded-lexicographically.
struct FockBasis {
    std::vector<long> p;
    long N = 0;
    std::vector<std::vector<int>> states;

    int dim() const { return static_cast<int>(states.size()); }

    int index_of(const std::vector<int>& alpha) const {
        auto it = index_.find(alpha);
        return it == index_.end() ? -1 : it->second;
    }

    static FockBasis enumerate(const std::vector<long>& p, long N) {
        for (long x : p)
            if (x <= 0) throw std::invalid_argument("p must be positive");
        if (N < 0) throw std::invalid_argument("N must be nonnegative");
        FockBasis b;
        b.p = p;
        b.N = N;
        std::vector<int> alpha(p.size(), 0);
        rec(p, N, 0, alpha, b.states);
        // the grade <p, alpha> is constant on the basis, so the deterministic
        // order is plain descending lexicographic
        std::sort(b.states.begin(), b.states.end(), std::greater<>());
        for (int i = 0; i < b.dim(); ++i) b.index_[b.states[static_cast<std::size_t>(i)]] = i;
        return b;
    }

private:
    std::map<std::vector<int>, int> index_;

    static void rec(const std::vector<long>& p, long rem, std::size_t j, std::vector<int>& alpha,
                    std::vector<std::vector<int>>& out) {
        if (j + 1 == p.size()) {
            if (rem % p[j] == 0) {
                alpha[j] = static_cast<int>(rem / p[j]);
                out.push_back(alpha);
            }
            return;
        }
        for (long c = 0; c * p[j] <= rem; ++c) {
            alpha[j] = static_cast<int>(c);
            rec(p, rem - c * p[j], j + 1, alpha, out);
        }
        alpha[j] = 0;
    }
};

/// Normal-ordered operator sum c * h^l * z^a (h d_z)^b. Reuses the monomial
/// container: first block = a, second block = b, h = extra h power.
struct WickOperator {
    int n = 1;
    std::map<Monomial, Coeff, MonomialLess> terms;

    bool is_resonant(const std::vector<long>& p) const {
        for (const auto& [m, c] : terms) {
            long d = 0;
            for (std::size_t j = 0; j < p.size(); ++j)
                d += (m.first(static_cast<int>(j)) - m.second(static_cast<int>(j))) * p[j];
            if (d != 0) return false;
        }
        return true;
    }
};

/// Weyl symbol -> normal-ordered operator. The Wick symbol is the heat
/// transform of the Weyl symbol at s = +h/2 (calibrated by the Hermite-basis
/// spectrum of H2, tested as an axiom); z^a zbar^b then maps to z^a (h d_z)^b.
inline WickOperator weyl_to_wick(const WeylSeries& A) {
    if (A.chart() != Chart::Complex || A.convention() != Convention::Bargmann)
        throw std::invalid_argument("weyl_to_wick expects the bargmann chart");
    WeylSeries wick = heat_transform(A, Rational(1, 2));
    WickOperator op;
    op.n = A.dim();
    for (const auto& [m, c] : wick.terms()) op.terms.emplace(m, c);
    return op;
}

/// Inverse of weyl_to_wick (heat transform at s = -h/2).
inline WeylSeries wick_to_weyl(const WickOperator& op, int max_weight) {
    WeylSeries wick(op.n, Chart::Complex, max_weight, Convention::Bargmann);
    for (const auto& [m, c] : op.terms) wick.add_term(m, c);
    return heat_transform(wick, Rational(-1, 2));
}

using HermitianMatrix = Eigen::MatrixXcd;

namespace detail {

inline double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

/// Matrix of one normal-ordered term on an explicit state list: column gamma
/// maps to gamma - b + a. Orthonormalized basis e_gamma = z^gamma/||z^gamma||
/// with ||z^gamma||^2 ~ h^{|gamma|} gamma!; only norm ratios appear, in the
/// log domain so large N cannot overflow.
template <typename Lookup>
void accumulate_term(HermitianMatrix& M, const Monomial& m, const Coeff& c, int n, double h,
                     const std::vector<std::vector<int>>& states, const Lookup& lookup) {
    int asum = 0, bsum = 0;
    for (int j = 0; j < n; ++j) {
        asum += m.first(j);
        bsum += m.second(j);
    }
    std::complex<double> base = c.to_complex() *
                                std::pow(h, m.h + bsum + 0.5 * (asum - bsum));
    for (std::size_t col = 0; col < states.size(); ++col) {
        const auto& g = states[col];
        double lg = 0;  // log of (gamma!/(gamma-b)!) * sqrt((gamma-b+a)!/gamma!)
        bool ok = true;
        std::vector<int> tgt(g);
        for (int j = 0; j < n && ok; ++j) {
            int b = m.second(j);
            if (g[static_cast<std::size_t>(j)] < b) {
                ok = false;
                break;
            }
            tgt[static_cast<std::size_t>(j)] += m.first(j) - b;
            lg += log_factorial(g[static_cast<std::size_t>(j)]) -
                  log_factorial(g[static_cast<std::size_t>(j)] - b);
            lg += 0.5 * (log_factorial(tgt[static_cast<std::size_t>(j)]) -
                         log_factorial(g[static_cast<std::size_t>(j)]));
        }
        if (!ok) continue;
        int row = lookup(tgt);
        if (row < 0) continue;
        M(row, static_cast<Eigen::Index>(col)) += base * std::exp(lg);
    }
}

}  // namespace detail

/// Matrix of a resonant Wick operator on FockBasis(p, N).
inline HermitianMatrix matrix_of_wick(const WickOperator& op, const FockBasis& basis, double h) {
    if (!op.is_resonant(basis.p))
        throw std::invalid_argument("operator does not preserve the eigenspace");
    HermitianMatrix M = HermitianMatrix::Zero(basis.dim(), basis.dim());
    for (const auto& [m, c] : op.terms)
        detail::accumulate_term(M, m, c, op.n, h, basis.states,
                                [&](const std::vector<int>& a) { return basis.index_of(a); });
    return M;
}

/// Matrix of an arbitrary Wick operator on an explicit state list; images
/// that leave the list are dropped (truncation).
inline HermitianMatrix matrix_on_states(const WickOperator& op,
                                        const std::vector<std::vector<int>>& states, double h) {
    std::map<std::vector<int>, int> index;
    for (std::size_t i = 0; i < states.size(); ++i) index[states[i]] = static_cast<int>(i);
    HermitianMatrix M = HermitianMatrix::Zero(static_cast<Eigen::Index>(states.size()),
                                              static_cast<Eigen::Index>(states.size()));
    for (const auto& [m, c] : op.terms)
        detail::accumulate_term(M, m, c, op.n, h, states, [&](const std::vector<int>& a) {
            auto it = index.find(a);
            return it == index.end() ? -1 : it->second;
        });
    return M;
}

/// All oscillator states with |alpha| <= Nmax in one flat list.
inline std::vector<std::vector<int>> level_truncated_states(int n, int Nmax) {
    std::vector<std::vector<int>> states;
    std::vector<long> ones(static_cast<std::size_t>(n), 1);
    for (long level = 0; level <= Nmax; ++level) {
        FockBasis b = FockBasis::enumerate(ones, level);
        for (auto& s : b.states) states.push_back(s);
    }
    return states;
}

/// Ascending eigenvalues of a (near-)Hermitian matrix; symmetrized first.
inline std::vector<double> hermitian_eigenvalues(const HermitianMatrix& M) {
    if (!M.allFinite()) throw std::invalid_argument("non-finite matrix entries");
    HermitianMatrix S = (M + M.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<HermitianMatrix> es(S);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + S.rows());
    return ev;
}

struct DirectSpectrum {
    std::vector<double> values;  // from the Nmax run
    std::vector<double> check;   // from the Nmax+5 run
    double max_diff = 0;         // convergence gap over the requested window
};

/// Reference oracle: diagonalize the Weyl quantization of a real polynomial
/// symbol on the truncated oscillator basis {alpha : |alpha| <= Nmax}, with
/// ladder matrix elements sqrt(hbar alpha). The Nmax+5 rerun measures
/// truncation convergence.
inline DirectSpectrum direct_spectrum(const WeylSeries& H, double hbar, int Nmax, int count) {
    if (H.chart() != Chart::Real || !H.is_real())
        throw std::invalid_argument("direct_spectrum expects a real symbol in the real chart");
    const int n = H.dim();
    WeylSeries Hb = to_complex_chart(H, Convention::Bargmann);
    WickOperator op = weyl_to_wick(Hb);

    auto run = [&](int nmax) {
        return hermitian_eigenvalues(
            matrix_on_states(op, level_truncated_states(n, nmax), hbar));
    };

    DirectSpectrum out;
    std::vector<double> e1 = run(Nmax), e2 = run(Nmax + 5);
    out.values.assign(e1.begin(), e1.begin() + std::min<std::size_t>(static_cast<std::size_t>(count), e1.size()));
    out.check.assign(e2.begin(), e2.begin() + std::min<std::size_t>(static_cast<std::size_t>(count), e2.size()));
    for (std::size_t i = 0; i < out.values.size() && i < out.check.size(); ++i)
        out.max_diff = std::max(out.max_diff, std::abs(out.values[i] - out.check[i]));
    return out;
}

}  // namespace qbnf
