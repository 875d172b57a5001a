#pragma once

#include "qbnf/chart.hpp"
#include "qbnf/moyal.hpp"

#include <optional>
#include <vector>

namespace qbnf {

/// Output of the quantum Birkhoff normalization: e^{i/hbar ad_A}(H2+L) = H2+K
/// with [K, H2] = 0, all exact modulo weight W+1. A and K are stored as
/// weight-homogeneous pieces of weights 3..W, in the real chart.
struct NormalFormResult {
    WeylSeries H2;                // quadratic, real chart
    std::vector<Rational> nu;    // frequencies
    int W = 0;                   // truncation weight
    std::vector<WeylSeries> A;   // A[i] has weight i+3
    std::vector<WeylSeries> K;   // K[i] has weight i+3

    WeylSeries A_total() const {
        WeylSeries s(H2.dim(), Chart::Real, W);
        for (const auto& p : A) s = s + p;
        return s;
    }
    WeylSeries K_total() const {
        WeylSeries s(H2.dim(), Chart::Real, W);
        for (const auto& p : K) s = s + p;
        return s;
    }
};

namespace detail {

inline Rational resonance_pairing(const Monomial& m, const std::vector<Rational>& nu) {
    Rational s(0);
    for (std::size_t j = 0; j < nu.size(); ++j)
        s += (Rational(m.first(static_cast<int>(j))) - m.second(static_cast<int>(j))) * nu[j];
    return s;
}

}  // namespace detail

/// Split a weight-homogeneous series into its ad_{H2}-kernel part (monomials
/// with <beta-gamma, nu> = 0 in the complex chart) and the complement.
/// Input and output share the caller's chart.
inline std::pair<WeylSeries, WeylSeries> split_resonant(const WeylSeries& R,
                                                        const std::vector<Rational>& nu) {
    if (!R.is_homogeneous()) throw std::invalid_argument("split_resonant: non-homogeneous input");
    const bool was_real = R.chart() == Chart::Real;
    WeylSeries Rc = was_real ? to_complex_chart(R, Convention::Birkhoff) : R;
    WeylSeries ker = WeylSeries::like(Rc), img = WeylSeries::like(Rc);
    for (const auto& [m, c] : Rc.terms()) {
        if (detail::resonance_pairing(m, nu) == 0)
            ker.add_term(m, c);
        else
            img.add_term(m, c);
    }
    if (was_real) return {to_real_chart(ker), to_real_chart(img)};
    return {ker, img};
}

/// Solve the homological equation K = R + i/hbar ad_{A'} H2 for homogeneous R:
/// K is the kernel part of R and A' cancels the rest. The eigenvalue of
/// i/hbar ad_{H2} on each monomial is read off from the bracket itself rather
/// than from a closed formula.
inline std::pair<WeylSeries, WeylSeries> solve_homological(const WeylSeries& R,
                                                           const WeylSeries& H2c,
                                                           const std::vector<Rational>& nu) {
    auto [ker, img] = split_resonant(R, nu);
    WeylSeries Aprime = WeylSeries::like(img);
    if (!img.empty()) {
        const int W = img.max_weight();
        WeylSeries br = i_over_h_bracket(H2c, img, W);
        for (const auto& [m, c] : img.terms()) {
            Coeff lam = br.coeff(m) / c;
            if (lam.is_zero())
                throw std::logic_error("zero adjoint eigenvalue on a non-resonant monomial");
            // i/hbar ad_{H2}(A') = img, so i/hbar ad_{A'}(H2) kills the image
            Aprime.add_term(m, c / lam);
        }
    }
    return {Aprime, ker};
}

/// exp(i/hbar ad_A) P, truncated at weight W. Terminates because A in O_3
/// makes each bracket raise the minimal weight.
inline WeylSeries exp_ad(const WeylSeries& A, const WeylSeries& P, int W) {
    if (!A.in_O(3)) throw std::invalid_argument("exp_ad: A must lie in O_3");
    WeylSeries r = P;
    r.set_max_weight(W);
    WeylSeries cur = r;
    Rational fact(1);
    for (int l = 1; l <= W + 1; ++l) {
        cur = i_over_h_bracket(A, cur, W);
        if (cur.empty()) break;
        fact *= l;
        r = r + cur.scaled(Coeff(GaussianRational(Rational(1) / fact)));
    }
    return r;
}

inline void validate_elliptic_diagonal(const WeylSeries& H2, std::vector<Rational>& nu_out) {
    if (H2.chart() != Chart::Real) throw std::invalid_argument("H2 must be in the real chart");
    const int n = H2.dim();
    std::vector<Rational> nu(n, Rational(0));
    for (const auto& [m, c] : H2.terms()) {
        if (!c.is_rational()) throw std::invalid_argument("H2 must have real rational coefficients");
        bool ok = false;
        for (int j = 0; j < n; ++j) {
            if ((m.first(j) == 2 || m.second(j) == 2) && m.weight() == 2 && m.h == 0) {
                if (nu[j] == 0) nu[j] = 2 * c.a.re;
                if (nu[j] != 2 * c.a.re)
                    throw std::invalid_argument("H2 not of the form sum nu_j (x_j^2+xi_j^2)/2");
                ok = true;
                break;
            }
        }
        if (!ok) throw std::invalid_argument("H2 not in diagonal harmonic form");
    }
    for (const auto& f : nu)
        if (!(f > 0)) throw std::invalid_argument("H2 not elliptic: nonpositive frequency");
    // a lone x^2 or xi^2 term would pass the per-term scan; rebuilding the
    // oscillator catches missing partners
    if (!(H2 == harmonic_oscillator(nu, H2.max_weight())))
        throw std::invalid_argument("H2 not of the form sum nu_j (x_j^2+xi_j^2)/2");
    nu_out = std::move(nu);
}

/// Iterative quantum Birkhoff normal form. H2 must be a diagonal elliptic
/// oscillator with positive rational frequencies, L a real perturbation in
/// O_3. Rounds run at growing truncation weight; the full-weight conjugation
/// residual is re-verified at the end.
inline NormalFormResult birkhoff_normal_form(const WeylSeries& H2, const WeylSeries& L, int W) {
    NormalFormResult res;
    validate_elliptic_diagonal(H2, res.nu);
    if (!L.in_O(3)) throw std::invalid_argument("perturbation L must lie in O_3");
    if (L.chart() != Chart::Real || !L.is_real())
        throw std::invalid_argument("perturbation L must be real");
    res.H2 = H2;
    res.H2.set_max_weight(W);
    res.W = W;

    WeylSeries H2c = to_complex_chart(res.H2, Convention::Birkhoff);
    WeylSeries Lc = to_complex_chart(L, Convention::Birkhoff);
    Lc.set_max_weight(W);
    WeylSeries total = H2c + Lc;

    WeylSeries A_tot(H2.dim(), Chart::Complex, W);
    std::vector<WeylSeries> Kc;
    for (int N = 3; N <= W; ++N) {
        // only weights <= N are needed to extract the next homogeneous piece
        WeylSeries A_low = A_tot;
        A_low.set_max_weight(N);
        WeylSeries total_low = total;
        total_low.set_max_weight(N);
        WeylSeries P = exp_ad(A_low, total_low, N);
        WeylSeries R = P.homogeneous_part(N);
        for (const auto& k : Kc) R = R - k.homogeneous_part(N);
        auto [Aprime, K] = solve_homological(R, H2c, res.nu);
        // the pieces were built at truncation N; lift them back to weight W
        // so later sums do not truncate
        Aprime.set_max_weight(W);
        K.set_max_weight(W);
        A_tot = A_tot + Aprime;
        Kc.push_back(K);
    }

    // full-weight verification: residual must vanish below weight W+1
    WeylSeries P = exp_ad(A_tot, total, W);
    WeylSeries resid = P - H2c;
    for (const auto& k : Kc) resid = resid - k;
    if (!resid.empty())
        throw std::logic_error("birkhoff_normal_form: nonzero conjugation residual");

    for (int N = 3; N <= W; ++N) {
        res.A.push_back(to_real_chart(A_tot.homogeneous_part(N)));
        res.K.push_back(to_real_chart(Kc[static_cast<std::size_t>(N - 3)]));
    }
    return res;
}

/// K with hbar set to 0: the classical Birkhoff normal form.
inline WeylSeries classical_normal_form(const NormalFormResult& res) {
    return res.K_total().classical();
}

/// Leading resonant terms of the classical normal form computed directly from
/// the degree-3 and degree-4 parts of the perturbation:
///   k3 = resonant part of p3,
///   k4 = resonant part of (p4 + {a3, p3 - 1/2 p3^nonres}),
/// where {H2, a3} = p3^nonres so the time-1 flow of a3 removes that part.
inline std::pair<WeylSeries, WeylSeries> leading_resonant_terms(const WeylSeries& p3,
                                                                const WeylSeries& p4,
                                                                const std::vector<Rational>& nu) {
    const int n = static_cast<int>(nu.size());
    const int W = std::max(p4.max_weight(), 6);
    WeylSeries H2 = harmonic_oscillator(nu, W);
    WeylSeries H2c = to_complex_chart(H2, Convention::Birkhoff);
    WeylSeries p3c = to_complex_chart(p3, Convention::Birkhoff).classical();
    WeylSeries p4c = to_complex_chart(p4, Convention::Birkhoff).classical();
    p3c.set_max_weight(W);
    p4c.set_max_weight(W);

    auto [k3, img3] = split_resonant(p3c, nu);
    WeylSeries a3(n, Chart::Complex, W);
    if (!img3.empty()) {
        WeylSeries br = poisson_bracket(H2c, img3, W);
        for (const auto& [m, c] : img3.terms()) {
            Coeff lam = br.coeff(m) / c;  // {H2, m} = lam m
            a3.add_term(m, c / lam);      // {H2, a3} = p3^nonres
        }
    }
    WeylSeries corr =
        p4c + poisson_bracket(a3, p3c - img3.scaled(Coeff(1L, 2L)), W);
    auto [k4, img4] = split_resonant(corr.homogeneous_part(4), nu);
    (void)img4;
    return {to_real_chart(k3), to_real_chart(k4)};
}

}  // namespace qbnf
