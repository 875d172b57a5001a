#include "qbnf/birkhoff.hpp"
#include "qbnf/chart.hpp"
#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

using namespace qbnf;

namespace {

// evaluate a real-chart series at a numeric phase point (classical part only)
double eval_classical(const WeylSeries& s, const std::vector<double>& x,
                      const std::vector<double>& xi) {
    double r = 0;
    for (const auto& [m, c] : s.terms()) {
        if (m.h != 0) continue;
        double t = c.to_complex().real();
        for (int j = 0; j < s.dim(); ++j) {
            for (int p = 0; p < m.first(j); ++p) t *= x[static_cast<std::size_t>(j)];
            for (int p = 0; p < m.second(j); ++p) t *= xi[static_cast<std::size_t>(j)];
        }
        r += t;
    }
    return r;
}

// time average of the classical symbol along the H2 flow (Simpson rule over
// one common period); equals the resonant projection for integer frequencies
double flow_average(const WeylSeries& s, const std::vector<long>& nu,
                    const std::vector<double>& x0, const std::vector<double>& xi0) {
    const double T = 2 * M_PI;
    const int steps = 2000;
    double acc = 0;
    std::vector<double> x(x0.size()), xi(x0.size());
    for (int k = 0; k <= steps; ++k) {
        double t = T * k / steps;
        for (std::size_t j = 0; j < x0.size(); ++j) {
            double c = std::cos(nu[j] * t), sn = std::sin(nu[j] * t);
            x[j] = x0[j] * c + xi0[j] * sn;
            xi[j] = -x0[j] * sn + xi0[j] * c;
        }
        double w = (k == 0 || k == steps) ? 1 : (k % 2 ? 4 : 2);
        acc += w * eval_classical(s, x, xi);
    }
    return acc * (T / steps) / 3 / T;
}

std::vector<Rational> rat_freqs(std::initializer_list<long> v) {
    std::vector<Rational> r;
    for (long f : v) r.emplace_back(f);
    return r;
}

}  // namespace

TEST_CASE("split_resonant classifies monomials against the frequency vector") {
    auto nu = rat_freqs({1, 2});
    WeylSeries R(2, Chart::Complex, 8);
    Monomial res;  // z1^2 zbar2: <(2,0)-(0,1),(1,2)> = 0
    res.set_first(0, 2);
    res.set_second(1, 1);
    Monomial nonres;  // z1 z2 zbar2: <(1,1)-(0,1),(1,2)> = 1
    nonres.set_first(0, 1);
    nonres.set_first(1, 1);
    nonres.set_second(1, 1);
    R.add_term(res, Coeff(3L));
    R.add_term(nonres, Coeff(5L));

    auto [ker, img] = split_resonant(R, nu);
    REQUIRE(ker.coeff(res) == Coeff(3L));
    REQUIRE(ker.size() == 1);
    REQUIRE(img.coeff(nonres) == Coeff(5L));
    REQUIRE(img.size() == 1);
    REQUIRE(ker + img == R);
}

TEST_CASE("split_resonant respects conjugation closure on real series") {
    std::mt19937 rng(2025);
    auto nu = rat_freqs({2, 3});
    for (int trial = 0; trial < 5; ++trial) {
        WeylSeries p = testutil::random_real_series(rng, 2, 8, 4, 4, 8);
        REQUIRE(p.is_real());
        auto [ker, img] = split_resonant(p, nu);
        REQUIRE(ker.is_real());
        REQUIRE(img.is_real());
        REQUIRE(ker + img == p);
    }
}

TEST_CASE("solve_homological cancels the non-resonant part exactly") {
    std::mt19937 rng(7);
    auto nu = rat_freqs({1, 3});
    const int W = 8;
    WeylSeries H2c = to_complex_chart(harmonic_oscillator(nu, W), Convention::Birkhoff);
    for (int trial = 0; trial < 5; ++trial) {
        WeylSeries R = testutil::random_series(rng, 2, W, 3, 3, 10, true, Chart::Complex);
        auto [Aprime, K] = solve_homological(R, H2c, nu);
        WeylSeries lhs = R + i_over_h_bracket(Aprime, H2c, W);
        REQUIRE(lhs == K);
        auto [kk, ki] = split_resonant(K, nu);
        REQUIRE(ki.empty());
        auto [ak, ai] = split_resonant(Aprime, nu);
        REQUIRE(ak.empty());  // canonical gauge: A has no resonant part
    }
}

TEST_CASE("exp_ad is a truncated automorphism with inverse exp_ad(-A)") {
    std::mt19937 rng(11);
    const int W = 7;
    for (int trial = 0; trial < 3; ++trial) {
        WeylSeries A = testutil::random_real_series(rng, 2, W, 3, 4, 5);
        WeylSeries P = testutil::random_real_series(rng, 2, W, 2, 5, 8);
        WeylSeries Q = testutil::random_real_series(rng, 2, W, 2, 5, 8);

        WeylSeries zero(2, Chart::Real, W);
        REQUIRE(exp_ad(zero, P, W) == P);
        REQUIRE(exp_ad(-A, exp_ad(A, P, W), W) == P);

        // morphism property for the star product
        WeylSeries lhs = exp_ad(A, moyal_product(P, Q, W), W);
        WeylSeries rhs = moyal_product(exp_ad(A, P, W), exp_ad(A, Q, W), W);
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("1D quartic oscillator normal form") {
    const int W = 8;
    auto nu = rat_freqs({1});
    WeylSeries H2 = harmonic_oscillator(nu, W);
    WeylSeries L(1, Chart::Real, W);
    Monomial x4;
    x4.set_first(0, 4);
    L.add_term(x4, Coeff(1L));

    NormalFormResult nf = birkhoff_normal_form(H2, L, W);

    // conjugation identity, re-derived in the real chart
    WeylSeries K = nf.K_total();
    REQUIRE(exp_ad(nf.A_total(), H2 + L, W) == H2 + K);
    REQUIRE(K.is_real());
    for (const auto& piece : nf.K) {
        if (piece.empty()) continue;
        REQUIRE(i_over_h_bracket(nf.H2, piece, W).empty());
    }

    // parity: an even perturbation has no odd-weight normal form pieces
    REQUIRE(nf.K[0].empty());
    REQUIRE(nf.K[2].empty());

    // circle-average oracle for the leading term: <x^4> = (3/8)(x^2+xi^2)^2
    WeylSeries expected(1, Chart::Real, W);
    Monomial a, b, c;
    a.set_first(0, 4);
    b.set_first(0, 2);
    b.set_second(0, 2);
    c.set_second(0, 4);
    expected.add_term(a, Coeff(3L, 8L));
    expected.add_term(b, Coeff(3L, 4L));
    expected.add_term(c, Coeff(3L, 8L));
    REQUIRE(nf.K[1].classical() == expected);

    // weight 4 comes straight from L, so it is purely classical; the first
    // hbar corrections show up at weight 6 and carry even hbar powers
    REQUIRE(nf.K[1] == nf.K[1].classical());
    WeylSeries quantum6 = nf.K[3] - nf.K[3].classical();
    REQUIRE(!quantum6.empty());
    for (const auto& [m, cc] : quantum6.terms()) REQUIRE(m.h == 2);
}

TEST_CASE("nonresonant 2D normal form depends only on the actions") {
    std::mt19937 rng(23);
    const int W = 6;
    auto nu = rat_freqs({2, 5});  // no resonance below weight 7
    WeylSeries H2 = harmonic_oscillator(nu, W);
    WeylSeries L = testutil::random_real_series(rng, 2, W, 3, 4, 6);
    NormalFormResult nf = birkhoff_normal_form(H2, L, W);

    WeylSeries Kc = to_complex_chart(nf.K_total(), Convention::Birkhoff);
    for (const auto& [m, c] : Kc.terms()) {
        for (int j = 0; j < 2; ++j) REQUIRE(m.first(j) == m.second(j));
    }
}

TEST_CASE("resonant 1:2 leading term matches the classical flow average") {
    const int W = 6;
    auto nu = rat_freqs({1, 2});
    WeylSeries H2 = harmonic_oscillator(nu, W);
    WeylSeries L(2, Chart::Real, W);
    Monomial m;  // x1^2 x2, the Fermi resonance coupling
    m.set_first(0, 2);
    m.set_first(1, 1);
    L.add_term(m, Coeff(1L));

    NormalFormResult nf = birkhoff_normal_form(H2, L, W);
    WeylSeries k3 = nf.K[0].classical();
    REQUIRE(!k3.empty());  // the resonance leaves an angle-dependent term

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int pt = 0; pt < 4; ++pt) {
        std::vector<double> x{u(rng), u(rng)}, xi{u(rng), u(rng)};
        double avg = flow_average(L, {1, 2}, x, xi);
        double val = eval_classical(k3, x, xi);
        REQUIRE(val == Catch::Approx(avg).margin(1e-9));
    }
}

TEST_CASE("leading_resonant_terms agrees with the full normalization") {
    std::mt19937 rng(31);
    const int W = 6;
    auto nu = rat_freqs({1, 2});
    WeylSeries H2 = harmonic_oscillator(nu, W);
    WeylSeries p3 = testutil::random_real_series(rng, 2, W, 3, 3, 5);
    WeylSeries p4 = testutil::random_real_series(rng, 2, W, 4, 4, 5);
    // strip hbar so the perturbation is a plain classical polynomial
    p3 = p3.classical();
    p4 = p4.classical();

    NormalFormResult nf = birkhoff_normal_form(H2, p3 + p4, W);
    auto [k3, k4] = leading_resonant_terms(p3, p4, nu);
    REQUIRE(nf.K[0].classical() == k3);
    REQUIRE(nf.K[1].classical() == k4);
}

TEST_CASE("validation rejects malformed inputs") {
    const int W = 6;
    WeylSeries H2(1, Chart::Real, W);
    Monomial cross;
    cross.set_first(0, 1);
    cross.set_second(0, 1);
    H2.add_term(cross, Coeff(1L));
    WeylSeries L(1, Chart::Real, W);
    Monomial x3;
    x3.set_first(0, 3);
    L.add_term(x3, Coeff(1L));
    REQUIRE_THROWS_AS(birkhoff_normal_form(H2, L, W), std::invalid_argument);

    WeylSeries good = harmonic_oscillator(rat_freqs({1}), W);
    WeylSeries low(1, Chart::Real, W);
    low.add_term(Monomial::var_first(0), Coeff(1L));  // weight 1, not in O_3
    REQUIRE_THROWS_AS(birkhoff_normal_form(good, low, W), std::invalid_argument);

    WeylSeries cplx(1, Chart::Real, W);
    cplx.add_term(x3, Coeff::i());
    REQUIRE_THROWS_AS(birkhoff_normal_form(good, cplx, W), std::invalid_argument);
}
