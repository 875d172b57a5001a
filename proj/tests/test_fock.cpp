#include "qbnf/fock.hpp"
#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace qbnf;

namespace {

// X^N coefficient of prod 1/(1 - X^{p_i}) by plain polynomial multiplication
long gen_fun_dim(const std::vector<long>& p, int N) {
    std::vector<long> c(static_cast<std::size_t>(N) + 1, 0);
    c[0] = 1;
    for (long pi : p)
        for (std::size_t k = static_cast<std::size_t>(pi); k <= static_cast<std::size_t>(N); ++k)
            c[k] += c[k - static_cast<std::size_t>(pi)];
    return c[static_cast<std::size_t>(N)];
}

double factorial_ratio(const std::vector<int>& g, const std::vector<int>& a) {
    // gamma!/(gamma-a)!
    double r = 1;
    for (std::size_t j = 0; j < g.size(); ++j)
        for (int k = 0; k < a[j]; ++k) r *= g[j] - k;
    return r;
}

}  // namespace

TEST_CASE("basis enumeration matches the generating function") {
    auto b = FockBasis::enumerate({1, 1}, 2);
    REQUIRE(b.states == std::vector<std::vector<int>>{{2, 0}, {1, 1}, {0, 2}});

    b = FockBasis::enumerate({1, 2}, 4);
    REQUIRE(b.states == std::vector<std::vector<int>>{{4, 0}, {2, 1}, {0, 2}});
    REQUIRE(b.dim() == 3);

    for (int N : {0, 1, 5, 12})
        REQUIRE(FockBasis::enumerate({1, 1, 1}, N).dim() == (N + 1) * (N + 2) / 2);

    for (auto p : {std::vector<long>{2, 3}, {1, 2}, {1, 2, 3}, {2, 3, 5}})
        for (int N : {0, 1, 7, 23, 40})
            REQUIRE(FockBasis::enumerate(p, N).dim() == gen_fun_dim(p, N));

    // constraint and determinism
    b = FockBasis::enumerate({2, 3}, 17);
    for (const auto& a : b.states) REQUIRE(2 * a[0] + 3 * a[1] == 17);
    for (int i = 0; i < b.dim(); ++i) REQUIRE(b.index_of(b.states[static_cast<std::size_t>(i)]) == i);
}

TEST_CASE("ordering conversion calibration: H2 spectrum on the eigenspace") {
    const double h = 0.37;
    std::vector<Rational> nu{Rational(1), Rational(2)};
    WeylSeries H2 = harmonic_oscillator(nu, 4);
    WickOperator op = weyl_to_wick(to_complex_chart(H2, Convention::Bargmann));

    FockBasis basis = FockBasis::enumerate({1, 2}, 6);
    HermitianMatrix M = matrix_of_wick(op, basis, h);
    for (int i = 0; i < basis.dim(); ++i) {
        for (int j = 0; j < basis.dim(); ++j) {
            if (i == j) {
                const auto& a = basis.states[static_cast<std::size_t>(i)];
                double expect = h * (a[0] + 2.0 * a[1] + 1.5);
                REQUIRE(M(i, j).real() == Catch::Approx(expect).epsilon(1e-13));
                REQUIRE(M(i, j).imag() == 0.0);
            } else {
                REQUIRE(std::abs(M(i, j)) == 0.0);
            }
        }
    }
}

TEST_CASE("ordering conversions are mutually inverse") {
    std::mt19937 rng(101);
    for (int trial = 0; trial < 30; ++trial) {
        WeylSeries A = testutil::random_series(rng, 2, 7, 0, 6, 8, true, Chart::Complex,
                                               Convention::Bargmann);
        REQUIRE(wick_to_weyl(weyl_to_wick(A), A.max_weight()) == A);
    }
    // constants pass through untouched
    WeylSeries c = WeylSeries::constant(1, Chart::Complex, 4, Coeff(7L, 3L), Convention::Bargmann);
    WickOperator op = weyl_to_wick(c);
    REQUIRE(op.terms.size() == 1);
    REQUIRE(op.terms.begin()->second == Coeff(7L, 3L));
}

TEST_CASE("wick matrix elements") {
    const double h = 0.25;

    // z1 (h d_1) on the one-state basis p=(1), N=3
    WickOperator num;
    num.n = 1;
    Monomial m;
    m.set_first(0, 1);
    m.set_second(0, 1);
    num.terms.emplace(m, Coeff(1L));
    FockBasis b1 = FockBasis::enumerate({1}, 3);
    REQUIRE(b1.dim() == 1);
    HermitianMatrix M = matrix_of_wick(num, b1, h);
    REQUIRE(M(0, 0).real() == Catch::Approx(3 * h).epsilon(1e-14));

    // identity
    WickOperator id;
    id.n = 2;
    id.terms.emplace(Monomial::unit(), Coeff(1L));
    FockBasis b2 = FockBasis::enumerate({1, 1}, 2);
    REQUIRE(matrix_of_wick(id, b2, h).isApprox(HermitianMatrix::Identity(3, 3)));

    // K_(1,1) on p=(1,1), N=2: trace = h^2 sum gamma1*gamma2 = h^2
    WickOperator K;
    K.n = 2;
    Monomial k11;
    k11.set_first(0, 1);
    k11.set_first(1, 1);
    k11.set_second(0, 1);
    k11.set_second(1, 1);
    K.terms.emplace(k11, Coeff(1L));
    HermitianMatrix MK = matrix_of_wick(K, b2, h);
    REQUIRE(MK.trace().real() == Catch::Approx(h * h).epsilon(1e-13));

    // a term that leaves the eigenspace is rejected
    WickOperator bad;
    bad.n = 2;
    Monomial shift;
    shift.set_first(0, 1);
    bad.terms.emplace(shift, Coeff(1L));
    REQUIRE_THROWS_AS(matrix_of_wick(bad, b2, h), std::invalid_argument);
}

TEST_CASE("symmetric wick operators give Hermitian matrices") {
    std::mt19937 rng(55);
    std::uniform_int_distribution<int> coeff(-4, 4);
    const std::vector<long> p{1, 2};
    FockBasis basis = FockBasis::enumerate(p, 9);
    WickOperator op;
    op.n = 2;
    // random resonant (a,b) pairs, closed under swap with conjugate coeffs
    std::vector<std::pair<std::vector<int>, std::vector<int>>> pairs{
        {{2, 0}, {0, 1}}, {{1, 1}, {1, 1}}, {{2, 1}, {2, 1}}, {{4, 0}, {0, 2}}};
    for (const auto& [a, b] : pairs) {
        Coeff c{GaussianRational(Rational(coeff(rng)), Rational(coeff(rng)))};
        Monomial m1, m2;
        for (int j = 0; j < 2; ++j) {
            m1.set_first(j, a[static_cast<std::size_t>(j)]);
            m1.set_second(j, b[static_cast<std::size_t>(j)]);
            m2.set_first(j, b[static_cast<std::size_t>(j)]);
            m2.set_second(j, a[static_cast<std::size_t>(j)]);
        }
        op.terms[m1] += c;
        op.terms[m2] += c.conj();
    }
    HermitianMatrix M = matrix_of_wick(op, basis, 0.1);
    REQUIRE((M - M.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ladder commutation reproduces i hbar on interior states") {
    const double hbar = 0.31;
    const int n = 2, Nmax = 8;
    auto states = level_truncated_states(n, Nmax);
    WeylSeries x0(n, Chart::Real, 4), xi0(n, Chart::Real, 4);
    x0.add_term(Monomial::var_first(0), Coeff(1L));
    xi0.add_term(Monomial::var_second(0), Coeff(1L));
    auto Mx = matrix_on_states(weyl_to_wick(to_complex_chart(x0, Convention::Bargmann)), states, hbar);
    auto Mxi =
        matrix_on_states(weyl_to_wick(to_complex_chart(xi0, Convention::Bargmann)), states, hbar);
    HermitianMatrix C = Mx * Mxi - Mxi * Mx;
    std::complex<double> ih(0, hbar);
    for (std::size_t i = 0; i < states.size(); ++i) {
        int level = 0;
        for (int v : states[i]) level += v;
        if (level >= Nmax) continue;  // boundary rows feel the truncation
        for (std::size_t j = 0; j < states.size(); ++j) {
            int lj = 0;
            for (int v : states[j]) lj += v;
            if (lj >= Nmax) continue;
            std::complex<double> expect = (i == j) ? ih : 0.0;
            REQUIRE(std::abs(C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                             expect) < 1e-12);
        }
    }
}

TEST_CASE("direct spectrum of the harmonic oscillator") {
    std::vector<Rational> nu{Rational(1)};
    WeylSeries H2 = harmonic_oscillator(nu, 4);
    const double hbar = 0.05;
    DirectSpectrum sp = direct_spectrum(H2, hbar, 25, 10);
    for (int m = 0; m < 10; ++m)
        REQUIRE(sp.values[static_cast<std::size_t>(m)] ==
                Catch::Approx(hbar * (m + 0.5)).epsilon(1e-12));
    REQUIRE(sp.max_diff < 1e-12);
}

TEST_CASE("trace identities on the eigenspace") {
    const double h = 0.15;
    const std::vector<long> p{1, 2};
    const long N = 14;
    FockBasis basis = FockBasis::enumerate(p, N);

    // K_alpha trace vs direct enumeration of sum gamma!/(gamma-alpha)!
    std::vector<int> alpha{2, 1};
    WickOperator K;
    K.n = 2;
    Monomial m;
    for (int j = 0; j < 2; ++j) {
        m.set_first(j, alpha[static_cast<std::size_t>(j)]);
        m.set_second(j, alpha[static_cast<std::size_t>(j)]);
    }
    K.terms.emplace(m, Coeff(1L));
    double expect = 0;
    for (const auto& g : basis.states) {
        bool ok = g[0] >= alpha[0] && g[1] >= alpha[1];
        if (ok) expect += factorial_ratio(g, alpha);
    }
    expect *= std::pow(h, alpha[0] + alpha[1]);
    REQUIRE(matrix_of_wick(K, basis, h).trace().real() == Catch::Approx(expect).epsilon(1e-12));

    // off-diagonal z^a (h d)^b with a != b, <a-b, p> = 0: trace exactly 0
    WickOperator off;
    off.n = 2;
    Monomial mo;
    mo.set_first(0, 2);   // a = (2,0)
    mo.set_second(1, 1);  // b = (0,1)
    off.terms.emplace(mo, Coeff(1L));
    REQUIRE(matrix_of_wick(off, basis, h).trace() == std::complex<double>(0, 0));
}

TEST_CASE("hermitian eigensolver contract") {
    HermitianMatrix D = HermitianMatrix::Zero(3, 3);
    D(0, 0) = 2;
    D(1, 1) = -1;
    D(2, 2) = 0.5;
    auto ev = hermitian_eigenvalues(D);
    REQUIRE(ev == std::vector<double>{-1, 0.5, 2});

    HermitianMatrix S(2, 2);
    S << 0, 1, 1, 0;
    ev = hermitian_eigenvalues(S);
    REQUIRE(ev[0] == Catch::Approx(-1.0));
    REQUIRE(ev[1] == Catch::Approx(1.0));

    std::mt19937 rng(77);
    std::normal_distribution<double> g(0, 1);
    HermitianMatrix R(50, 50);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j) R(i, j) = std::complex<double>(g(rng), g(rng));
    R = (R + R.adjoint()).eval();
    ev = hermitian_eigenvalues(R);
    double sum = 0;
    for (double v : ev) sum += v;
    REQUIRE(sum == Catch::Approx(R.trace().real()).epsilon(1e-9));

    HermitianMatrix bad(1, 1);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(hermitian_eigenvalues(bad), std::invalid_argument);
}
