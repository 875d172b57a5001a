#pragma once

#include "qbnf/exact.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace qbnf {

inline constexpr int kMaxDim = 3;

enum class Chart { Real, Complex };
// Two z-conventions: birkhoff z = x + i xi (used by the normal form),
// bargmann z = (x - i xi)/sqrt(2) (used for Fock / Toeplitz work).
enum class Convention { Birkhoff, Bargmann };

/// Monomial in 2n phase-space variables and hbar. In the real chart the
/// blocks are (x-exponents, xi-exponents); in a complex chart (z, zbar).
struct Monomial {
    std::array<std::uint8_t, 2 * kMaxDim> e{};  // [0..n): first block, [kMaxDim..): second
    std::uint8_t h = 0;

    int first(int j) const { return e[j]; }
    int second(int j) const { return e[kMaxDim + j]; }
    void set_first(int j, int v) { e[j] = static_cast<std::uint8_t>(v); }
    void set_second(int j, int v) { e[kMaxDim + j] = static_cast<std::uint8_t>(v); }

    int weight() const {
        int w = 2 * h;
        for (auto x : e) w += x;
        return w;
    }
    int degree() const {  // degree in the phase-space variables only
        int d = 0;
        for (auto x : e) d += x;
        return d;
    }

    std::uint64_t key() const {
        std::uint64_t k = h;
        for (auto x : e) k = (k << 8) | x;
        return k;
    }
    friend bool operator==(const Monomial& x, const Monomial& y) { return x.key() == y.key(); }

    static Monomial unit() { return {}; }
    static Monomial var_first(int j, int p = 1) {
        Monomial m;
        m.set_first(j, p);
        return m;
    }
    static Monomial var_second(int j, int p = 1) {
        Monomial m;
        m.set_second(j, p);
        return m;
    }
    static Monomial hbar(int p = 1) {
        Monomial m;
        m.h = static_cast<std::uint8_t>(p);
        return m;
    }
};

/// Graded-lexicographic order: weight first, then packed exponents.
struct MonomialLess {
    bool operator()(const Monomial& x, const Monomial& y) const {
        int wx = x.weight(), wy = y.weight();
        if (wx != wy) return wx < wy;
        return x.key() < y.key();
    }
};

inline int weight(const Monomial& m) { return m.weight(); }

/// Truncated formal series in (x, xi, hbar) or (z, zbar, hbar) with exact
/// coefficients. Terms of weight > max_weight are never stored; zero
/// coefficients are removed eagerly so equal series compare equal term-wise.
class WeylSeries {
public:
    using TermMap = std::map<Monomial, Coeff, MonomialLess>;

    WeylSeries() = default;
    WeylSeries(int n, Chart chart, int max_weight,
               Convention conv = Convention::Birkhoff)
        : n_(n), chart_(chart), conv_(conv), max_weight_(max_weight) {
        if (n < 1 || n > kMaxDim) throw std::invalid_argument("dimension out of range");
    }

    int dim() const { return n_; }
    Chart chart() const { return chart_; }
    Convention convention() const { return conv_; }
    int max_weight() const { return max_weight_; }
    const TermMap& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    void set_max_weight(int w) {
        max_weight_ = w;
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (it->first.weight() > w)
                it = terms_.erase(it);
            else
                ++it;
        }
    }

    void add_term(const Monomial& m, const Coeff& c) {
        if (c.is_zero() || m.weight() > max_weight_) return;
        auto [it, fresh] = terms_.try_emplace(m, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Coeff coeff(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Coeff{} : it->second;
    }

    /// Lowest weight present; max_weight+1 when the series is zero.
    int min_weight() const {
        return terms_.empty() ? max_weight_ + 1 : terms_.begin()->first.weight();
    }
    bool in_O(int N) const { return min_weight() >= N; }

    bool is_homogeneous() const {
        return terms_.empty() ||
               terms_.begin()->first.weight() == terms_.rbegin()->first.weight();
    }

    WeylSeries homogeneous_part(int w) const {
        WeylSeries r = like(*this);
        for (const auto& [m, c] : terms_)
            if (m.weight() == w) r.terms_.emplace(m, c);
        return r;
    }

    /// True for a series with real coefficients in the real chart; in a
    /// complex chart, for one fixed under (beta,gamma) swap + conjugation.
    bool is_real() const {
        if (chart_ == Chart::Real) {
            for (const auto& [m, c] : terms_)
                if (!c.is_real()) return false;
            return true;
        }
        for (const auto& [m, c] : terms_) {
            Monomial sw = m;
            for (int j = 0; j < n_; ++j) {
                sw.set_first(j, m.second(j));
                sw.set_second(j, m.first(j));
            }
            if (!(coeff(sw) == c.conj())) return false;
        }
        return true;
    }

    WeylSeries operator+(const WeylSeries& o) const {
        check_compatible(o);
        WeylSeries r = *this;
        r.max_weight_ = std::min(max_weight_, o.max_weight_);
        r.set_max_weight(r.max_weight_);
        for (const auto& [m, c] : o.terms_) r.add_term(m, c);
        return r;
    }
    WeylSeries operator-(const WeylSeries& o) const {
        check_compatible(o);
        WeylSeries r = *this;
        r.max_weight_ = std::min(max_weight_, o.max_weight_);
        r.set_max_weight(r.max_weight_);
        for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
        return r;
    }
    WeylSeries operator-() const { return scaled(Coeff(-1L)); }

    WeylSeries scaled(const Coeff& s) const {
        WeylSeries r = like(*this);
        if (s.is_zero()) return r;
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, c * s);
        return r;
    }

    /// Plain commutative polynomial product, truncated at min(max_weights).
    WeylSeries operator*(const WeylSeries& o) const {
        check_compatible(o);
        WeylSeries r(n_, chart_, std::min(max_weight_, o.max_weight_), conv_);
        for (const auto& [ma, ca] : terms_) {
            int wa = ma.weight();
            for (const auto& [mb, cb] : o.terms_) {
                if (wa + mb.weight() > r.max_weight_) continue;
                Monomial m;
                for (std::size_t k = 0; k < m.e.size(); ++k)
                    m.e[k] = static_cast<std::uint8_t>(ma.e[k] + mb.e[k]);
                m.h = static_cast<std::uint8_t>(ma.h + mb.h);
                r.add_term(m, ca * cb);
            }
        }
        return r;
    }

    /// d/d(first_j) or d/d(second_j) depending on `second`.
    WeylSeries derivative(int j, bool second) const {
        WeylSeries r = like(*this);
        for (const auto& [m, c] : terms_) {
            int p = second ? m.second(j) : m.first(j);
            if (p == 0) continue;
            Monomial d = m;
            if (second)
                d.set_second(j, p - 1);
            else
                d.set_first(j, p - 1);
            r.terms_.emplace(d, c * Coeff(Rational(p)));
        }
        return r;
    }

    WeylSeries mul_hbar(int p = 1) const {
        WeylSeries r = like(*this);
        for (const auto& [m, c] : terms_) {
            Monomial d = m;
            d.h = static_cast<std::uint8_t>(d.h + p);
            if (d.weight() <= max_weight_) r.terms_.emplace(d, c);
        }
        return r;
    }

    /// Exact division by hbar; every term must carry hbar.
    WeylSeries div_hbar() const {
        WeylSeries r = like(*this);
        for (const auto& [m, c] : terms_) {
            if (m.h == 0) throw std::domain_error("series not divisible by hbar");
            Monomial d = m;
            d.h -= 1;
            r.terms_.emplace(d, c);
        }
        return r;
    }

    /// Drop all terms with positive hbar exponent (classical limit).
    WeylSeries classical() const {
        WeylSeries r = like(*this);
        for (const auto& [m, c] : terms_)
            if (m.h == 0) r.terms_.emplace(m, c);
        return r;
    }

    friend bool operator==(const WeylSeries& x, const WeylSeries& y) {
        return x.n_ == y.n_ && x.chart_ == y.chart_ && x.terms_ == y.terms_;
    }

    static WeylSeries like(const WeylSeries& s) {
        return WeylSeries(s.n_, s.chart_, s.max_weight_, s.conv_);
    }

    static WeylSeries constant(int n, Chart chart, int W, const Coeff& c,
                               Convention conv = Convention::Birkhoff) {
        WeylSeries r(n, chart, W, conv);
        r.add_term(Monomial::unit(), c);
        return r;
    }

    void check_compatible(const WeylSeries& o) const {
        if (n_ != o.n_) throw std::invalid_argument("dimension mismatch");
        if (chart_ != o.chart_) throw std::invalid_argument("chart mismatch");
        if (chart_ == Chart::Complex && conv_ != o.conv_)
            throw std::invalid_argument("z-convention mismatch");
    }

private:
    int n_ = 1;
    Chart chart_ = Chart::Real;
    Convention conv_ = Convention::Birkhoff;
    int max_weight_ = 0;
    TermMap terms_;
};

/// Harmonic oscillator sum_j nu_j (x_j^2 + xi_j^2)/2 in the real chart.
inline WeylSeries harmonic_oscillator(const std::vector<Rational>& nu, int W) {
    WeylSeries h(static_cast<int>(nu.size()), Chart::Real, W);
    for (std::size_t j = 0; j < nu.size(); ++j) {
        Coeff half(GaussianRational(nu[j] / 2));
        h.add_term(Monomial::var_first(static_cast<int>(j), 2), half);
        h.add_term(Monomial::var_second(static_cast<int>(j), 2), half);
    }
    return h;
}

}  // namespace qbnf
