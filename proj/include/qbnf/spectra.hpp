#pragma once

#include "qbnf/birkhoff.hpp"
#include "qbnf/chart.hpp"
#include "qbnf/fock.hpp"
#include "qbnf/polytope.hpp"
#include "qbnf/resonance.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace qbnf {

/// Classical (hbar = 0) part of a real-chart series evaluated at a phase point.
inline double eval_classical(const WeylSeries& s, const std::vector<double>& x,
                             const std::vector<double>& xi) {
    double r = 0;
    for (const auto& [m, c] : s.terms()) {
        if (m.h != 0) continue;
        double t = c.to_complex().real();
        for (int j = 0; j < s.dim(); ++j) {
            for (int k = 0; k < m.first(j); ++k) t *= x[static_cast<std::size_t>(j)];
            for (int k = 0; k < m.second(j); ++k) t *= xi[static_cast<std::size_t>(j)];
        }
        r += t;
    }
    return r;
}

inline double spectral_norm(const HermitianMatrix& M) {
    if (M.rows() == 0) return 0;
    std::vector<double> ev = hermitian_eigenvalues(M);
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

/// Sum of eps^w * (matrix of the weight-w part at parameter h): the rescaled
/// operator K(eps, h) acting on the level space, with hbar = eps^2 h.
inline HermitianMatrix rescaled_matrix(const WickOperator& op, const FockBasis& basis, double h,
                                       double eps) {
    std::map<int, WickOperator> by_weight;
    for (const auto& [m, c] : op.terms) {
        WickOperator& part = by_weight[m.weight()];
        part.n = op.n;
        part.terms.emplace(m, c);
    }
    HermitianMatrix M = HermitianMatrix::Zero(basis.dim(), basis.dim());
    for (const auto& [w, part] : by_weight)
        M += std::pow(eps, w) * matrix_of_wick(part, basis, h);
    return M;
}

struct ClusterSpectrum {
    std::vector<long> p;
    double nu_c = 1;
    double hbar = 0;
    long N = 0;
    double E = 0;        // hbar * nu_c * (|p|/2 + N)
    double epsilon = 0;  // sqrt(E)
    double h = 0;        // hbar / E
    std::vector<double> lambdas;
    int m = 0;  // multiplicity = dim of the level space
};

/// Eigenvalues of the restriction of K to the level space <p, alpha> = N,
/// built directly from the hbar-ladder matrices.
inline ClusterSpectrum cluster_spectrum(const WeylSeries& K, const std::vector<long>& p,
                                        double nu_c, double hbar, long N) {
    ClusterSpectrum out;
    out.p = p;
    out.nu_c = nu_c;
    out.hbar = hbar;
    out.N = N;
    long psum = 0;
    for (long x : p) psum += x;
    out.E = hbar * nu_c * (static_cast<double>(psum) / 2 + static_cast<double>(N));
    out.epsilon = std::sqrt(out.E);
    out.h = hbar / out.E;
    FockBasis basis = FockBasis::enumerate(p, N);
    out.m = basis.dim();
    WickOperator op = weyl_to_wick(to_complex_chart(K, Convention::Bargmann));
    out.lambdas = hermitian_eigenvalues(matrix_of_wick(op, basis, hbar));
    return out;
}

struct ClusterAssignment {
    std::map<long, std::vector<double>> groups;  // N -> eigenvalues in the window
    std::vector<double> unassigned;              // failure signal when nonempty
    std::map<long, double> centers;              // N -> E_N
};

/// Assign each eigenvalue <= Emax to the window [E_N - nu_c hbar/3,
/// E_N + nu_c hbar/3] it falls into; windows never overlap because level
/// spacing is at least nu_c hbar.
inline ClusterAssignment assign_clusters(const std::vector<double>& spectrum,
                                         const std::vector<long>& p, double nu_c, double hbar,
                                         double Emax) {
    ClusterAssignment out;
    long psum = 0;
    for (long x : p) psum += x;
    const double width = nu_c * hbar / 3;
    for (long N = 0;; ++N) {
        double center = hbar * nu_c * (static_cast<double>(psum) / 2 + static_cast<double>(N));
        if (center - width > Emax) break;
        if (FockBasis::enumerate(p, N).dim() == 0) continue;
        out.centers[N] = center;
        out.groups[N] = {};
    }
    for (double ev : spectrum) {
        if (ev > Emax) continue;
        bool placed = false;
        for (auto& [N, group] : out.groups) {
            if (std::abs(ev - out.centers[N]) <= width) {
                group.push_back(ev);
                placed = true;
                break;
            }
        }
        if (!placed) out.unassigned.push_back(ev);
    }
    return out;
}

struct PhasePoint {
    std::vector<double> x, xi;
};

struct LiouvilleSample {
    std::vector<PhasePoint> points;
    std::vector<double> weights;  // sum to the total mu_E mass
};

/// Exact S_alpha(1) = prod Gamma(alpha_i+1) / (prod nu_i^{alpha_i+1}
/// Gamma(|alpha|+n)) with nu_i = nu_c p_i.
inline Rational liouville_s1(const std::vector<int>& alpha, const std::vector<long>& p,
                             const Rational& nu_c) {
    const std::size_t n = p.size();
    Rational num(1), den(1);
    int asum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 2; k <= alpha[i]; ++k) num *= k;
        Rational nui = nu_c * Rational(p[i]);
        for (int k = 0; k <= alpha[i]; ++k) den *= nui;
        asum += alpha[i];
    }
    for (int k = 2; k <= asum + static_cast<int>(n) - 1; ++k) den *= k;
    Rational r = num / den;
    r.canonicalize();
    return r;
}

/// Integral of I^alpha over {H2 = E} against the Liouville measure mu_E,
/// normalized so that mu = 2 pi mu_E (x) |dE|; carries the (2 pi)^{n-1}
/// angle volume calibrated by the dimension-vs-volume density identity.
inline double liouville_monomial_integral(const std::vector<int>& alpha,
                                          const std::vector<long>& p, double nu_c, double E) {
    const int n = static_cast<int>(p.size());
    int asum = 0;
    for (int a : alpha) asum += a;
    Rational s1 = liouville_s1(alpha, p, Rational(1));
    double scale = std::pow(nu_c, -(asum + n)) * s1.get_d();
    return std::pow(2 * std::numbers::pi, n - 1) * std::pow(E, asum + n - 1) * scale;
}

/// Seeded sampler of {H2 = E} w.r.t. mu_E: actions uniform on the simplex
/// {<nu, I> = E} against dI_2...dI_n, angles uniform on the torus.
inline LiouvilleSample liouville_sample(const std::vector<long>& p, double nu_c, double E,
                                        int count, unsigned seed) {
    if (count < 1) throw std::invalid_argument("count must be positive");
    const std::size_t n = p.size();
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(0, 1);
    LiouvilleSample out;
    double mass = liouville_monomial_integral(std::vector<int>(n, 0), p, nu_c, E);
    std::vector<double> nu(n);
    for (std::size_t j = 0; j < n; ++j) nu[j] = nu_c * static_cast<double>(p[j]);
    while (static_cast<int>(out.points.size()) < count) {
        std::vector<double> I(n, 0);
        double rest = 0;
        for (std::size_t j = 1; j < n; ++j) {
            I[j] = unif(rng) * E / nu[j];
            rest += nu[j] * I[j];
        }
        if (rest > E) continue;  // rejection keeps dI_2..dI_n uniform
        I[0] = (E - rest) / nu[0];
        PhasePoint pt;
        pt.x.resize(n);
        pt.xi.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            double th = 2 * std::numbers::pi * unif(rng);
            pt.x[j] = std::sqrt(2 * I[j]) * std::cos(th);
            pt.xi[j] = -std::sqrt(2 * I[j]) * std::sin(th);
        }
        out.points.push_back(std::move(pt));
    }
    out.weights.assign(static_cast<std::size_t>(count), mass / count);
    return out;
}

struct SymbolExtrema {
    double min = 0, max = 0;
    int starts = 0;
};

namespace detail {

inline double h2_value(const std::vector<long>& p, double nu_c, const PhasePoint& pt) {
    double v = 0;
    for (std::size_t j = 0; j < p.size(); ++j)
        v += nu_c * static_cast<double>(p[j]) / 2 * (pt.x[j] * pt.x[j] + pt.xi[j] * pt.xi[j]);
    return v;
}

inline void project_to_sphere(const std::vector<long>& p, double nu_c, double E, PhasePoint& pt) {
    double v = h2_value(p, nu_c, pt);
    double s = std::sqrt(E / v);
    for (auto& c : pt.x) c *= s;
    for (auto& c : pt.xi) c *= s;
}

}  // namespace detail

/// Signed extrema of the classical symbol k0 on {H2 = E}: multi-start
/// projected-gradient ascent/descent from Liouville-random starts. Heuristic;
/// no certified global optimum is claimed.
inline SymbolExtrema symbol_extrema(const WeylSeries& k0, const std::vector<long>& p, double nu_c,
                                    double E, int n_starts, int iters, unsigned seed = 7) {
    const int n = static_cast<int>(p.size());
    std::vector<WeylSeries> gx, gxi;
    for (int j = 0; j < n; ++j) {
        gx.push_back(k0.derivative(j, false));
        gxi.push_back(k0.derivative(j, true));
    }
    auto grad = [&](const PhasePoint& pt, PhasePoint& g) {
        for (int j = 0; j < n; ++j) {
            g.x[static_cast<std::size_t>(j)] = eval_classical(gx[static_cast<std::size_t>(j)], pt.x, pt.xi);
            g.xi[static_cast<std::size_t>(j)] = eval_classical(gxi[static_cast<std::size_t>(j)], pt.x, pt.xi);
        }
    };
    LiouvilleSample starts = liouville_sample(p, nu_c, E, n_starts, seed);
    SymbolExtrema out;
    out.starts = n_starts;
    bool first = true;
    for (int dir : {+1, -1}) {
        for (const PhasePoint& s0 : starts.points) {
            PhasePoint pt = s0, g{std::vector<double>(static_cast<std::size_t>(n)),
                                  std::vector<double>(static_cast<std::size_t>(n))};
            double val = eval_classical(k0, pt.x, pt.xi);
            double step = 0.5 * std::sqrt(E);
            for (int it = 0; it < iters && step > 1e-14; ++it) {
                grad(pt, g);
                // project out the normal direction grad(H2) = nu .* (x, xi)
                double gn = 0, nn = 0;
                for (int j = 0; j < n; ++j) {
                    double nj = nu_c * static_cast<double>(p[static_cast<std::size_t>(j)]);
                    gn += g.x[static_cast<std::size_t>(j)] * nj * pt.x[static_cast<std::size_t>(j)] +
                          g.xi[static_cast<std::size_t>(j)] * nj * pt.xi[static_cast<std::size_t>(j)];
                    nn += nj * nj *
                          (pt.x[static_cast<std::size_t>(j)] * pt.x[static_cast<std::size_t>(j)] +
                           pt.xi[static_cast<std::size_t>(j)] * pt.xi[static_cast<std::size_t>(j)]);
                }
                PhasePoint cand = pt;
                for (int j = 0; j < n; ++j) {
                    double nj = nu_c * static_cast<double>(p[static_cast<std::size_t>(j)]);
                    double tx = g.x[static_cast<std::size_t>(j)] - gn / nn * nj * pt.x[static_cast<std::size_t>(j)];
                    double txi = g.xi[static_cast<std::size_t>(j)] - gn / nn * nj * pt.xi[static_cast<std::size_t>(j)];
                    cand.x[static_cast<std::size_t>(j)] += dir * step * tx;
                    cand.xi[static_cast<std::size_t>(j)] += dir * step * txi;
                }
                detail::project_to_sphere(p, nu_c, E, cand);
                double cval = eval_classical(k0, cand.x, cand.xi);
                if (dir * (cval - val) > 0) {
                    pt = cand;
                    val = cval;
                    step *= 1.2;
                } else {
                    step *= 0.5;
                }
            }
            if (first) {
                out.min = out.max = val;
                first = false;
            }
            out.min = std::min(out.min, val);
            out.max = std::max(out.max, val);
        }
    }
    return out;
}

struct DensityCheck {
    double lhs = 0, rhs = 0, relerr = 0;
};

/// theo-int1 style density comparison: sum of g(lambda'_i / E^{r/2}) against
/// (2 pi hbar)^{-(n-1)} * Monte-Carlo integral of g(k0 / E^{r/2}) d mu_E.
inline DensityCheck density_check(const ClusterSpectrum& cl, const WeylSeries& k0, int r,
                                  const std::function<double(double)>& g, int samples,
                                  unsigned seed) {
    const int n = static_cast<int>(cl.p.size());
    DensityCheck out;
    double scale = std::pow(cl.E, static_cast<double>(r) / 2);
    for (double ev : cl.lambdas) out.lhs += g(ev / scale);
    LiouvilleSample sm = liouville_sample(cl.p, cl.nu_c, cl.E, samples, seed);
    double integral = 0;
    for (std::size_t i = 0; i < sm.points.size(); ++i)
        integral += sm.weights[i] * g(eval_classical(k0, sm.points[i].x, sm.points[i].xi) / scale);
    out.rhs = std::pow(2 * std::numbers::pi * cl.hbar, -(n - 1)) * integral;
    out.relerr = std::abs(out.lhs - out.rhs) / std::max(1.0, std::abs(out.rhs));
    return out;
}

struct TraceFit {
    std::map<std::pair<std::pair<long, long>, int>, std::complex<double>> fitted;  // ((q,d), l)
    double residual_norm = 0;
    double condition = 0;
};

/// Least squares of trace(N) against the oscillatory basis zeta^{-N}
/// N^{n(zeta)-l}, l = 0..L. Throws on an ill-conditioned design.
inline TraceFit trace_fit(const std::map<long, double>& traces,
                          const std::vector<ZetaStratum>& strata, int L) {
    const int rows = static_cast<int>(traces.size());
    const int cols = static_cast<int>(strata.size()) * (L + 1);
    if (rows < 3 * cols) throw std::invalid_argument("not enough data points for the fit");
    Eigen::MatrixXcd A(rows, cols);
    Eigen::VectorXcd y(rows);
    int rr = 0;
    for (const auto& [N, v] : traces) {
        y(rr) = v;
        int c = 0;
        for (const auto& z : strata) {
            std::complex<double> zmn = detail::root_of_unity(z.q, z.d, -N);
            for (int l = 0; l <= L; ++l)
                A(rr, c++) = zmn * std::pow(static_cast<double>(N), z.n_zeta - l);
        }
        ++rr;
    }
    Eigen::VectorXd colnorm(cols);
    for (int j = 0; j < cols; ++j) {
        colnorm(j) = A.col(j).norm();
        if (colnorm(j) == 0) colnorm(j) = 1;
        A.col(j) /= colnorm(j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    TraceFit out;
    out.condition = svd.singularValues()(0) / svd.singularValues()(cols - 1);
    if (!(out.condition < 1e12)) throw std::runtime_error("ill-conditioned trace fit");
    Eigen::VectorXcd coef = svd.solve(y);
    out.residual_norm = (y - A * coef).norm();
    for (int j = 0; j < cols; ++j) coef(j) /= colnorm(j);
    int c = 0;
    for (const auto& z : strata)
        for (int l = 0; l <= L; ++l) out.fitted[{{z.q, z.d}, l}] = coef(c++);
    return out;
}

/// Polynomial f(u_1..u_n; hbar) in the action variables, for Weyl counting of
/// the model spectrum f(hbar(1/2 + alpha); hbar).
struct ActionPolynomial {
    struct Term {
        std::vector<int> upow;
        int hpow = 0;
        double c = 0;
    };
    int n = 1;
    std::vector<Term> terms;

    double eval(const std::vector<double>& u, double hbar) const {
        double r = 0;
        for (const auto& t : terms) {
            double v = t.c * std::pow(hbar, t.hpow);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < t.upow[static_cast<std::size_t>(j)]; ++k)
                    v *= u[static_cast<std::size_t>(j)];
            r += v;
        }
        return r;
    }

    std::vector<double> linear_part() const {
        std::vector<double> nu(static_cast<std::size_t>(n), 0);
        for (const auto& t : terms) {
            if (t.hpow != 0) continue;
            int deg = 0, var = -1;
            for (int j = 0; j < n; ++j) {
                deg += t.upow[static_cast<std::size_t>(j)];
                if (t.upow[static_cast<std::size_t>(j)] == 1) var = j;
            }
            if (deg == 1) nu[static_cast<std::size_t>(var)] += t.c;
        }
        return nu;
    }

    bool is_linear() const {
        for (const auto& t : terms) {
            int deg = 0;
            for (int j = 0; j < n; ++j) deg += t.upow[static_cast<std::size_t>(j)];
            if (deg > 1 || t.hpow > 0) return false;
        }
        return true;
    }
};

struct WeylCount {
    long count = 0;
    double volume = 0;
    double relerr = 0;
};

/// Lattice count #{alpha : f(hbar(1/2+alpha); hbar) <= E} against the phase
/// space volume hbar^{-n} Vol{f <= E}. f must be increasing in each action
/// near the origin (positive linear part).
inline WeylCount weyl_count(const ActionPolynomial& f, double hbar, double E,
                            long max_states = 50'000'000) {
    const int n = f.n;
    std::vector<double> nu = f.linear_part();
    for (double v : nu)
        if (!(v > 0)) throw std::invalid_argument("linear part must be positive");

    // first crossing of f = E along a line u = base + t e_j, used both for the
    // enumeration trust box and for the volume quadrature. The model f is only
    // trusted on its monotone branch near the origin; failure to bracket the
    // crossing means E left that region.
    auto line_root = [&](std::vector<double> base, int j) {
        auto eval1 = [&](double v) {
            base[static_cast<std::size_t>(j)] = v;
            return f.eval(base, hbar);
        };
        if (eval1(0) > E) return 0.0;
        double hi = E / nu[static_cast<std::size_t>(j)];
        for (int guard = 0; eval1(hi) < E; ++guard) {
            if (guard > 80) throw std::runtime_error("enumeration bound exceeded");
            hi *= 1.25;
        }
        double lo = 0;
        for (int it = 0; it < 200; ++it) {
            double mid = (lo + hi) / 2;
            (eval1(mid) <= E ? lo : hi) = mid;
        }
        return (lo + hi) / 2;
    };

    std::vector<double> axis(static_cast<std::size_t>(n)), box(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        axis[static_cast<std::size_t>(j)] = line_root(std::vector<double>(static_cast<std::size_t>(n), 0.0), j);
        box[static_cast<std::size_t>(j)] = 1.5 * axis[static_cast<std::size_t>(j)] + hbar;
    }

    WeylCount out;
    {
        long count = 0, visited = 0;
        bool edge = false;
        std::vector<double> u(static_cast<std::size_t>(n), 0);
        auto rec = [&](auto&& self, int j) -> void {
            if (j == n) {
                ++visited;
                if (visited > max_states) throw std::runtime_error("enumeration bound exceeded");
                if (f.eval(u, hbar) <= E) {
                    ++count;
                    for (int i = 0; i < n; ++i)
                        if (u[static_cast<std::size_t>(i)] > box[static_cast<std::size_t>(i)] - 1.1 * hbar)
                            edge = true;
                }
                return;
            }
            for (long a = 0;; ++a) {
                double uj = hbar * (0.5 + static_cast<double>(a));
                if (uj > box[static_cast<std::size_t>(j)]) break;
                u[static_cast<std::size_t>(j)] = uj;
                self(self, j + 1);
            }
        };
        rec(rec, 0);
        // a counted point hugging the trust box means the sub-level set was
        // not contained in the monotone region
        if (edge) throw std::runtime_error("enumeration bound exceeded");
        out.count = count;
    }

    if (f.is_linear()) {
        double prod = 1;
        for (double v : nu) prod *= v;
        double fact = 1;
        for (int k = 2; k <= n; ++k) fact *= k;
        out.volume = std::pow(E, n) / (fact * prod) * std::pow(hbar, -n);
    } else if (n == 1) {
        out.volume = axis[0] / hbar;
    } else if (n == 2) {
        const int steps = 4000;  // Simpson rule over u1, exact root in u2
        double u1max = axis[0], acc = 0;
        for (int k = 0; k <= steps; ++k) {
            double u1 = u1max * k / steps;
            double w = (k == 0 || k == steps) ? 1 : (k % 2 ? 4 : 2);
            acc += w * line_root({u1, 0.0}, 1);
        }
        out.volume = acc * (u1max / steps) / 3 * std::pow(hbar, -2);
    } else {
        throw std::invalid_argument("nonlinear volume quadrature supports n <= 2");
    }
    out.relerr = std::abs(static_cast<double>(out.count) - out.volume) / std::max(1.0, out.volume);
    return out;
}

struct LowLying {
    double h = 0;  // level-space semiclassical parameter 1/(nu_c(|p|/2 + N))
    std::vector<double> eps;
    std::vector<std::vector<double>> branches;  // [branch][eps index]
    std::vector<std::vector<double>> coeffs;    // [branch][k]: coefficient of eps^{2+k}
    std::vector<std::vector<double>> mu;        // [branch][m]: hbar^{(3+m)/2} coefficients
    std::vector<double> fit_residual;
    bool collision = false;
};

/// Eigenvalue branches of sum_w eps^w K_w(h) on the level space <p, alpha> = N,
/// followed by nearest-continuation matching in eps and a polynomial fit in
/// eps. The input symbol must contain the quadratic part, so that the eps^2
/// coefficient of every branch is the level energy in rescaled units.
inline LowLying low_lying(const WeylSeries& total, const std::vector<long>& p, double nu_c, long N,
                          const std::vector<double>& eps_list, int orders) {
    LowLying out;
    long psum = 0;
    for (long x : p) psum += x;
    out.h = 1.0 / (nu_c * (static_cast<double>(psum) / 2 + static_cast<double>(N)));
    out.eps = eps_list;
    std::sort(out.eps.begin(), out.eps.end());
    FockBasis basis = FockBasis::enumerate(p, N);
    WickOperator op = weyl_to_wick(to_complex_chart(total, Convention::Bargmann));

    const int m = basis.dim();
    const int ne = static_cast<int>(out.eps.size());
    out.branches.assign(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(ne), 0));
    for (int e = 0; e < ne; ++e) {
        std::vector<double> ev =
            hermitian_eigenvalues(rescaled_matrix(op, basis, out.h, out.eps[static_cast<std::size_t>(e)]));
        if (e == 0) {
            for (int b = 0; b < m; ++b)
                out.branches[static_cast<std::size_t>(b)][0] = ev[static_cast<std::size_t>(b)];
            continue;
        }
        // continue each branch to the nearest unused eigenvalue
        std::vector<bool> used(static_cast<std::size_t>(m), false);
        for (int b = 0; b < m; ++b) {
            auto& br = out.branches[static_cast<std::size_t>(b)];
            double pred = e >= 2 ? 2 * br[static_cast<std::size_t>(e - 1)] - br[static_cast<std::size_t>(e - 2)]
                                 : br[static_cast<std::size_t>(e - 1)];
            int best = -1;
            for (int i = 0; i < m; ++i) {
                if (used[static_cast<std::size_t>(i)]) continue;
                if (best < 0 || std::abs(ev[static_cast<std::size_t>(i)] - pred) <
                                    std::abs(ev[static_cast<std::size_t>(best)] - pred)) {
                    best = i;
                }
            }
            // a skipped-over closer match means two branches competed
            for (int i = 0; i < m; ++i)
                if (used[static_cast<std::size_t>(i)] &&
                    std::abs(ev[static_cast<std::size_t>(i)] - pred) <
                        std::abs(ev[static_cast<std::size_t>(best)] - pred))
                    out.collision = true;
            used[static_cast<std::size_t>(best)] = true;
            br[static_cast<std::size_t>(e)] = ev[static_cast<std::size_t>(best)];
        }
    }

    const int cols = std::min(orders + 2, ne);  // eps^2 .. eps^{1+cols}
    Eigen::MatrixXd A(ne, cols);
    for (int r = 0; r < ne; ++r)
        for (int c = 0; c < cols; ++c) A(r, c) = std::pow(out.eps[static_cast<std::size_t>(r)], 2 + c);
    Eigen::VectorXd colnorm(cols);
    for (int j = 0; j < cols; ++j) {
        colnorm(j) = A.col(j).norm();
        A.col(j) /= colnorm(j);
    }
    auto svd = A.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV);
    for (int b = 0; b < m; ++b) {
        Eigen::VectorXd y(ne);
        for (int r = 0; r < ne; ++r) y(r) = out.branches[static_cast<std::size_t>(b)][static_cast<std::size_t>(r)];
        Eigen::VectorXd coef = svd.solve(y);
        out.fit_residual.push_back((y - A * coef).norm());
        for (int j = 0; j < cols; ++j) coef(j) /= colnorm(j);
        std::vector<double> cs(coef.data(), coef.data() + cols);
        out.coeffs.push_back(cs);
        std::vector<double> mus;
        for (int k = 1; k < cols; ++k)  // eps^{2+k} = eps^{3+m}, m = k-1
            mus.push_back(cs[static_cast<std::size_t>(k)] * std::pow(out.h, -(3.0 + (k - 1)) / 2));
        out.mu.push_back(std::move(mus));
    }
    return out;
}

/// Measured operator norm of the rescaled restriction, for the eps^l h^m
/// norm-envelope law.
inline double measured_norm(const WeylSeries& K, const std::vector<long>& p, double nu_c, long N,
                            double eps) {
    long psum = 0;
    for (long x : p) psum += x;
    double h = 1.0 / (nu_c * (static_cast<double>(psum) / 2 + static_cast<double>(N)));
    FockBasis basis = FockBasis::enumerate(p, N);
    WickOperator op = weyl_to_wick(to_complex_chart(K, Convention::Bargmann));
    return spectral_norm(rescaled_matrix(op, basis, h, eps));
}

}  // namespace qbnf
