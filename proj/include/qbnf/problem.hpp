#pragma once

#include "qbnf/birkhoff.hpp"
#include "qbnf/serialize.hpp"
#include "qbnf/spectra.hpp"

#include <string>
#include <vector>

namespace qbnf {

/// Parsed and validated problem description: a real Hamiltonian series whose
/// quadratic part is an elliptic diagonal oscillator, plus pipeline knobs.
struct ProblemFile {
    std::string name;
    WeylSeries hamiltonian{1, Chart::Real, 2};
    WeylSeries H2{1, Chart::Real, 2};
    WeylSeries L{1, Chart::Real, 2};  // perturbation, in O_3
    std::vector<Rational> nu;
    ResonanceData resonance;
    int weight = 8;
    std::vector<double> hbar;
    long N_lo = 0, N_hi = 0;
    unsigned seed = 1;
};

inline ProblemFile parse_problem(const json& j) {
    ProblemFile pf;
    pf.name = j.value("name", "unnamed");
    if (!j.contains("hamiltonian")) throw std::invalid_argument("problem: missing 'hamiltonian'");
    pf.hamiltonian = series_from_json(j.at("hamiltonian"));
    if (pf.hamiltonian.chart() != Chart::Real)
        throw std::invalid_argument("problem: hamiltonian must be in the real chart");
    if (!pf.hamiltonian.is_real())
        throw std::invalid_argument("problem: hamiltonian must have real coefficients");

    pf.weight = j.value("weight", 8);
    if (pf.weight < 2 || pf.weight > 16)
        throw std::invalid_argument("problem: weight out of range [2,16]");
    if (j.contains("hbar"))
        for (const auto& v : j.at("hbar")) {
            double h = v.get<double>();
            if (!(h > 0)) throw std::invalid_argument("problem: hbar values must be positive");
            pf.hbar.push_back(h);
        }
    if (j.contains("N_range")) {
        pf.N_lo = j.at("N_range").at(0).get<long>();
        pf.N_hi = j.at("N_range").at(1).get<long>();
        if (pf.N_lo < 0 || pf.N_hi < pf.N_lo)
            throw std::invalid_argument("problem: invalid N_range");
    }
    pf.seed = j.value("seed", 1u);

    // split off the quadratic part and validate ellipticity
    WeylSeries lifted = pf.hamiltonian;
    lifted.set_max_weight(std::max(pf.weight, pf.hamiltonian.max_weight()));
    pf.H2 = lifted.homogeneous_part(2);
    validate_elliptic_diagonal(pf.H2, pf.nu);
    pf.L = lifted - pf.H2;
    if (!pf.L.terms().empty() && pf.L.min_weight() < 3)
        throw std::invalid_argument("problem: perturbation must be in O_3");
    pf.resonance = analyze_resonance(pf.nu, 12);
    return pf;
}

inline ProblemFile load_problem(const std::string& path) {
    return parse_problem(read_json_file(path));
}

inline json to_json(const NormalFormResult& r) {
    json j;
    j["H2"] = to_json(r.H2);
    json nus = json::array();
    for (const auto& f : r.nu) nus.push_back(to_string(f));
    j["nu"] = std::move(nus);
    j["weight"] = r.W;
    json A = json::array(), K = json::array();
    for (const auto& s : r.A) A.push_back(to_json(s));
    for (const auto& s : r.K) K.push_back(to_json(s));
    j["A"] = std::move(A);
    j["K"] = std::move(K);
    return j;
}

/// Model eigenvalue polynomial f(u; hbar): the unique polynomial with
/// f(hbar(gamma + 1/2); hbar) equal to the diagonal of the operator on the
/// oscillator basis. Each diagonal Wick term c hbar^l z^a (hbar d)^a expands
/// into prod_j prod_{t<a_j} (u_j - (t+1/2) hbar). Throws when the series has
/// off-diagonal (non action-representable) terms.
inline ActionPolynomial action_polynomial(const WeylSeries& total) {
    WickOperator op = weyl_to_wick(to_complex_chart(total, Convention::Bargmann));
    ActionPolynomial f;
    f.n = op.n;
    std::map<std::pair<std::vector<int>, int>, double> acc;
    for (const auto& [m, co] : op.terms) {
        for (int j = 0; j < f.n; ++j)
            if (m.first(j) != m.second(j))
                throw std::invalid_argument("symbol is not a function of the actions");
        std::complex<double> v = co.to_complex();
        if (std::abs(v.imag()) > 1e-14 * (1 + std::abs(v.real())))
            throw std::invalid_argument("action polynomial must be real");
        std::map<std::pair<std::vector<int>, int>, double> poly{
            {{std::vector<int>(static_cast<std::size_t>(f.n), 0), m.h}, v.real()}};
        for (int j = 0; j < f.n; ++j) {
            for (int t = 0; t < m.first(j); ++t) {
                std::map<std::pair<std::vector<int>, int>, double> next;
                for (const auto& [key, c] : poly) {
                    auto up = key;
                    ++up.first[static_cast<std::size_t>(j)];
                    next[up] += c;
                    auto hp = key;
                    ++hp.second;
                    next[hp] -= c * (t + 0.5);
                }
                poly = std::move(next);
            }
        }
        for (const auto& [key, c] : poly) acc[key] += c;
    }
    for (const auto& [key, c] : acc)
        if (c != 0) f.terms.push_back({key.first, key.second, c});
    return f;
}

}  // namespace qbnf
