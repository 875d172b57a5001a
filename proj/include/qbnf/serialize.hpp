#pragma once

#include "qbnf/resonance.hpp"
#include "qbnf/series.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace qbnf {

using json = nlohmann::json;

inline json to_json(const WeylSeries& s) {
    json j;
    j["n"] = s.dim();
    j["chart"] = s.chart() == Chart::Real ? "real" : "complex";
    j["convention"] = s.convention() == Convention::Birkhoff ? "birkhoff" : "bargmann";
    j["max_weight"] = s.max_weight();
    const char* k1 = s.chart() == Chart::Real ? "x" : "z";
    const char* k2 = s.chart() == Chart::Real ? "xi" : "zbar";
    json terms = json::array();
    for (const auto& [m, c] : s.terms()) {
        json t;
        std::vector<int> a, b;
        for (int i = 0; i < s.dim(); ++i) {
            a.push_back(m.first(i));
            b.push_back(m.second(i));
        }
        t[k1] = a;
        t[k2] = b;
        t["h"] = static_cast<int>(m.h);
        t["re"] = to_string(c.a.re);
        t["im"] = to_string(c.a.im);
        if (!c.b.is_zero()) {  // sqrt(2) part, only present when nonzero
            t["re_sqrt2"] = to_string(c.b.re);
            t["im_sqrt2"] = to_string(c.b.im);
        }
        terms.push_back(std::move(t));
    }
    j["terms"] = std::move(terms);
    return j;
}

inline WeylSeries series_from_json(const json& j) {
    const int n = j.at("n").get<int>();
    const Chart chart = j.at("chart").get<std::string>() == "real" ? Chart::Real : Chart::Complex;
    Convention conv = Convention::Birkhoff;
    if (j.contains("convention") && j["convention"].get<std::string>() == "bargmann")
        conv = Convention::Bargmann;
    WeylSeries s(n, chart, j.at("max_weight").get<int>(), conv);
    const char* k1 = chart == Chart::Real ? "x" : "z";
    const char* k2 = chart == Chart::Real ? "xi" : "zbar";
    for (const auto& t : j.at("terms")) {
        Monomial m;
        const auto& a = t.at(k1);
        const auto& b = t.at(k2);
        if (static_cast<int>(a.size()) != n || static_cast<int>(b.size()) != n)
            throw std::invalid_argument("exponent vector length != n");
        for (int i = 0; i < n; ++i) {
            m.set_first(i, a[i].get<int>());
            m.set_second(i, b[i].get<int>());
        }
        m.h = static_cast<std::uint8_t>(t.at("h").get<int>());
        Coeff c{GaussianRational(rational_from_string(t.at("re").get<std::string>()),
                                 rational_from_string(t.at("im").get<std::string>()))};
        if (t.contains("re_sqrt2"))
            c.b = GaussianRational(rational_from_string(t["re_sqrt2"].get<std::string>()),
                                   rational_from_string(t["im_sqrt2"].get<std::string>()));
        s.add_term(m, c);
    }
    return s;
}

inline json to_json(const ZetaStratum& s) {
    json j;
    j["zeta"] = {s.q, s.d};  // e^{2 pi i q/d}
    json idx = json::array();
    for (int i : s.i_zeta) idx.push_back(i + 1);  // 1-based on the wire
    j["i_zeta"] = std::move(idx);
    j["n_zeta"] = s.n_zeta;
    j["m_zeta"] = s.m_zeta;
    return j;
}

inline json to_json(const ResonanceData& r) {
    json j;
    json nus = json::array();
    for (const auto& f : r.nu) nus.push_back(to_string(f));
    j["nu"] = std::move(nus);
    j["lattice_basis"] = r.lattice_basis;
    j["rank"] = r.rank;
    if (r.raw_order)
        j["raw_order"] = *r.raw_order;
    else
        j["raw_order"] = "exceeds bound";
    if (r.r_nu) j["r_nu"] = *r.r_nu;
    j["nu_c"] = to_string(r.complete.nu_c);
    j["p"] = r.complete.p;
    j["band_r"] = r.band_r;
    json strata = json::array();
    for (const auto& s : zeta_strata(r.complete.p)) strata.push_back(to_json(s));
    j["zeta_strata"] = std::move(strata);
    return j;
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return json::parse(in);
}

}  // namespace qbnf
