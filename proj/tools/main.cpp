#include "qbnf/problem.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

using namespace qbnf;

constexpr int kExitValidation = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitConditioning = 4;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);  // 17 significant digits
    return buf;
}

struct Table {
    std::vector<std::pair<std::string, std::string>> columns;  // name, description
    std::vector<std::vector<std::string>> rows;

    void write_csv(const std::filesystem::path& path, const json& inputs) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << columns[c].first << (c + 1 < columns.size() ? "," : "\n");
        for (const auto& row : rows)
            for (std::size_t c = 0; c < row.size(); ++c)
                out << row[c] << (c + 1 < row.size() ? "," : "\n");
        json manifest;
        manifest["table"] = path.filename().string();
        json cols = json::array();
        for (const auto& [name, desc] : columns) cols.push_back({{"name", name}, {"description", desc}});
        manifest["columns"] = std::move(cols);
        manifest["inputs"] = inputs;
        manifest["floats"] = "scientific, 17 significant digits";
        write_json_file(path.string() + ".manifest.json", manifest);
    }

    void write_json(const std::filesystem::path& path, const json& inputs) const {
        json j;
        j["inputs"] = inputs;
        json data = json::array();
        for (const auto& row : rows) {
            json r;
            for (std::size_t c = 0; c < row.size(); ++c) r[columns[c].first] = row[c];
            data.push_back(std::move(r));
        }
        j["rows"] = std::move(data);
        write_json_file(path.string(), j);
    }

    void write(const std::filesystem::path& dir, const std::string& stem,
               const std::string& format, const json& inputs) const {
        std::filesystem::create_directories(dir);
        if (format == "json")
            write_json(dir / (stem + ".json"), inputs);
        else
            write_csv(dir / (stem + ".csv"), inputs);
    }
};

struct CommonArgs {
    std::string input;
    int weight = 0;  // 0 = use the problem file's value
    std::vector<double> hbar;
    std::string N_range;
    unsigned seed = 0;
    std::string out = "out";
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonArgs& a, bool input_required = true) {
    auto* opt = cmd->add_option("--input", a.input, "problem file (JSON)");
    if (input_required) opt->required();
    cmd->add_option("--weight", a.weight, "normal form truncation weight override");
    cmd->add_option("--hbar", a.hbar, "semiclassical parameter list")->delimiter(',');
    cmd->add_option("--N-range", a.N_range, "level range a..b");
    cmd->add_option("--seed", a.seed, "random seed override");
    cmd->add_option("--out", a.out, "output directory");
    cmd->add_option("--format", a.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

std::pair<long, long> parse_range(const std::string& s) {
    auto pos = s.find("..");
    if (pos == std::string::npos) throw std::invalid_argument("N range must look like a..b");
    long a = std::stol(s.substr(0, pos)), b = std::stol(s.substr(pos + 2));
    if (a < 0 || b < a) throw std::invalid_argument("invalid N range");
    return {a, b};
}

/// Merge CLI overrides into the problem file parameters.
ProblemFile resolve(const CommonArgs& a) {
    ProblemFile pf = load_problem(a.input);
    if (a.weight) pf.weight = a.weight;
    if (!a.hbar.empty()) pf.hbar = a.hbar;
    if (!a.N_range.empty()) std::tie(pf.N_lo, pf.N_hi) = parse_range(a.N_range);
    if (a.seed) pf.seed = a.seed;
    if (pf.hbar.empty()) throw std::invalid_argument("no hbar values given");
    return pf;
}

NormalFormResult normalize(const ProblemFile& pf) {
    WeylSeries H2 = pf.H2, L = pf.L;
    H2.set_max_weight(pf.weight);
    L.set_max_weight(pf.weight);
    return birkhoff_normal_form(H2, L, pf.weight);
}

json problem_inputs(const ProblemFile& pf, const CommonArgs& a) {
    json j;
    j["problem"] = pf.name;
    j["input"] = a.input;
    j["weight"] = pf.weight;
    j["p"] = pf.resonance.complete.p;
    j["nu_c"] = to_string(pf.resonance.complete.nu_c);
    j["seed"] = pf.seed;
    return j;
}

int run_normal_form(const CommonArgs& a) {
    ProblemFile pf = load_problem(a.input);
    if (a.weight) pf.weight = a.weight;
    NormalFormResult nf = normalize(pf);

    // independent commutation check: [K + H2, H2] = 0 mod the truncation
    WeylSeries total = nf.H2 + nf.K_total();
    WeylSeries br = moyal_bracket(total, nf.H2, pf.weight);
    bool commutes = br.terms().empty();
    bool real = nf.K_total().is_real() && nf.A_total().is_real();

    json j;
    j["problem"] = pf.name;
    j["normal_form"] = to_json(nf);
    j["verification"] = {{"residual_in_O", pf.weight + 1},
                         {"commutes_with_H2", commutes},
                         {"real", real}};
    std::filesystem::create_directories(a.out);
    write_json_file((std::filesystem::path(a.out) / "normal_form.json").string(), j);
    if (!commutes || !real) {
        std::fprintf(stderr, "invariant violation: normal form failed verification\n");
        return kExitInvariant;
    }
    std::printf("normal_form: ok (weight %d, %zu rounds)\n", pf.weight, nf.K.size());
    return 0;
}

int run_cluster(const CommonArgs& a) {
    ProblemFile pf = resolve(a);
    NormalFormResult nf = normalize(pf);
    WeylSeries K = nf.K_total();
    const auto& p = pf.resonance.complete.p;
    double nu_c = pf.resonance.complete.nu_c.get_d();

    Table t;
    t.columns = {{"hbar", "semiclassical parameter"},
                 {"N", "level of the harmonic eigenspace"},
                 {"E", "level energy hbar nu_c (|p|/2 + N)"},
                 {"m", "cluster multiplicity"},
                 {"i", "index within the cluster, ascending"},
                 {"lambda", "cluster eigenvalue lambda'_i(E, hbar)"}};
    for (double hbar : pf.hbar)
        for (long N = pf.N_lo; N <= pf.N_hi; ++N) {
            ClusterSpectrum cl = cluster_spectrum(K, p, nu_c, hbar, N);
            for (int i = 0; i < cl.m; ++i)
                t.rows.push_back({fmt(hbar), std::to_string(N), fmt(cl.E), std::to_string(cl.m),
                                  std::to_string(i + 1), fmt(cl.lambdas[static_cast<std::size_t>(i)])});
        }
    t.write(a.out, "clusters", a.format, problem_inputs(pf, a));
    std::printf("cluster: %zu rows\n", t.rows.size());
    return 0;
}

int run_density(const CommonArgs& a, const std::string& gname, int samples) {
    ProblemFile pf = resolve(a);
    NormalFormResult nf = normalize(pf);
    WeylSeries K = nf.K_total();
    WeylSeries k0 = K.classical();
    const auto& p = pf.resonance.complete.p;
    double nu_c = pf.resonance.complete.nu_c.get_d();
    int r = pf.resonance.band_r;

    std::function<double(double)> g;
    if (gname == "one")
        g = [](double) { return 1.0; };
    else if (gname == "t")
        g = [](double t) { return t; };
    else if (gname == "t2")
        g = [](double t) { return t * t; };
    else if (gname == "gauss")
        g = [](double t) { return std::exp(-t * t); };
    else
        throw std::invalid_argument("unknown test function " + gname);

    Table t;
    t.columns = {{"hbar", "semiclassical parameter"},
                 {"N", "level"},
                 {"E", "level energy"},
                 {"lhs", "sum of g(lambda'_i / E^{r/2})"},
                 {"rhs", "(2 pi hbar)^{-(n-1)} integral of g(k0 / E^{r/2}) d mu_E"},
                 {"relerr", "|lhs - rhs| / max(1, |rhs|)"}};
    for (double hbar : pf.hbar)
        for (long N = pf.N_lo; N <= pf.N_hi; ++N) {
            ClusterSpectrum cl = cluster_spectrum(K, p, nu_c, hbar, N);
            DensityCheck dc = density_check(cl, k0, r, g, samples, pf.seed);
            t.rows.push_back({fmt(hbar), std::to_string(N), fmt(cl.E), fmt(dc.lhs), fmt(dc.rhs),
                              fmt(dc.relerr)});
        }
    t.write(a.out, "density", a.format, problem_inputs(pf, a));
    std::printf("density: %zu rows\n", t.rows.size());
    return 0;
}

int run_weyl(const CommonArgs& a) {
    ProblemFile pf = resolve(a);
    NormalFormResult nf = normalize(pf);
    ActionPolynomial f = action_polynomial(nf.H2 + nf.K_total());
    const auto& p = pf.resonance.complete.p;
    double nu_c = pf.resonance.complete.nu_c.get_d();
    long psum = 0;
    for (long x : p) psum += x;

    Table t;
    t.columns = {{"hbar", "semiclassical parameter"},
                 {"E", "energy cutoff"},
                 {"count", "lattice count of f(hbar(1/2+alpha); hbar) <= E"},
                 {"volume", "hbar^{-n} Vol{f <= E}"},
                 {"relerr", "|count - volume| / max(1, volume)"}};
    for (double hbar : pf.hbar)
        for (long N = pf.N_lo; N <= pf.N_hi; ++N) {
            double E = hbar * nu_c * (static_cast<double>(psum) / 2 + static_cast<double>(N));
            WeylCount wc = weyl_count(f, hbar, E);
            t.rows.push_back(
                {fmt(hbar), fmt(E), std::to_string(wc.count), fmt(wc.volume), fmt(wc.relerr)});
        }
    t.write(a.out, "weyl", a.format, problem_inputs(pf, a));
    std::printf("weyl: %zu rows\n", t.rows.size());
    return 0;
}

int run_lowlying(const CommonArgs& a, int orders) {
    ProblemFile pf = resolve(a);
    NormalFormResult nf = normalize(pf);
    WeylSeries total = nf.H2 + nf.K_total();
    const auto& p = pf.resonance.complete.p;
    double nu_c = pf.resonance.complete.nu_c.get_d();
    long psum = 0;
    for (long x : p) psum += x;

    Table t;
    t.columns = {{"N", "level"},
                 {"branch", "eigenvalue branch, ascending at the smallest eps"},
                 {"m", "expansion order: coefficient of hbar^{(3+m)/2}"},
                 {"mu", "fitted expansion coefficient mu_m"},
                 {"residual", "fit residual norm of the branch"},
                 {"collision", "1 when branch continuation was ambiguous"}};
    for (long N = pf.N_lo; N <= pf.N_hi; ++N) {
        std::vector<double> eps;
        for (double hbar : pf.hbar)
            eps.push_back(std::sqrt(hbar * nu_c * (static_cast<double>(psum) / 2 + static_cast<double>(N))));
        LowLying ll = low_lying(total, p, nu_c, N, eps, orders);
        for (std::size_t b = 0; b < ll.mu.size(); ++b)
            for (std::size_t m = 0; m < ll.mu[b].size(); ++m)
                t.rows.push_back({std::to_string(N), std::to_string(b + 1), std::to_string(m),
                                  fmt(ll.mu[b][m]), fmt(ll.fit_residual[b]),
                                  ll.collision ? "1" : "0"});
    }
    t.write(a.out, "lowlying", a.format, problem_inputs(pf, a));
    std::printf("lowlying: %zu rows\n", t.rows.size());
    return 0;
}

int run_polytope(const CommonArgs& a, std::vector<long>& p, std::vector<int>& alpha, int L) {
    if (p.empty()) {
        if (a.input.empty())
            throw std::invalid_argument("cmd_polytope needs --p or --input");
        ProblemFile pf = load_problem(a.input);
        p = pf.resonance.complete.p;
    }
    if (alpha.empty()) alpha.assign(p.size(), 0);
    if (alpha.size() != p.size()) throw std::invalid_argument("alpha and p dimension mismatch");
    long lo = 1, hi = 500;
    if (!a.N_range.empty()) std::tie(lo, hi) = parse_range(a.N_range);
    std::vector<long> Ns;
    for (long N = lo; N <= hi; ++N) Ns.push_back(N);

    PolytopeExpansion ex = fit_expansion(alpha, p, Ns, L);

    json inputs;
    inputs["p"] = p;
    inputs["alpha"] = alpha;
    inputs["N_range"] = {lo, hi};
    inputs["orders"] = L;

    Table counts;
    counts.columns = {{"N", "scaling parameter"},
                      {"exact_sum", "exact big-integer polytope sum"},
                      {"residual", "|data - fit| after the fitted orders"}};
    for (const auto& [N, v] : ex.exact_sums)
        counts.rows.push_back({std::to_string(N), v.get_str(), fmt(ex.residuals.at(N))});
    counts.write(a.out, "polytope_counts", a.format, inputs);

    Table fit;
    fit.columns = {{"zeta_q", "stratum root of unity e^{2 pi i q/d}: numerator"},
                   {"zeta_d", "stratum root of unity: denominator"},
                   {"l", "expansion order"},
                   {"coef_re", "fitted coefficient of zeta^{-N} N^{n(zeta)-l}, real part"},
                   {"coef_im", "fitted coefficient, imaginary part"},
                   {"a0_re", "closed-form leading coefficient (l = 0 rows), real part"},
                   {"a0_im", "closed-form leading coefficient, imaginary part"}};
    for (const auto& z : ex.strata)
        for (int l = 0; l < L; ++l) {
            std::complex<double> c = ex.fitted.at({{z.q, z.d}, l});
            std::string a0re = "", a0im = "";
            if (l == 0) {
                std::complex<double> c0 = ex.a0_closed.at({z.q, z.d});
                a0re = fmt(c0.real());
                a0im = fmt(c0.imag());
            }
            fit.rows.push_back({std::to_string(z.q), std::to_string(z.d), std::to_string(l),
                                fmt(c.real()), fmt(c.imag()), a0re, a0im});
        }
    fit.write(a.out, "polytope_fit", a.format, inputs);
    std::printf("polytope: condition %.3e, %zu strata\n", ex.condition, ex.strata.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum Birkhoff normal forms, eigenvalue clusters and polytope trace sums"};
    app.require_subcommand(1);

    CommonArgs a_nf, a_cl, a_de, a_we, a_ll, a_po;
    std::string gname = "t2";
    int samples = 20000, ll_orders = 4, po_orders = 4;
    std::vector<long> po_p;
    std::vector<int> po_alpha;

    auto* c_nf = app.add_subcommand("cmd_normal_form", "compute and verify the normal form");
    add_common(c_nf, a_nf);
    auto* c_cl = app.add_subcommand("cmd_cluster", "cluster spectra over (hbar, N)");
    add_common(c_cl, a_cl);
    auto* c_de = app.add_subcommand("cmd_density", "spectral density comparisons");
    add_common(c_de, a_de);
    c_de->add_option("--g", gname, "test function: one|t|t2|gauss");
    c_de->add_option("--samples", samples, "Monte-Carlo sample count");
    auto* c_we = app.add_subcommand("cmd_weyl", "Weyl counting against phase-space volume");
    add_common(c_we, a_we);
    auto* c_ll = app.add_subcommand("cmd_lowlying", "low-lying eigenvalue expansions");
    add_common(c_ll, a_ll);
    c_ll->add_option("--orders", ll_orders, "number of fitted expansion orders");
    auto* c_po = app.add_subcommand("cmd_polytope", "polytope trace sums and expansion fit");
    add_common(c_po, a_po, false);
    c_po->add_option("--p", po_p, "weights p, comma separated")->delimiter(',');
    c_po->add_option("--alpha", po_alpha, "exponent alpha, comma separated")->delimiter(',');
    c_po->add_option("--orders", po_orders, "fitted orders per stratum");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try {
        if (c_nf->parsed()) return run_normal_form(a_nf);
        if (c_cl->parsed()) return run_cluster(a_cl);
        if (c_de->parsed()) return run_density(a_de, gname, samples);
        if (c_we->parsed()) return run_weyl(a_we);
        if (c_ll->parsed()) return run_lowlying(a_ll, ll_orders);
        if (c_po->parsed()) return run_polytope(a_po, po_p, po_alpha, po_orders);
    } catch (const qbnf::json::exception& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::runtime_error& e) {
        if (std::string(e.what()).find("ill-conditioned") != std::string::npos) {
            std::fprintf(stderr, "conditioning error: %s\n", e.what());
            return kExitConditioning;
        }
        if (std::string(e.what()).find("cannot read") != std::string::npos) {
            std::fprintf(stderr, "validation error: %s\n", e.what());
            return kExitValidation;
        }
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvariant;
    } catch (const std::logic_error& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return kExitInvariant;
    }
    return 0;
}
