// SPDX-License-Identifier: MIT
// mpfcheck: classification tables, candidate verification, roots, thresholds, limits, plot data.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <mpf/mpf.hpp>

using nlohmann::json;
using namespace mpf;

namespace {

constexpr int exit_usage = 2;

double round12(double v)
{
    if (!std::isfinite(v) || v == 0) return v;
    std::ostringstream os;
    os.precision(12);
    os << v;
    return std::stod(os.str());
}

// every number printed with 12 significant digits
json round_numbers(const json& j)
{
    if (j.is_number_float()) return round12(j.get<double>());
    if (j.is_array()) {
        json out = json::array();
        for (const auto& x : j) out.push_back(round_numbers(x));
        return out;
    }
    if (j.is_object()) {
        json out = json::object();
        for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = round_numbers(it.value());
        return out;
    }
    return j;
}

void print_json(const json& j) { std::cout << round_numbers(j).dump(2) << "\n"; }

std::string num(double v) { return format_number(v); }

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

PhiFamily phi_family(const std::string& s)
{
    if (s == "mean") return PhiFamily::mean;
    if (s == "norm") return PhiFamily::norm;
    throw CLI::ValidationError("family", "must be mean or norm");
}

// ---------------------------------------------------------------------------

int cmd_classify(const std::string& fam, std::optional<double> sigma, bool all, const std::string& format)
{
    const Family f = parse_family(fam);
    if (!all && !sigma) {
        std::cerr << "classify: give --sigma or --all\n";
        return exit_usage;
    }
    if (sigma && *sigma == 0) {
        std::cerr << "classify: sigma must be nonzero\n";
        return exit_usage;
    }
    if (all) {
        if (format == "md") std::cout << markdown_table(f);
        else if (format == "csv") {
            std::cout << "range,outcome,witness,source,note\n";
            for (const auto& r : classify_table(f))
                std::cout << csv_field(r.display) << "," << to_string(r.verdict.outcome) << ","
                          << csv_field(r.verdict.witness) << "," << csv_field(r.verdict.source) << ","
                          << csv_field(r.verdict.note) << "\n";
        } else print_json(table_json(f));
        return 0;
    }
    const auto v = classify(f, *sigma);
    if (format == "md") {
        std::cout << "| family | sigma | verdict | witness | source |\n|---|---|---|---|---|\n"
                  << "| " << fam << " | " << num(*sigma) << " | " << verdict_label(v) << " | "
                  << (v.witness.empty() ? "-" : v.witness) << " | " << v.source << " |\n";
    } else if (format == "csv") {
        std::cout << "family,sigma,outcome,witness,source,note\n"
                  << fam << "," << num(*sigma) << "," << to_string(v.outcome) << "," << csv_field(v.witness) << ","
                  << csv_field(v.source) << "," << csv_field(v.note) << "\n";
    } else {
        auto j = to_json(v);
        j["family"] = fam;
        print_json(j);
    }
    return 0;
}

struct VerifyArgs
{
    std::string w, F, entry, family;
    std::optional<double> s, sigma, xi;
    std::size_t grid = 2048;
    double tol = default_eta;
    std::uint64_t seed = 0;
    std::string format = "json";
};

int cmd_verify(const VerifyArgs& a)
{
    CurvatureFunction w, F;
    std::optional<VelocityFamilySpec> spec;
    std::string w_text;
    try {
        if (!a.entry.empty()) {
            const auto& e = lookup(a.entry);
            const double s = a.s ? *a.s : a.sigma ? *a.sigma : e.sample_sigmas.front();
            const auto p = e.pair(s);
            w = p.w;
            F = p.F;
            spec = p.spec;
            w_text = e.display_expression();
        } else {
            if (a.w.empty()) {
                std::cerr << "verify: give --w or --entry\n";
                return exit_usage;
            }
            const double s = a.s ? *a.s : a.sigma.value_or(0.0);
            w = parse_expression(a.w, s);
            w_text = a.w;
            if (!a.F.empty()) {
                F = parse_expression(a.F, s);
            } else {
                if (!a.sigma) {
                    std::cerr << "verify: give --sigma with --family/--xi, or --F\n";
                    return exit_usage;
                }
                double xi = a.xi.value_or(1.0);
                if (!a.family.empty()) xi = family_spec(parse_family(a.family), *a.sigma).xi;
                spec = VelocityFamilySpec{xi, *a.sigma};
                F = make_velocity(*spec);
            }
        }
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::out_of_range& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return exit_usage;
    }
    GridConfig cfg;
    cfg.size = a.grid;
    cfg.seed = a.seed;
    const auto rep = check_mpf(w, F, spec, cfg, a.tol);
    if (a.format == "md") {
        static const char* names[5] = {"I", "II", "III", "IV", "V"};
        std::cout << "| condition | verdict | witness rho | margin | detail |\n|---|---|---|---|---|\n";
        for (int i = 0; i < 5; ++i) {
            const auto& c = rep[i];
            std::cout << "| " << names[i] << " | " << to_string(c.status) << " | " << (c.rho ? num(*c.rho) : "-")
                      << " | " << num(round12(c.margin)) << " | " << c.detail << " |\n";
        }
        std::cout << "\noverall: " << to_string(rep.overall) << "\n";
    } else {
        auto j = to_json(rep);
        j["w"] = w_text;
        j["F"] = F.text();
        print_json(j);
    }
    switch (rep.overall) {
    case Status::pass: return 0;
    case Status::fail: return 1;
    case Status::inconclusive: return 3;
    }
    return 3;
}

int cmd_sigma_delta(const std::string& fam, std::optional<double> sigma0, std::optional<double> delta, double tol,
                    const std::string& format)
{
    const PhiFamily f = phi_family(fam);
    json j;
    if (delta) {
        if (!sigma0) {
            std::cerr << "sigma-delta: --delta needs --sigma0\n";
            return exit_usage;
        }
        const auto r = check_feasibility(f, *sigma0, *delta);
        j = {{"family", fam},
             {"sigma0", r.sigma0},
             {"delta", r.delta},
             {"rho0", r.rho0},
             {"negative_on_interval", r.certificate.negative},
             {"scan_negative", r.scan_negative},
             {"certification", r.certificate.method},
             {"sigma_delta", r.sigma_delta()}};
    } else {
        j = to_json(find_sigma_delta(f, sigma0, tol));
    }
    if (format == "csv") {
        std::cout << "family,sigma0,delta,sigma_delta,certification\n"
                  << fam << "," << num(j["sigma0"].get<double>()) << ","
                  << num(j.contains("delta_min") ? j["delta_min"].get<double>() : j["delta"].get<double>()) << ","
                  << num(j["sigma_delta"].get<double>()) << "," << j["certification"].get<std::string>() << "\n";
    } else {
        print_json(j);
    }
    return 0;
}

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto dots = item.find("..");
        if (dots != std::string::npos) {
            const double lo = std::stod(item.substr(0, dots)), hi = std::stod(item.substr(dots + 2));
            for (double x = lo; x <= hi + 1e-12; x += 1) out.push_back(x);
        } else if (!item.empty()) {
            out.push_back(std::stod(item));
        }
    }
    return out;
}

const CatalogEntry* plot_entry(Family f, double sigma)
{
    const CatalogEntry* range_match = nullptr;
    for (const auto& e : catalog()) {
        if (e.expected != Expected::mpf || e.family.family_name() != to_string(f)) continue;
        if (!e.sigma_range.contains(sigma)) continue;
        if (e.sigma_range.lo == e.sigma_range.hi) return &e;  // the entry built for this power
        if (!range_match) range_match = &e;
    }
    return range_match;
}

int cmd_plot_data(const std::string& fam, const std::string& sigmas, std::size_t grid, const std::string& kind)
{
    const Family f = parse_family(fam);
    const auto ss = parse_list(sigmas);
    if (ss.empty()) {
        std::cerr << "plot-data: empty sigma list\n";
        return exit_usage;
    }
    struct Column
    {
        std::string name;
        std::function<double(double)> rho_alpha;
    };
    std::vector<Column> cols;
    for (double s : ss) {
        if (s == 0) {
            std::cerr << "plot-data: sigma must be nonzero\n";
            return exit_usage;
        }
        const auto F = make_velocity(family_spec(f, s));
        if (kind == "vanishing" || kind == "both")
            cols.push_back({"v_sigma=" + num(s), [F](double rho) { return rho * alpha_vanishing_F(F, rho); }});
        if (kind == "catalog" || kind == "both") {
            if (const auto* e = plot_entry(f, s)) {
                const auto w = e->candidate(s);
                cols.push_back({"w_sigma=" + num(s) + " " + e->name,
                                [w](double rho) { return rho * alpha_at(w, rho).alpha; }});
            }
        }
    }
    std::cout << "rho";
    for (const auto& c : cols) std::cout << "," << csv_field(c.name);
    std::cout << "\n";
    for (std::size_t i = 0; i < grid; ++i) {
        // log spacing near 0 shows the 1/sigma endpoint
        const double t = grid == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(grid - 1);
        const double rho = std::exp(std::log(1e-6) * (1 - t) + std::log(0.999) * t);
        std::cout << num(rho);
        for (const auto& c : cols) {
            double v;
            try {
                v = c.rho_alpha(rho);
            } catch (const std::exception&) {
                v = std::nan("");
            }
            std::cout << "," << num(round12(v));
        }
        std::cout << "\n";
    }
    return 0;
}

int cmd_roots(const std::string& fam, double sigma, const std::string& format)
{
    const PhiFamily f = phi_family(fam);
    if (!(sigma > 1)) {
        std::cerr << "roots: needs sigma > 1\n";
        return exit_usage;
    }
    const auto roots = f == PhiFamily::mean ? roots_mean(sigma) : roots_norm(sigma);
    if (format == "csv") {
        std::cout << "root,lo,hi,residual,method,multiplicity\n";
        for (const auto& r : roots)
            std::cout << num(r.root) << "," << num(r.lo) << "," << num(r.hi) << "," << num(r.residual) << ","
                      << to_string(r.method) << "," << r.multiplicity << "\n";
        return 0;
    }
    json arr = json::array();
    for (const auto& r : roots) arr.push_back(to_json(r));
    json j{{"family", fam}, {"sigma", sigma}, {"roots", arr}};
    if (roots.empty()) j["message"] = "no roots";
    // the brackets are already exact strings; keep them unrounded
    auto out = round_numbers(j);
    for (std::size_t i = 0; i < roots.size(); ++i) out["roots"][i]["bracket"] = arr[i]["bracket"];
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_limits(const std::string& cls, std::optional<double> xi, std::optional<double> sigma, double c, double d,
               const std::string& format)
{
    std::vector<LimitRecord> recs;
    if (cls.empty()) {
        recs = limit_sweep();
    } else {
        AlphaClass a;
        if (cls == "alpha1") a = AlphaClass::alpha1;
        else if (cls == "alpha2") a = AlphaClass::alpha2;
        else if (cls == "alpha3") a = AlphaClass::alpha3;
        else {
            std::cerr << "limits: class must be alpha1, alpha2 or alpha3\n";
            return exit_usage;
        }
        if (!xi || !sigma) {
            std::cerr << "limits: --class needs --xi and --sigma\n";
            return exit_usage;
        }
        try {
            recs = limit_table(a, *xi, *sigma, c, d);
        } catch (const std::invalid_argument& e) {
            std::cerr << "limits: " << e.what() << "\n";
            return exit_usage;
        }
    }
    if (format == "csv") {
        std::cout << "id,xi,sigma,c,d,scaling_exponent,limit_formula,limit_value,numeric,matches,flagged\n";
        for (const auto& r : recs)
            std::cout << r.id << "," << num(r.xi) << "," << num(r.sigma) << "," << num(r.c) << "," << num(r.d) << ","
                      << num(r.scaling_exponent) << "," << csv_field(r.limit_formula) << "," << num(round12(r.limit_value))
                      << "," << num(round12(r.numeric)) << "," << (r.matches ? "true" : "false") << ","
                      << (r.flagged ? "true" : "false") << "\n";
        return 0;
    }
    json arr = json::array();
    for (const auto& r : recs) arr.push_back(to_json(r));
    print_json({{"records", arr}});
    return 0;
}

Poly<Rational> read_poly(std::istream& in)
{
    Poly<Rational> p;
    std::string tok;
    while (in >> tok) {
        for (auto& ch : tok)
            if (ch == ',') ch = ' ';
        std::stringstream ss(tok);
        std::string t;
        while (ss >> t) p.c.emplace_back(Rational(t));
    }
    return p;
}

int cmd_certify(const std::string& file, const std::string& coeffs, const std::string& r_text)
{
    Poly<Rational> p;
    try {
        if (!coeffs.empty()) {
            std::stringstream ss(coeffs);
            p = read_poly(ss);
        } else {
            std::ifstream in(file);
            if (!in) {
                std::cerr << "certify: cannot open " << file << "\n";
                return exit_usage;
            }
            p = read_poly(in);
        }
    } catch (const std::exception& e) {
        std::cerr << "certify: bad coefficient: " << e.what() << "\n";
        return exit_usage;
    }
    Rational r;
    try {
        r = Rational(r_text);
    } catch (const std::exception&) {
        std::cerr << "certify: bad interval end " << r_text << "\n";
        return exit_usage;
    }
    NegativityCertificate cert;
    try {
        cert = certify_negative(p, r);
    } catch (const std::invalid_argument& e) {
        std::cerr << "certify: " << e.what() << "\n";
        return exit_usage;
    }
    json j{{"interval", "(0, " + r.str() + "]"},
           {"negative", cert.negative},
           {"method", cert.method},
           {"roots_in_interval", cert.roots_in_interval},
           {"stripped_rho_power", cert.stripped_power},
           {"sample_point", cert.sample_point.str()},
           {"sample_value", cert.sample_value.str()}};
    std::cout << j.dump(2) << "\n";
    return cert.negative ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Maximum-principle function checks for curvature-flow velocities"};
    app.require_subcommand(1);
    std::string format = "json";
    auto add_format = [&](CLI::App* sc, std::vector<std::string> allowed) {
        sc->add_option("--format", format, "output format")->check(CLI::IsMember(allowed));
    };

    // classify
    std::string c_family;
    std::optional<double> c_sigma;
    bool c_all = false;
    auto* classify_cmd = app.add_subcommand("classify", "corollary verdict for a family and power");
    classify_cmd->add_option("family", c_family, "gauss, mean, norm or trace")
        ->required()
        ->check(CLI::IsMember({"gauss", "mean", "norm", "trace"}));
    classify_cmd->add_option("--sigma", c_sigma, "power sigma");
    classify_cmd->add_flag("--all", c_all, "print the whole table");
    add_format(classify_cmd, {"json", "csv", "md"});

    // verify
    VerifyArgs va;
    auto* verify_cmd = app.add_subcommand("verify", "check the five MPF conditions for a candidate");
    verify_cmd->add_option("--w", va.w, "candidate expression in a, b, s");
    verify_cmd->add_option("--entry", va.entry, "catalog entry name instead of --w");
    verify_cmd->add_option("--s", va.s, "value of the parameter s (defaults to sigma)");
    verify_cmd->add_option("--family", va.family, "velocity family")
        ->check(CLI::IsMember({"gauss", "mean", "norm", "trace"}));
    verify_cmd->add_option("--xi", va.xi, "velocity parameter xi");
    verify_cmd->add_option("--sigma", va.sigma, "velocity power sigma");
    verify_cmd->add_option("--F", va.F, "velocity expression instead of a family");
    verify_cmd->add_option("--grid", va.grid, "log-spaced grid size")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--tol", va.tol, "relative tolerance eta");
    verify_cmd->add_option("--seed", va.seed, "seed for the random grid points");
    add_format(verify_cmd, {"json", "md"});

    // sigma-delta
    std::string sd_family;
    std::optional<double> sd_sigma0, sd_delta;
    double sd_tol = 1e-4;
    auto* sd_cmd = app.add_subcommand("sigma-delta", "threshold above which no MPF exists");
    sd_cmd->add_option("family", sd_family, "mean or norm")->required()->check(CLI::IsMember({"mean", "norm"}));
    sd_cmd->add_option("--sigma0", sd_sigma0, "base power (defaults to the root onset)");
    sd_cmd->add_option("--delta", sd_delta, "check feasibility of this delta instead of searching");
    sd_cmd->add_option("--tol", sd_tol, "bisection tolerance");
    add_format(sd_cmd, {"json", "csv"});

    // plot-data
    std::string pd_family, pd_sigmas, pd_kind = "vanishing";
    std::size_t pd_grid = 200;
    auto* pd_cmd = app.add_subcommand("plot-data", "CSV of rho*alpha curves");
    pd_cmd->add_option("family", pd_family, "velocity family")
        ->required()
        ->check(CLI::IsMember({"gauss", "mean", "norm", "trace"}));
    pd_cmd->add_option("--sigmas", pd_sigmas, "comma list, ranges like 1..7")->required();
    pd_cmd->add_option("--grid", pd_grid, "number of rows")->check(CLI::PositiveNumber);
    pd_cmd->add_option("--kind", pd_kind, "vanishing, catalog or both")
        ->check(CLI::IsMember({"vanishing", "catalog", "both"}));

    // roots
    std::string r_family;
    double r_sigma = 0;
    auto* roots_cmd = app.add_subcommand("roots", "roots of the vanishing alpha numerator");
    roots_cmd->add_option("family", r_family, "mean or norm")->required()->check(CLI::IsMember({"mean", "norm"}));
    roots_cmd->add_option("--sigma", r_sigma, "power sigma > 1")->required();
    add_format(roots_cmd, {"json", "csv"});

    // limits
    std::string l_class;
    std::optional<double> l_xi, l_sigma;
    double l_c = 1, l_d = 0;
    auto* limits_cmd = app.add_subcommand("limits", "limit table of the necessary conditions");
    limits_cmd->add_option("--class", l_class, "alpha1, alpha2 or alpha3; omit to dump the sampled table");
    limits_cmd->add_option("--xi", l_xi, "pre-shift xi (family xi minus one)");
    limits_cmd->add_option("--sigma", l_sigma, "power sigma");
    limits_cmd->add_option("--c", l_c, "leading alpha coefficient");
    limits_cmd->add_option("--d", l_d, "next alpha coefficient (alpha3)");
    add_format(limits_cmd, {"json", "csv"});

    // certify
    std::string cf_file, cf_coeffs, cf_r;
    auto* certify_cmd = app.add_subcommand("certify", "exact negativity of a polynomial on (0, r]");
    certify_cmd->add_option("--poly", cf_file, "file with ascending rational coefficients");
    certify_cmd->add_option("--coeffs", cf_coeffs, "ascending coefficients inline, comma or space separated");
    certify_cmd->add_option("--r", cf_r, "right end r of (0, r]")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : exit_usage;
    }

    try {
        if (*classify_cmd) return cmd_classify(c_family, c_sigma, c_all, format);
        if (*verify_cmd) {
            va.format = format;
            return cmd_verify(va);
        }
        if (*sd_cmd) return cmd_sigma_delta(sd_family, sd_sigma0, sd_delta, sd_tol, format);
        if (*pd_cmd) return cmd_plot_data(pd_family, pd_sigmas, pd_grid, pd_kind);
        if (*roots_cmd) return cmd_roots(r_family, r_sigma, format);
        if (*limits_cmd) return cmd_limits(l_class, l_xi, l_sigma, l_c, l_d, format);
        if (*certify_cmd) {
            if (cf_file.empty() == cf_coeffs.empty()) {
                std::cerr << "certify: give exactly one of --poly and --coeffs\n";
                return exit_usage;
            }
            return cmd_certify(cf_file, cf_coeffs, cf_r);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return exit_usage;
}
