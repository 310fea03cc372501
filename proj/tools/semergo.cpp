// semergo: experiments on additive arithmetical semigroups - exact prime
// counting, Omega statistics from generating-function tables, uniquely
// ergodic orbit averages, and the two-set exchange machinery, with
// reproducible CSV/JSON output.

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "semergo/acceptance.hpp"
#include "semergo/averages.hpp"
#include "semergo/counting.hpp"
#include "semergo/dynamics.hpp"
#include "semergo/ffpoly.hpp"
#include "semergo/graph.hpp"
#include "semergo/io.hpp"
#include "semergo/keyprop.hpp"

namespace {

using namespace semergo;

constexpr int kExitCheckFailure = 2;

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == delim) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

// "kind:key=value,key=value" -> kind + kv map (values may hold ';' lists)
std::map<std::string, std::string> parse_subspec(const std::string& spec, std::string& kind) {
    std::map<std::string, std::string> kv;
    std::size_t colon = spec.find(':');
    kind = spec.substr(0, colon);
    if (colon == std::string::npos) return kv;
    for (const std::string& part : split(spec.substr(colon + 1), ',')) {
        if (part.empty()) continue;
        std::size_t eq = part.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value in '" + part + "'");
        kv[part.substr(0, eq)] = part.substr(eq + 1);
    }
    return kv;
}

long long to_int(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad integer for " + what + ": '" + s + "'");
    }
}

std::unique_ptr<Instance> make_instance(const std::string& spec) {
    std::string kind;
    auto kv = parse_subspec(spec, kind);
    if (kind == "poly") {
        std::uint64_t p = static_cast<std::uint64_t>(
            to_int(kv.count("p") ? kv["p"] : "2", "instance p"));
        unsigned k =
            static_cast<unsigned>(to_int(kv.count("k") ? kv["k"] : "1", "instance k"));
        return std::make_unique<PolynomialInstance>(Fq::make(p, k), 512);
    }
    if (kind == "synthetic") {
        BigInt q = BigInt::from_decimal(kv.count("q") ? kv["q"] : "2");
        std::vector<BigInt> pi;
        if (kv.count("pi")) {
            for (const std::string& v : split(kv["pi"], ';'))
                pi.push_back(BigInt::from_decimal(v));
        } else if (kv.count("pi-file")) {
            std::ifstream in(kv["pi-file"]);
            if (!in) throw Error("cannot open pi-file " + kv["pi-file"]);
            std::string tok;
            while (in >> tok) pi.push_back(BigInt::from_decimal(tok));
        } else if (kv.count("gauss")) {
            // pi of the polynomial semigroup over F_q, up to the given degree
            int depth = static_cast<int>(to_int(kv["gauss"], "gauss depth"));
            if (!q.fits_u64()) throw Error("gauss synthetic table needs machine-size q");
            pi = polynomial_pi_table(q.to_u64(), depth);
        } else {
            throw ParseError("synthetic instance needs pi=, pi-file= or gauss=");
        }
        return std::make_unique<SyntheticInstance>(std::move(q), std::move(pi), spec);
    }
    if (kind == "graph") {
        int nmax = kv.count("nmax") ? static_cast<int>(to_int(kv["nmax"], "graph nmax")) : 48;
        if (kv.count("complete")) {
            int n = static_cast<int>(to_int(kv["complete"], "complete graph order"));
            return std::make_unique<GraphPathInstance>(GraphSpec::complete(n), nmax);
        }
        if (kv.count("file")) {
            std::ifstream in(kv["file"]);
            if (!in) throw Error("cannot open edge list " + kv["file"]);
            return std::make_unique<GraphPathInstance>(GraphSpec::parse_edge_list(in), nmax);
        }
        throw ParseError("graph instance needs file= or complete=");
    }
    throw ParseError("unknown instance kind '" + kind + "'");
}

AlphaSpec make_alpha(const std::string& spec) {
    if (spec == "sqrt2") return AlphaSpec::sqrt2();
    if (spec == "golden") return AlphaSpec::golden();
    if (spec == "pi") return AlphaSpec::pi();
    std::size_t slash = spec.find('/');
    if (slash != std::string::npos) {
        return AlphaSpec::rational(to_int(spec.substr(0, slash), "alpha numerator"),
                                   to_int(spec.substr(slash + 1), "alpha denominator"));
    }
    try {
        std::size_t pos = 0;
        double v = std::stod(spec, &pos);
        if (pos != spec.size()) throw std::invalid_argument(spec);
        return AlphaSpec::decimal(v);
    } catch (const std::exception&) {
        throw ParseError("bad alpha '" + spec + "' (want sqrt2|golden|pi|p/q|decimal)");
    }
}

DynSystem make_system(const std::string& spec) {
    std::string kind;
    auto kv = parse_subspec(spec, kind);
    if (kind == "finite")
        return DynSystem::finite(
            static_cast<int>(to_int(kv.count("m") ? kv["m"] : "2", "system m")));
    if (kind == "torus") {
        if (!kv.count("alpha")) throw ParseError("torus system needs alpha=");
        std::vector<AlphaSpec> alphas;
        for (const std::string& a : split(kv["alpha"], ';')) alphas.push_back(make_alpha(a));
        return DynSystem::torus(std::move(alphas));
    }
    throw ParseError("unknown system kind '" + kind + "'");
}

Rational parse_rational(const std::string& s) {
    std::size_t slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt::from_decimal(s));
    return Rational(BigInt::from_decimal(s.substr(0, slash)),
                    BigInt::from_decimal(s.substr(slash + 1)));
}

Observable make_observable(const std::string& spec, const DynSystem& sys) {
    std::string kind;
    auto kv = parse_subspec(spec, kind);
    if (kind == "indicator") {
        int r = static_cast<int>(to_int(kv.count("r") ? kv["r"] : "0", "indicator r"));
        return Observable::indicator(sys.modulus, r);
    }
    if (kind == "table") {
        if (!kv.count("values")) throw ParseError("table observable needs values=");
        std::vector<Rational> vals;
        for (const std::string& v : split(kv["values"], ';')) vals.push_back(parse_rational(v));
        if (sys.kind == DynSystem::Kind::FiniteRotation &&
            vals.size() != static_cast<std::size_t>(sys.modulus))
            throw Error("table length must equal the rotation modulus");
        return Observable::finite_table(std::move(vals), spec);
    }
    if (kind == "character") {
        long long freq = to_int(kv.count("freq") ? kv["freq"] : "1", "character freq");
        return Observable::character(freq);
    }
    if (kind == "constant") {
        double re = kv.count("re") ? std::stod(kv["re"]) : (kv.count("c") ? std::stod(kv["c"]) : 1.0);
        double im = kv.count("im") ? std::stod(kv["im"]) : 0.0;
        return Observable::constant(Complex(re, im));
    }
    if (kind == "tabulated") {
        if (!kv.count("samples")) throw ParseError("tabulated observable needs samples=");
        std::vector<double> s;
        for (const std::string& v : split(kv["samples"], ';')) s.push_back(std::stod(v));
        return Observable::tabulated(std::move(s), spec);
    }
    throw ParseError("unknown observable kind '" + kind + "'");
}

WindowFn make_window(const std::string& spec) {
    std::string kind;
    auto kv = parse_subspec(spec, kind);
    auto bounds = [&](double defa, double defb) {
        double a = kv.count("a") ? std::stod(kv["a"]) : defa;
        double b = kv.count("b") ? std::stod(kv["b"]) : defb;
        return std::make_pair(a, b);
    };
    if (kind == "hat") {
        auto [a, b] = bounds(-3.0, 3.0);
        return WindowFn::hat(a, b);
    }
    if (kind == "bump") {
        auto [a, b] = bounds(-3.0, 3.0);
        return WindowFn::smooth_bump(a, b);
    }
    if (kind == "one" || kind == "constant_one") return WindowFn::constant_one();
    throw ParseError("unknown window kind '" + kind + "'");
}

Point make_point(const std::string& spec, const DynSystem& sys) {
    if (sys.kind == DynSystem::Kind::FiniteRotation) {
        long long r = spec.empty() ? 0 : to_int(spec, "start point");
        return Point::finite_at(((r % sys.modulus) + sys.modulus) % sys.modulus);
    }
    Point p = Point::origin(sys);
    if (spec.empty()) return p;
    std::vector<std::string> comps = split(spec, ';');
    if (comps.size() != sys.alpha.size())
        throw Error("start point dimension != torus dimension");
    for (std::size_t i = 0; i < comps.size(); ++i) {
        std::size_t slash = comps[i].find('/');
        if (slash != std::string::npos)
            p.torus[i] = Fixed128::from_rational(to_int(comps[i].substr(0, slash), "x"),
                                                 to_int(comps[i].substr(slash + 1), "x"));
        else
            p.torus[i] = Fixed128::from_double(std::stod(comps[i]));
    }
    return p;
}

BoundedFn make_bounded(const std::string& spec) {
    std::string kind;
    auto kv = parse_subspec(spec, kind);
    if (kind == "parity") return BoundedFn::parity();
    if (kind == "one") return BoundedFn::one();
    if (kind == "constant")
        return BoundedFn::constant(kv.count("c") ? std::stod(kv["c"]) : 1.0);
    if (kind == "character") {
        AlphaSpec a = make_alpha(kv.count("alpha") ? kv["alpha"] : "sqrt2");
        long long h = to_int(kv.count("h") ? kv["h"] : "1", "character h");
        return BoundedFn::character(a, h);
    }
    if (kind == "residue") {
        int m = static_cast<int>(to_int(kv.count("m") ? kv["m"] : "2", "residue m"));
        int r = static_cast<int>(to_int(kv.count("r") ? kv["r"] : "0", "residue r"));
        return BoundedFn::residue_indicator(m, r);
    }
    throw ParseError("unknown bounded function '" + kind + "'");
}

ElementFn make_element_fn(const std::string& spec) {
    std::string kind;
    auto kv = parse_subspec(spec, kind);
    if (kind == "one") return ElementFn::one();
    if (kind == "liouville") return ElementFn::liouville();
    if (kind == "character")
        return ElementFn::omega_character(make_alpha(kv.count("alpha") ? kv["alpha"] : "sqrt2"));
    throw ParseError("unknown element function '" + kind + "'");
}

BSet make_bset(const std::string& spec, const Instance& inst) {
    std::string kind;
    auto kv = parse_subspec(spec, kind);
    if (kind == "primes") {
        if (!kv.count("degrees")) throw ParseError("primes bset needs degrees=");
        std::vector<Element> elems;
        for (const std::string& d : split(kv["degrees"], ';')) {
            int deg = static_cast<int>(to_int(d, "bset degree"));
            for (PrimeId p : inst.primes(deg)) elems.push_back(Element::prime(p));
        }
        return BSet::make(inst, std::move(elems), BSet::Kind::Primes);
    }
    throw ParseError("unknown bset kind '" + kind + "'");
}

std::vector<int> make_grid(const std::string& spec) {
    std::vector<int> grid;
    for (const std::string& v : split(spec, ','))
        if (!v.empty()) grid.push_back(static_cast<int>(to_int(v, "ngrid")));
    check_grid(grid);
    return grid;
}

// ---------------------------------------------------------------------------
// Option resolution: explicit flags > config file > defaults. The effective
// settings map is what gets hashed into the manifest.
// ---------------------------------------------------------------------------
struct RunContext {
    CLI::App* cmd = nullptr;
    std::map<std::string, std::string> config;     // from --config file
    std::map<std::string, std::string> effective;  // resolved settings

    std::string resolve(const std::string& flag, const std::string& key,
                        const std::string& flag_value, const std::string& fallback) {
        std::string value = fallback;
        auto it = config.find(key);
        if (it != config.end()) value = it->second;
        if (cmd->count(flag) > 0) value = flag_value;
        effective[key] = value;
        return value;
    }
};

unsigned resolve_threads(RunContext& ctx, const std::string& flag_value) {
    const char* env = std::getenv("SEMIGROUP_ERGODIC_THREADS");
    std::string fallback = env ? env : "1";
    std::string v = ctx.resolve("--threads", "threads", flag_value, fallback);
    long long t = to_int(v, "threads");
    if (t < 1) t = 1;
    return static_cast<unsigned>(t);
}

std::string iso_timestamp() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

struct OutputPaths {
    std::string csv, json, plot, manifest;
};

void emit_report(const AverageReport& rep, const RunContext& ctx, const OutputPaths& out,
                 const std::string& plot_payload = "") {
    std::string csv = report_to_csv(rep);
    std::cout << csv;
    if (rep.clipped_warning)
        std::cerr << "warning: bounded function was clipped to |a| <= 1\n";
    std::vector<std::string> written;
    if (!out.csv.empty()) {
        write_text_file(out.csv, csv);
        written.push_back(out.csv);
    }
    if (!out.json.empty()) {
        write_text_file(out.json, report_to_json(rep).dump(2) + "\n");
        written.push_back(out.json);
    }
    if (!out.plot.empty() && !plot_payload.empty()) {
        write_text_file(out.plot, plot_payload);
        written.push_back(out.plot);
    }
    if (!out.manifest.empty()) {
        nlohmann::json m = run_manifest(ctx.effective, written, iso_timestamp());
        write_text_file(out.manifest, m.dump(2) + "\n");
    }
}

void warn_if_rationalish(const AlphaSpec& alpha) {
    if (alpha.is_rational) return;
    if (auto close = rational_proximity(alpha.frac)) {
        std::cerr << "warning: alpha=" << alpha.desc << " is within 1e-12 of "
                  << close->first << "/" << close->second
                  << "; the rotation may not be uniquely ergodic\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semigroup ergodic-average experiments"};
    app.require_subcommand(1);

    // shared option plumbing; each subcommand registers what it uses
    std::string instance_spec = "poly:p=2,k=1";
    std::string config_path;
    std::string ngrid_spec = "25,50,100,200";
    std::string system_spec = "torus:alpha=sqrt2";
    std::string observable_spec = "character:freq=1";
    std::string window_spec = "hat:a=-3,b=3";
    std::string x_spec;
    std::string alpha_spec = "sqrt2";
    std::string a_spec = "parity";
    std::string bset_spec = "primes:degrees=1;2";
    std::string threads_spec = "1";
    std::string variant = "big-omega";
    OutputPaths paths;
    int nmax = 24;
    long long freq_h = 1;
    int mod_m = 3, res_r = 0, degree = 2;
    double epsilon = 0.5;
    int override_s = 0, override_t = 0;
    bool oracle_enumerate = false, quick = false, list_primes = false;

    auto add_common = [&](CLI::App* cmd, bool with_grid) {
        cmd->add_option("--instance", instance_spec, "instance spec (poly:|synthetic:|graph:)");
        cmd->add_option("--config", config_path, "flat key=value config file (flags win)");
        cmd->add_option("--csv", paths.csv, "write the CSV report here");
        cmd->add_option("--json", paths.json, "write the JSON report here");
        cmd->add_option("--plot-data", paths.plot, "write plot-ready (x, y) pairs here");
        cmd->add_option("--manifest", paths.manifest, "write the run manifest here");
        cmd->add_option("--threads", threads_spec, "worker bound (results independent of it)");
        cmd->add_option("--variant", variant, "big-omega (default) or omega");
        if (with_grid) cmd->add_option("--ngrid", ngrid_spec, "comma-separated degrees");
        return cmd;
    };

    auto load_context = [&](CLI::App* cmd) {
        RunContext ctx;
        ctx.cmd = cmd;
        if (cmd->count("--config") > 0 || !config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw Error("cannot open config " + config_path);
            ctx.config = parse_config(in);
        }
        return ctx;
    };

    auto resolved_distinct = [&](RunContext& ctx) {
        std::string v = ctx.resolve("--variant", "variant", variant, "big-omega");
        if (v == "omega") return true;
        if (v == "big-omega") return false;
        throw ParseError("variant must be big-omega or omega");
    };

    int exit_code = 0;

    // ---- primes ----
    CLI::App* primes = add_common(app.add_subcommand("primes", "prime counts pi(n)"), false);
    primes->add_option("--nmax", nmax, "count up to this degree");
    primes->add_option("--degree", degree, "single degree to inspect");
    primes->add_flag("--list", list_primes, "list the primes of --degree");
    primes->callback([&] {
        RunContext ctx = load_context(primes);
        auto inst = make_instance(ctx.resolve("--instance", "instance", instance_spec, instance_spec));
        int top = static_cast<int>(to_int(
            ctx.resolve("--nmax", "nmax", std::to_string(nmax), std::to_string(nmax)), "nmax"));
        std::string csv = "n,pi\n";
        for (int d = 1; d <= top; ++d) csv += std::to_string(d) + "," + inst->pi(d).to_string() + "\n";
        std::cout << csv;
        if (primes->count("--list") > 0) {
            auto* poly = dynamic_cast<PolynomialInstance*>(inst.get());
            if (poly) {
                double enum_bits = degree * std::log2(poly->field().q.to_double());
                if (enum_bits > 24.0)
                    std::cerr << "warning: listing scans q^" << degree
                              << " > 2^24 polynomials\n";
            }
            for (PrimeId id : inst->primes(degree)) {
                if (poly)
                    std::cout << poly->poly_of_prime(id).to_string() << "\n";
                else
                    std::cout << "prime(degree=" << id.degree << ",index=" << id.index << ")\n";
            }
        }
        if (!paths.csv.empty()) write_text_file(paths.csv, csv);
    });

    // ---- factor ----
    std::string factor_input;
    CLI::App* factor_cmd = add_common(app.add_subcommand("factor", "factor a monic polynomial"), false);
    factor_cmd->add_option("polynomial", factor_input, "e.g. x^2+x")->required();
    factor_cmd->callback([&] {
        RunContext ctx = load_context(factor_cmd);
        auto inst = make_instance(ctx.resolve("--instance", "instance", instance_spec, instance_spec));
        auto* poly_inst = dynamic_cast<PolynomialInstance*>(inst.get());
        if (!poly_inst) throw Error("factor needs a polynomial instance");
        Poly m = poly_parse(poly_inst->field(), factor_input);
        Factorization f = factorize(m);
        std::string out;
        for (std::size_t i = 0; i < f.parts.size(); ++i) {
            if (i) out += " * ";
            std::string s = f.parts[i].prime.to_string();
            bool composite = s.find('+') != std::string::npos;
            out += composite ? "(" + s + ")" : s;
            if (f.parts[i].multiplicity > 1)
                out += "^" + std::to_string(f.parts[i].multiplicity);
        }
        if (f.parts.empty()) out = "1";
        std::cout << out << ", Omega=" << f.big_omega() << "\n";
    });

    // ---- counts ----
    CLI::App* counts = add_common(app.add_subcommand("counts", "N(n,k) tables"), false);
    counts->add_option("--nmax", nmax, "table depth");
    counts->add_option("--oracle", oracle_enumerate, "verify against enumeration (enumerate)")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, bool>{{"enumerate", true}, {"none", false}}));
    counts->callback([&] {
        RunContext ctx = load_context(counts);
        auto inst = make_instance(ctx.resolve("--instance", "instance", instance_spec, instance_spec));
        int top = static_cast<int>(to_int(
            ctx.resolve("--nmax", "nmax", std::to_string(nmax), std::to_string(nmax)), "nmax"));
        bool distinct = resolved_distinct(ctx);
        CountTable t = count_table(*inst, top);
        std::string csv = count_table_to_csv(t, distinct);
        std::cout << csv;
        std::vector<std::string> written;
        if (!paths.csv.empty()) {
            write_text_file(paths.csv, csv);
            written.push_back(paths.csv);
        }
        if (!paths.json.empty()) {
            write_text_file(paths.json, count_table_to_json(t).dump(2) + "\n");
            written.push_back(paths.json);
        }
        if (!paths.manifest.empty())
            write_text_file(paths.manifest,
                            run_manifest(ctx.effective, written, iso_timestamp()).dump(2) + "\n");
        if (counts->count("--oracle") > 0 && oracle_enumerate) {
            auto* poly_inst = dynamic_cast<PolynomialInstance*>(inst.get());
            if (!poly_inst) throw Error("--oracle enumerate needs a polynomial instance");
            double enum_bits = top * std::log2(poly_inst->field().q.to_double());
            if (enum_bits > 24.0)
                std::cerr << "warning: oracle enumeration needs q^" << top
                          << " > 2^24 polynomials; this will be slow\n";
            for (int n = 0; n <= top; ++n) {
                std::vector<BigInt> hist(static_cast<std::size_t>(n) + 1, BigInt(0));
                for (const Poly& m : enumerate_monic(poly_inst->field(), n)) {
                    Factorization f = factorize(m);
                    hist[distinct ? f.small_omega() : f.big_omega()] += BigInt(1);
                }
                const auto& table = distinct ? t.small_omega : t.big_omega;
                for (int k = 0; k <= n; ++k) {
                    if (table[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] !=
                        hist[static_cast<std::size_t>(k)]) {
                        std::cerr << "oracle mismatch at n=" << n << " k=" << k << "\n";
                        exit_code = kExitCheckFailure;
                        return;
                    }
                }
            }
            std::cout << "# oracle: enumeration histogram matches exactly\n";
        }
    });

    // ---- pnt-check ----
    CLI::App* pnt = add_common(app.add_subcommand("pnt-check", "Chebyshev residuals"), false);
    pnt->add_option("--nmax", nmax, "check up to this degree");
    pnt->callback([&] {
        RunContext ctx = load_context(pnt);
        auto inst = make_instance(ctx.resolve("--instance", "instance", instance_spec, instance_spec));
        int top = static_cast<int>(to_int(
            ctx.resolve("--nmax", "nmax", std::to_string(nmax), std::to_string(nmax)), "nmax"));
        PntReport rep = pnt_check(*inst, top);
        std::string csv = "n,lambda,residual\n";
        for (int n = 1; n <= top; ++n)
            csv += std::to_string(n) + "," + chebyshev_lambda(*inst, n).to_string() + "," +
                   format_double(rep.residuals[static_cast<std::size_t>(n - 1)]) + "\n";
        std::cout << csv;
        std::cout << "# max_residual=" << format_double(rep.max_residual)
                  << " theta_hat=" << format_double(rep.theta_hat)
                  << " alternation=" << (rep.alternation ? "yes" : "no") << "\n";
        if (!paths.csv.empty()) write_text_file(paths.csv, csv);
        if (rep.alternation)
            std::cerr << "warning: non-classical alternation detected; averaging will refuse "
                         "this instance\n";
    });

    // ---- graph-pi ----
    CLI::App* gpi = add_common(app.add_subcommand("graph-pi", "graph prime counts"), false);
    gpi->add_option("--nmax", nmax, "count up to this length");
    gpi->callback([&] {
        RunContext ctx = load_context(gpi);
        std::string spec = ctx.resolve("--instance", "instance", instance_spec, instance_spec);
        std::string kind;
        auto kv = parse_subspec(spec, kind);
        if (kind != "graph") throw Error("graph-pi needs a graph instance");
        auto inst = make_instance(spec);
        auto* graph = dynamic_cast<GraphPathInstance*>(inst.get());
        int top = static_cast<int>(to_int(
            ctx.resolve("--nmax", "nmax", std::to_string(nmax), std::to_string(nmax)), "nmax"));
        auto traces = graph->spec().closed_path_counts(top);
        auto pis = graph_pi(graph->spec(), top);
        std::string csv = "n,pi,closed_paths\n";
        for (int n = 1; n <= top; ++n)
            csv += std::to_string(n) + "," + pis[static_cast<std::size_t>(n - 1)].to_string() +
                   "," + traces[static_cast<std::size_t>(n - 1)].to_string() + "\n";
        std::cout << csv;
        std::cout << "# delta=" << graph->delta()
                  << " perron=" << format_double(graph->q_real()) << "\n";
        if (!paths.csv.empty()) write_text_file(paths.csv, csv);
    });

    // ---- density ----
    CLI::App* density = add_common(app.add_subcommand("density", "natural density of Omega == r mod m"), true);
    density->add_option("--m", mod_m, "modulus");
    density->add_option("--r", res_r, "residue");
    density->callback([&] {
        RunContext ctx = load_context(density);
        auto inst = make_instance(ctx.resolve("--instance", "instance", instance_spec, instance_spec));
        std::vector<int> grid = make_grid(ctx.resolve("--ngrid", "ngrid", ngrid_spec, ngrid_spec));
        int m = static_cast<int>(to_int(
            ctx.resolve("--m", "m", std::to_string(mod_m), std::to_string(mod_m)), "m"));
        int r = static_cast<int>(to_int(
            ctx.resolve("--r", "r", std::to_string(res_r), std::to_string(res_r)), "r"));
        unsigned threads = resolve_threads(ctx, threads_spec);
        bool distinct = resolved_distinct(ctx);
        CountTable t = count_table(*inst, grid.back());
        AverageReport rep = density_report(t, m, r, grid, distinct, threads);
        emit_report(rep, ctx, paths);
    });

    // ---- weyl ----
    CLI::App* weyl = add_common(app.add_subcommand("weyl", "Weyl sums of Omega(g) alpha"), true);
    weyl->add_option("--alpha", alpha_spec, "sqrt2|golden|pi|p/q|decimal");
    weyl->add_option("--freq", freq_h, "frequency (nonzero for a genuine test)");
    weyl->callback([&] {
        RunContext ctx = load_context(weyl);
        auto inst = make_instance(ctx.resolve("--instance", "instance", instance_spec, instance_spec));
        std::vector<int> grid = make_grid(ctx.resolve("--ngrid", "ngrid", ngrid_spec, ngrid_spec));
        AlphaSpec alpha = make_alpha(ctx.resolve("--alpha", "alpha", alpha_spec, alpha_spec));
        long long h = to_int(
            ctx.resolve("--freq", "freq", std::to_string(freq_h), std::to_string(freq_h)),
            "freq");
        unsigned threads = resolve_threads(ctx, threads_spec);
        bool distinct = resolved_distinct(ctx);
        warn_if_rationalish(alpha);
        CountTable t = count_table(*inst, grid.back());
        AverageReport rep = weyl_report(t, alpha, h, grid, distinct, threads);
        emit_report(rep, ctx, paths);
    });

    // ---- erdos-kac ----
    CLI::App* ek = add_common(app.add_subcommand("erdos-kac", "KS distance of the normalized Omega distribution"), true);
    ek->callback([&] {
        RunContext ctx = load_context(ek);
        auto inst = make_instance(ctx.resolve("--instance", "instance", instance_spec, instance_spec));
        std::vector<int> grid = make_grid(ctx.resolve("--ngrid", "ngrid", ngrid_spec, ngrid_spec));
        unsigned threads = resolve_threads(ctx, threads_spec);
        bool distinct = resolved_distinct(ctx);
        CountTable t = count_table(*inst, grid.back());
        AverageReport rep = erdos_kac_report(t, grid, distinct, threads);
        std::string plot;
        ErdosKacResult full = erdos_kac_cdf(t, grid.back(), distinct);
        plot = "x,empirical_cdf,normal_cdf\n";
        for (const ErdosKacAtom& a : full.atoms)
            plot += format_double(a.x) + "," + format_double(a.cdf) + "," +
                    format_double(a.normal) + "\n";
        emit_report(rep, ctx, paths, plot);
    });

    // ---- br-average ----
    CLI::App* br = add_common(app.add_subcommand("br-average", "plain orbit average over G_n"), true);
    br->add_option("--system", system_spec, "finite:m=3 | torus:alpha=sqrt2");
    br->add_option("--observable", observable_spec, "indicator:r=1 | character:freq=1 | ...");
    br->add_option("--x", x_spec, "start point (integer or semicolon fractions)");
    br->callback([&] {
        RunContext ctx = load_context(br);
        auto inst = make_instance(ctx.resolve("--instance", "instance", instance_spec, instance_spec));
        std::vector<int> grid = make_grid(ctx.resolve("--ngrid", "ngrid", ngrid_spec, ngrid_spec));
        DynSystem sys = make_system(ctx.resolve("--system", "system", system_spec, system_spec));
        Observable f = make_observable(
            ctx.resolve("--observable", "observable", observable_spec, observable_spec), sys);
        Point x = make_point(ctx.resolve("--x", "x", x_spec, ""), sys);
        unsigned threads = resolve_threads(ctx, threads_spec);
        bool distinct = resolved_distinct(ctx);
        for (const AlphaSpec& a : sys.alpha) warn_if_rationalish(a);
        CountTable t = count_table(*inst, grid.back());
        AverageReport rep = br_report(*inst, t, sys, x, f, grid, distinct, threads);
        emit_report(rep, ctx, paths);
    });

    // ---- loyd-average ----
    CLI::App* loyd = add_common(app.add_subcommand("loyd-average", "windowed orbit average"), true);
    loyd->add_option("--system", system_spec, "finite:m=3 | torus:alpha=sqrt2");
    loyd->add_option("--observable", observable_spec, "indicator:r=1 | character:freq=1 | ...");
    loyd->add_option("--window", window_spec, "hat:a=-3,b=3 | bump:a=..,b=.. | one");
    loyd->add_option("--x", x_spec, "start point");
    loyd->callback([&] {
        RunContext ctx = load_context(loyd);
        auto inst = make_instance(ctx.resolve("--instance", "instance", instance_spec, instance_spec));
        std::vector<int> grid = make_grid(ctx.resolve("--ngrid", "ngrid", ngrid_spec, ngrid_spec));
        DynSystem sys = make_system(ctx.resolve("--system", "system", system_spec, system_spec));
        Observable f = make_observable(
            ctx.resolve("--observable", "observable", observable_spec, observable_spec), sys);
        WindowFn w = make_window(ctx.resolve("--window", "window", window_spec, window_spec));
        Point x = make_point(ctx.resolve("--x", "x", x_spec, ""), sys);
        unsigned threads = resolve_threads(ctx, threads_spec);
        bool distinct = resolved_distinct(ctx);
        for (const AlphaSpec& a : sys.alpha) warn_if_rationalish(a);
        CountTable t = count_table(*inst, grid.back());
        AverageReport rep = loyd_report(*inst, t, sys, x, f, w, grid, distinct, threads);
        emit_report(rep, ctx, paths);
    });

    // ---- shift-test ----
    CLI::App* shift = add_common(app.add_subcommand("shift-test", "shift-invariance gaps"), true);
    shift->add_option("--a", a_spec, "parity | one | constant:c= | character:alpha=,h= | residue:m=,r=");
    shift->add_option("--window", window_spec, "window for phi(g)");
    shift->callback([&] {
        RunContext ctx = load_context(shift);
        auto inst = make_instance(ctx.resolve("--instance", "instance", instance_spec, instance_spec));
        std::vector<int> grid = make_grid(ctx.resolve("--ngrid", "ngrid", ngrid_spec, ngrid_spec));
        BoundedFn a = make_bounded(ctx.resolve("--a", "a", a_spec, a_spec));
        WindowFn w = make_window(ctx.resolve("--window", "window", window_spec, "one"));
        unsigned threads = resolve_threads(ctx, threads_spec);
        bool distinct = resolved_distinct(ctx);
        CountTable t = count_table(*inst, grid.back());
        AverageReport rep = shift_report(t, a, w, grid, distinct, threads);
        emit_report(rep, ctx, paths);
    });

    // ---- keyprop ----
    CLI::App* keyprop = add_common(app.add_subcommand("keyprop", "Phi, E(B), Proposition 3.1"), true);
    keyprop->add_option("--bset", bset_spec, "primes:degrees=1;2");
    keyprop->add_option("--a", a_spec, "one | liouville | character:alpha=");
    std::vector<std::string> phi_args;
    keyprop->add_option("--phi", phi_args, "two polynomials: print |gcd|-1 and exit")
        ->expected(2);
    keyprop->callback([&] {
        RunContext ctx = load_context(keyprop);
        auto inst = make_instance(ctx.resolve("--instance", "instance", instance_spec, instance_spec));
        if (keyprop->count("--phi") > 0) {
            auto* poly_inst = dynamic_cast<PolynomialInstance*>(inst.get());
            if (!poly_inst) throw Error("--phi needs a polynomial instance");
            Element g = poly_inst->element_of(poly_parse(poly_inst->field(), phi_args[0]));
            Element h = poly_inst->element_of(poly_parse(poly_inst->field(), phi_args[1]));
            std::cout << "phi=" << phi_correlation(*inst, g, h).to_string() << "\n";
            return;
        }
        std::vector<int> grid =
            make_grid(ctx.resolve("--ngrid", "ngrid", ngrid_spec, "8,10,12"));
        BSet b = make_bset(ctx.resolve("--bset", "bset", bset_spec, bset_spec), *inst);
        ElementFn a = make_element_fn(ctx.resolve("--a", "a", a_spec, "liouville"));
        Prop31Report rep = proposition31_check(*inst, b, a, grid);
        std::string csv = "n,lhs,rhs,slack,pass\n";
        for (const Prop31Row& row : rep.rows)
            csv += std::to_string(row.n) + "," + format_double(row.lhs) + "," +
                   format_double(rep.rhs) + "," + format_double(row.slack) + "," +
                   (row.pass ? "1" : "0") + "\n";
        std::cout << csv;
        std::cout << "# E(B)=" << rep.error_functional_value.to_string()
                  << " sqrtE=" << format_double(rep.rhs) << " all_pass="
                  << (rep.all_pass ? "yes" : "no") << "\n";
        if (!paths.csv.empty()) write_text_file(paths.csv, csv);
        if (!rep.all_pass) exit_code = kExitCheckFailure;
    });

    // ---- construct-b ----
    CLI::App* cb = add_common(app.add_subcommand("construct-b", "two-set construction"), false);
    cb->add_option("--epsilon", epsilon, "target error bound in (0,1)");
    cb->add_option("--s", override_s, "override: P1 spans degrees [1, s)");
    cb->add_option("--t", override_t, "override: P2 spans degrees s, 2s, .., st");
    cb->callback([&] {
        RunContext ctx = load_context(cb);
        auto inst = make_instance(ctx.resolve("--instance", "instance", instance_spec, instance_spec));
        double eps = std::stod(ctx.resolve("--epsilon", "epsilon", format_double(epsilon),
                                           format_double(epsilon)));
        std::optional<std::pair<int, int>> overrides;
        std::string s_str = ctx.resolve("--s", "s", std::to_string(override_s), "0");
        std::string t_str = ctx.resolve("--t", "t", std::to_string(override_t), "0");
        int s = static_cast<int>(to_int(s_str, "s")), t = static_cast<int>(to_int(t_str, "t"));
        if (s > 0 && t > 0) overrides = std::make_pair(s, t);
        ConstructedSets cs = construct_b_sets(*inst, eps, overrides);
        nlohmann::json j;
        j["instance"] = inst->description();
        j["epsilon"] = cs.params.epsilon;
        j["j0"] = cs.params.j0;
        j["s"] = cs.params.s;
        j["t"] = cs.params.t;
        j["overridden"] = cs.params.overridden;
        j["pnt_constant"] = cs.params.pnt_constant.to_string();
        j["harmonic_p1"] = cs.params.harmonic_p1.to_string();
        j["harmonic_p2"] = cs.params.harmonic_p2.to_string();
        j["harmonic_b1"] = cs.params.harmonic_b1.to_string();
        j["harmonic_b2"] = cs.params.harmonic_b2.to_string();
        j["bound_b1"] = cs.params.bound_b1.to_string();
        j["bound_b2"] = cs.params.bound_b2.to_string();
        j["epsilon_achieved"] = cs.params.epsilon_achieved;
        nlohmann::json counts_json;
        for (const auto& [deg, count] : cs.params.degree_counts)
            counts_json[std::to_string(deg)] = count.to_string();
        j["degree_counts"] = counts_json;
        auto dump_set = [](const BSet& b) {
            nlohmann::json arr = nlohmann::json::array();
            for (const Element& g : b.elements) {
                nlohmann::json e = nlohmann::json::array();
                for (const auto& [p, mult] : g.parts())
                    e.push_back({{"degree", p.degree}, {"index", p.index}, {"mult", mult}});
                arr.push_back(e);
            }
            return arr;
        };
        j["b1"] = dump_set(cs.b1);
        j["b2"] = dump_set(cs.b2);
        std::string text = j.dump(2) + "\n";
        std::cout << text;
        if (!paths.json.empty()) write_text_file(paths.json, text);
    });

    // ---- selftest ----
    CLI::App* selftest = app.add_subcommand("selftest", "run the acceptance suite");
    selftest->add_flag("--quick", quick, "halved scales");
    selftest->add_option("--threads", threads_spec, "worker bound");
    selftest->callback([&] {
        AcceptanceOptions opt;
        opt.quick = quick;
        opt.threads = static_cast<unsigned>(to_int(threads_spec, "threads"));
        auto results = run_acceptance(std::cout, opt);
        if (!acceptance_all_passed(results)) exit_code = kExitCheckFailure;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const semergo::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
