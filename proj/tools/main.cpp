// Command line front end. Thin orchestration over the library: parse flags,
// load the potential, run the requested computation, write CSV or JSON.
// Exit codes: 0 success, 2 bad input, 3 numerical failure, 4 verification
// finished but at least one verdict is inconclusive.

#include "hillspec/errors.hpp"
#include "hillspec/harness.hpp"
#include "hillspec/kernel.hpp"
#include "hillspec/ode.hpp"
#include "hillspec/potential.hpp"
#include "hillspec/spectra.hpp"
#include "hillspec/version.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace hillspec;
using nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt15(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

double to_double(const std::string& s, const std::string& where) {
    try {
        std::size_t idx = 0;
        double v = std::stod(s, &idx);
        if (idx != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ValidationError(where + ": cannot parse number '" + s + "'");
    }
}

// a..b with either bound possibly negative or in exponent notation
struct Range {
    double lo = 0.0, hi = 0.0;
};

Range parse_range(const std::string& s, const std::string& where) {
    std::size_t dots = s.find("..", 1);
    if (dots == std::string::npos)
        throw ValidationError(where + ": expected a range 'a..b', got '" + s + "'");
    Range r;
    r.lo = to_double(s.substr(0, dots), where);
    r.hi = to_double(s.substr(dots + 2), where);
    return r;
}

// 3, -4.5, 2+1i, 1.5-2i, 4i, -i, 1e-3+2.5e2i
Complex parse_complex_literal(std::string s, const std::string& where) {
    s.erase(std::remove_if(s.begin(), s.end(),
                           [](unsigned char c) { return std::isspace(c) != 0; }),
            s.end());
    if (s.empty()) throw ValidationError(where + ": empty number");
    char last = s.back();
    if (last != 'i' && last != 'I') return {to_double(s, where), 0.0};

    std::string body = s.substr(0, s.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t k = 1; k < body.size(); ++k)
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E')
            split = k;
    if (split == std::string::npos) {
        if (body.empty() || body == "+") return {0.0, 1.0};
        if (body == "-") return {0.0, -1.0};
        return {0.0, to_double(body, where)};
    }
    double re = to_double(body.substr(0, split), where);
    std::string im = body.substr(split);
    if (im == "+") return {re, 1.0};
    if (im == "-") return {re, -1.0};
    return {re, to_double(im, where)};
}

std::vector<Complex> parse_complex_list(const std::string& s, const std::string& where) {
    std::vector<Complex> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t comma = s.find(',', start);
        std::string item =
            comma == std::string::npos ? s.substr(start) : s.substr(start, comma - start);
        out.push_back(parse_complex_literal(item, where));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

// one literal per line; blank lines and # comments skipped
std::vector<Complex> read_complex_lines(const std::string& path, const std::string& where) {
    std::ifstream in(path);
    if (!in) throw ValidationError(where + ": cannot open file: " + path);
    std::vector<Complex> out;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        out.push_back(parse_complex_literal(line, where + " (" + path + ")"));
    }
    return out;
}

std::string kind_label(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::Zero: return "zero";
        case PotentialKind::Constant: return "constant";
        case PotentialKind::Fourier: return "fourier";
        case PotentialKind::PolynomialPiece: return "polynomial_piece";
        case PotentialKind::Samples: return "samples";
        case PotentialKind::BFamily: return "b_family";
    }
    return "unknown";
}

std::string potential_id(const PotentialSpec& spec) {
    return kind_label(spec.kind) + "-" + config_hash(spec.canonical());
}

std::string integrator_text(const IntegratorConfig& cfg) {
    std::ostringstream os;
    os << "rel_tol=" << fmt17(cfg.rel_tol) << " abs_tol=" << fmt17(cfg.abs_tol)
       << " max_step=" << fmt17(cfg.max_step) << " min_steps_per_wave=" << cfg.min_steps_per_wave;
    return os.str();
}

std::string region_text(const SearchRegion& r) {
    std::ostringstream os;
    os << "re=" << fmt17(r.re_min) << ".." << fmt17(r.re_max) << " im=" << fmt17(r.im_min)
       << ".." << fmt17(r.im_max);
    return os.str();
}

std::string tolerance_text() {
    std::ostringstream os;
    os << "tol_root=" << fmt17(tol::root) << " tol_identity=" << fmt17(tol::identity);
    return os.str();
}

// file when -o was given, stdout otherwise
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ValidationError("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

ordered_json meta_json(const std::string& canonical) {
    return ordered_json{
        {"tool", kToolName},
        {"version", kToolVersion},
        {"config", canonical},
        {"config_hash", config_hash(canonical)},
        {"tolerances",
         {{"integration", tol::integration},
          {"root", tol::root},
          {"identity", tol::identity},
          {"verdict", tol::verdict}}},
    };
}

// Shared flag blocks. Strings stay empty when the flag was not given.
struct RegionFlags {
    std::string re, im;
    int bands = 4;
};

void add_region_flags(CLI::App* cmd, RegionFlags& flags, int default_bands) {
    flags.bands = default_bands;
    cmd->add_option("--re", flags.re, "real part range 'a..b' (default: band heuristic)");
    cmd->add_option("--im", flags.im, "imaginary part range 'a..b'");
    cmd->add_option("--bands", flags.bands,
                    "number of spectral bands the default region should cover")
        ->check(CLI::Range(1, 32));
}

SearchRegion resolve_region(const Potential& q, const RegionFlags& flags) {
    SearchRegion region = default_search_region(q, flags.bands);
    if (!flags.re.empty()) {
        Range r = parse_range(flags.re, "--re");
        region.re_min = r.lo;
        region.re_max = r.hi;
    }
    if (!flags.im.empty()) {
        Range r = parse_range(flags.im, "--im");
        region.im_min = r.lo;
        region.im_max = r.hi;
    }
    region.validate();
    return region;
}

void add_integrator_flags(CLI::App* cmd, IntegratorConfig& cfg) {
    cmd->add_option("--rel-tol", cfg.rel_tol, "ODE relative tolerance");
    cmd->add_option("--abs-tol", cfg.abs_tol, "ODE absolute tolerance");
    cmd->add_option("--max-step", cfg.max_step, "ODE step size cap");
}

Potential load_potential(const std::string& path) { return Potential(load_potential_file(path)); }

// ---------------------------------------------------------------- spectrum

struct SpectrumOpts {
    std::string potential_path;
    std::string tags = "P,AP";
    RegionFlags region;
    IntegratorConfig cfg;
    std::string out;
};

int run_spectrum(const SpectrumOpts& opt) {
    Potential q = load_potential(opt.potential_path);
    SearchRegion region = resolve_region(q, opt.region);

    std::vector<ProblemTag> tags;
    std::stringstream ss(opt.tags);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto tag = tag_from_name(item);
        if (!tag)
            throw ValidationError("--tags: unknown problem tag '" + item +
                                  "' (use D,N,DN,ND,P,AP,D_half,N_half,DN_half,ND_half)");
        tags.push_back(*tag);
    }
    if (tags.empty()) throw ValidationError("--tags: empty tag list");

    std::ostringstream canonical;
    canonical << "cmd=spectrum potential=" << potential_id(q.spec()) << " tags=" << opt.tags
              << " " << integrator_text(opt.cfg) << " " << region_text(region) << " "
              << tolerance_text();

    SpectrumReport merged;
    std::ostringstream tag_lines;
    for (ProblemTag tag : tags) {
        SpectrumReport rep = find_eigenvalues(q, tag, region, opt.cfg);
        tag_lines << "# tag=" << tag_name(tag) << " winding=" << rep.winding_total
                  << " refined=" << rep.refined_total << " unresolved=" << rep.unresolved.size()
                  << "\n";
        if (!rep.unresolved.empty())
            std::cerr << "warning: " << rep.unresolved.size() << " unresolved boxes for tag "
                      << tag_name(tag) << "\n";
        merged.eigenvalues.insert(merged.eigenvalues.end(), rep.eigenvalues.begin(),
                                  rep.eigenvalues.end());
    }

    Output out(opt.out);
    out.stream() << "# " << file_header(canonical.str()) << "\n" << tag_lines.str();
    write_spectrum_csv(out.stream(), merged, "");
    return 0;
}

// ------------------------------------------------------------ discriminant

struct DiscriminantOpts {
    std::string potential_path;
    std::string re;
    int samples = 512;
    RegionFlags region;
    IntegratorConfig cfg;
    bool no_zeros = false;
    std::string out;
};

int run_discriminant(const DiscriminantOpts& opt) {
    Potential q = load_potential(opt.potential_path);
    Range seg = parse_range(opt.re, "--re");
    if (!(seg.lo < seg.hi))
        throw ValidationError("--re: degenerate segment '" + opt.re +
                              "' (need re_min < re_max)");

    std::ostringstream canonical;
    canonical << "cmd=discriminant potential=" << potential_id(q.spec()) << " re="
              << fmt17(seg.lo) << ".." << fmt17(seg.hi) << " samples=" << opt.samples << " "
              << integrator_text(opt.cfg) << " " << tolerance_text();

    Output out(opt.out);
    std::ostream& os = out.stream();
    os << "# " << file_header(canonical.str()) << "\n";
    os << "# trace of the monodromy matrix along real mu\n";
    os << "re_mu,re_delta,im_delta\n";
    double step = (seg.hi - seg.lo) / (opt.samples - 1);
    for (int k = 0; k < opt.samples; ++k) {
        double mu = seg.lo + k * step;
        DiscriminantValue dv = discriminant(q, Complex{mu, 0.0}, opt.cfg);
        os << fmt15(mu) << ',' << fmt15(dv.value.real()) << ',' << fmt15(dv.value.imag()) << "\n";
    }

    if (opt.no_zeros) return 0;

    RegionFlags zflags = opt.region;
    zflags.re = opt.re;
    SearchRegion zregion = resolve_region(q, zflags);
    os << "\n# zeros of (trace - 2)(trace + 2) in " << region_text(zregion) << "\n";
    os << "tag,re_mu,im_mu,algebraic_order,geometric_multiplicity\n";
    for (ProblemTag tag : {ProblemTag::P, ProblemTag::AP}) {
        SpectrumReport rep = find_eigenvalues(q, tag, zregion, opt.cfg);
        if (!rep.unresolved.empty())
            std::cerr << "warning: " << rep.unresolved.size() << " unresolved boxes for tag "
                      << tag_name(tag) << "\n";
        for (const Eigenvalue& ev : rep.eigenvalues) {
            os << tag_name(ev.tag) << ',' << fmt15(ev.mu.real()) << ',' << fmt15(ev.mu.imag())
               << ',' << ev.algebraic_order << ','
               << (ev.geometric_multiplicity ? *ev.geometric_multiplicity : 1) << "\n";
        }
    }
    return 0;
}

// ------------------------------------------------------------------- check

struct CheckOpts {
    std::string potential_path;
    std::string norm = "l2";
    double tol = -1.0;
    std::string out;
};

int run_check(const CheckOpts& opt) {
    Potential q = load_potential(opt.potential_path);
    NormKind norm;
    if (opt.norm == "l2")
        norm = NormKind::L2;
    else if (opt.norm == "sup")
        norm = NormKind::Sup;
    else
        throw ValidationError("--norm: expected 'l2' or 'sup', got '" + opt.norm + "'");

    ConditionReport rep = evaluate_conditions(q, norm, opt.tol);

    std::ostringstream canonical;
    canonical << "cmd=check potential=" << potential_id(q.spec()) << " norm=" << opt.norm
              << " tol=" << fmt17(rep.tolerance) << " " << tolerance_text();

    ordered_json j;
    j["meta"] = meta_json(canonical.str());
    j["potential_id"] = potential_id(q.spec());
    j["condition_report"] = {
        {"norm", opt.norm},
        {"tolerance", rep.tolerance},
        {"half_factorization", {{"residual", rep.residual_b}, {"holds", rep.condition_b_holds}}},
        {"unit_factorization", {{"residual", rep.residual_bb}, {"holds", rep.condition_bb_holds}}},
        {"half_reflection", {{"residual", rep.residual_sym_half}, {"holds", rep.symmetric_half}}},
        {"unit_reflection", {{"residual", rep.residual_sym_unit}, {"holds", rep.symmetric_unit}}},
    };

    Output out(opt.out);
    out.stream() << "# " << file_header(canonical.str()) << "\n" << j.dump(2) << "\n";
    return 0;
}

// --------------------------------------------------------------- construct

struct ConstructOpts {
    std::string q2;
    std::string extension = "half_period";
    std::string tail_path;
    int grid_n = 256;
    std::string out;
};

int run_construct(const ConstructOpts& opt) {
    Q2Spec q2;
    if (opt.q2.rfind("poly:", 0) == 0) {
        q2.poly_coeffs = parse_complex_list(opt.q2.substr(5), "--q2");
    } else if (opt.q2.rfind("samples:", 0) == 0) {
        q2.samples = read_complex_lines(opt.q2.substr(8), "--q2");
    } else {
        throw ValidationError(
            "--q2: expected 'poly:c_k,...,c_0' (descending coefficients) or 'samples:FILE'");
    }

    ExtensionMode mode;
    if (opt.extension == "half_period")
        mode = ExtensionMode::HalfPeriod;
    else if (opt.extension == "reflect_about_half")
        mode = ExtensionMode::ReflectAboutHalf;
    else if (opt.extension == "explicit_tail")
        mode = ExtensionMode::ExplicitTail;
    else
        throw ValidationError("--extension: expected half_period, reflect_about_half or "
                              "explicit_tail, got '" +
                              opt.extension + "'");

    std::vector<Complex> tail;
    if (!opt.tail_path.empty()) tail = read_complex_lines(opt.tail_path, "--tail");
    if (mode == ExtensionMode::ExplicitTail && tail.empty())
        throw ValidationError("--extension explicit_tail requires --tail FILE");

    ConstructResult result = construct_from_q2(q2, mode, opt.grid_n, std::move(tail));
    if (!result.warning.empty()) std::cerr << "warning: " << result.warning << "\n";

    std::ostringstream canonical;
    canonical << "cmd=construct potential=" << potential_id(result.spec)
              << " extension=" << opt.extension << " grid_n=" << opt.grid_n << " "
              << tolerance_text();

    Output out(opt.out);
    out.stream() << "# " << file_header(canonical.str()) << "\n"
                 << potential_to_json(result.spec);
    if (!opt.out.empty()) std::cerr << "wrote " << opt.out << "\n";
    return 0;
}

// ------------------------------------------------------------------ verify

struct VerifyOpts {
    std::string potential_path;
    RegionFlags region;
    IntegratorConfig cfg;
    bool text = false;
    std::string out;
};

int run_verify(const VerifyOpts& opt) {
    Potential q = load_potential(opt.potential_path);
    SearchRegion region = resolve_region(q, opt.region);

    VerificationReport rep = run_verification(q, region, opt.cfg);

    Output out(opt.out);
    if (opt.text) {
        out.stream() << report_to_text(rep);
    } else {
        out.stream() << "# " << file_header(rep.canonical_config) << "\n" << report_to_json(rep);
    }

    for (const auto& [name, verdict] : rep.verdicts)
        if (verdict.verdict == Verdict::Inconclusive) {
            std::cerr << "verdict '" << name << "' is inconclusive: " << verdict.explanation
                      << "\n";
            return 4;
        }
    return 0;
}

// ------------------------------------------------------------------ kernel

struct KernelOpts {
    std::string potential_path;
    int n = 256;
    double picard_tol = 1e-10;
    IntegratorConfig cfg;
    bool no_residual = false;
    std::string out;
};

int run_kernel(const KernelOpts& opt) {
    Potential q = load_potential(opt.potential_path);
    if (opt.n > 8192) throw ValidationError("--n must be at most 8192");

    KernelGrid K = solve_goursat(q, opt.n, opt.picard_tol);

    std::ostringstream canonical;
    canonical << "cmd=kernel potential=" << potential_id(q.spec()) << " n=" << opt.n
              << " picard_tol=" << fmt17(opt.picard_tol) << " " << integrator_text(opt.cfg)
              << " " << tolerance_text();

    std::cout << "# " << file_header(canonical.str()) << "\n";
    std::cout << "n=" << K.n << "\n";
    std::cout << "picard_iterations=" << K.picard_iterations << "\n";
    std::cout << "final_delta=" << fmt15(K.final_delta) << "\n";
    std::cout << "sup_abs=" << fmt15(K.sup_abs()) << "\n";

    if (!opt.no_residual) {
        // probe x must sit on the kernel mesh
        std::set<int> idx;
        for (int k = 1; k <= 8; ++k)
            idx.insert(std::max(1, static_cast<int>(std::lround(k * opt.n / 8.0))));
        std::vector<double> x_grid;
        for (int i : idx) x_grid.push_back(static_cast<double>(i) / opt.n);
        double resid =
            representation_residual(q, K, default_identity_grid(), x_grid, opt.cfg);
        std::cout << "representation_residual=" << fmt15(resid) << "\n";
    }

    if (!opt.out.empty()) {
        Output out(opt.out);
        write_kernel_csv(out.stream(), K, file_header(canonical.str()));
        std::cerr << "wrote " << opt.out << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral toolkit for Hill's equation with complex periodic potentials"};
    app.require_subcommand(1);

    SpectrumOpts spectrum_opts;
    CLI::App* spectrum = app.add_subcommand("spectrum", "locate eigenvalues of the boundary "
                                                        "and Floquet problems");
    spectrum->add_option("--potential", spectrum_opts.potential_path, "potential spec JSON file")
        ->required();
    spectrum->add_option("--tags", spectrum_opts.tags,
                         "comma separated problem tags (D,N,DN,ND,P,AP,*_half)");
    add_region_flags(spectrum, spectrum_opts.region, 4);
    add_integrator_flags(spectrum, spectrum_opts.cfg);
    spectrum->add_option("-o,--out", spectrum_opts.out, "output CSV file (default stdout)");

    DiscriminantOpts disc_opts;
    CLI::App* disc = app.add_subcommand("discriminant", "trace the discriminant along real mu "
                                                        "and map the zeros of trace^2 - 4");
    disc->add_option("--potential", disc_opts.potential_path, "potential spec JSON file")
        ->required();
    disc->add_option("--re", disc_opts.re, "real mu segment 'a..b'")->required();
    disc->add_option("--samples", disc_opts.samples, "number of trace sample points")
        ->check(CLI::Range(2, 100000));
    disc->add_option("--im", disc_opts.region.im,
                     "imaginary range 'a..b' for the zero map (default: norm heuristic)");
    disc->add_option("--bands", disc_opts.region.bands, "bands for the default zero map height")
        ->check(CLI::Range(1, 32));
    disc->add_flag("--no-zeros", disc_opts.no_zeros, "skip the zero map block");
    add_integrator_flags(disc, disc_opts.cfg);
    disc->add_option("-o,--out", disc_opts.out, "output CSV file (default stdout)");

    CheckOpts check_opts;
    CLI::App* check = app.add_subcommand("check", "evaluate factorization and reflection "
                                                  "condition residuals");
    check->add_option("--potential", check_opts.potential_path, "potential spec JSON file")
        ->required();
    check->add_option("--norm", check_opts.norm, "residual norm: l2 or sup");
    check->add_option("--tol", check_opts.tol, "verdict tolerance (default: kind dependent)");
    check->add_option("-o,--out", check_opts.out, "output JSON file (default stdout)");

    ConstructOpts construct_opts;
    CLI::App* construct = app.add_subcommand("construct", "build a potential from its odd "
                                                          "quarter-point part q2");
    construct->add_option("--q2", construct_opts.q2,
                          "'poly:c_k,...,c_0' (descending, complex like 2+1i) or 'samples:FILE'")
        ->required();
    construct->add_option("--extension", construct_opts.extension,
                          "half_period, reflect_about_half or explicit_tail");
    construct->add_option("--tail", construct_opts.tail_path,
                          "samples of q on [1/2,1] for explicit_tail, one per line");
    construct->add_option("--grid-n", construct_opts.grid_n, "grid intervals per period")
        ->check(CLI::Range(16, 65536));
    construct->add_option("-o,--out", construct_opts.out, "output potential JSON file")
        ->required();

    VerifyOpts verify_opts;
    CLI::App* verify = app.add_subcommand("verify", "run the full identity, spectra and "
                                                    "multiplicity verification");
    verify->add_option("--potential", verify_opts.potential_path, "potential spec JSON file")
        ->required();
    add_region_flags(verify, verify_opts.region, 2);
    add_integrator_flags(verify, verify_opts.cfg);
    verify->add_flag("--text", verify_opts.text, "human readable report instead of JSON");
    verify->add_option("-o,--out", verify_opts.out, "output file (default stdout)");

    KernelOpts kernel_opts;
    CLI::App* kernel = app.add_subcommand("kernel", "solve the transformation kernel Goursat "
                                                    "problem and test the representation");
    kernel->add_option("--potential", kernel_opts.potential_path, "potential spec JSON file")
        ->required();
    kernel->add_option("--n", kernel_opts.n, "characteristic mesh intervals");
    kernel->add_option("--picard-tol", kernel_opts.picard_tol, "sweep convergence threshold");
    kernel->add_flag("--no-residual", kernel_opts.no_residual,
                     "skip the representation residual probe");
    add_integrator_flags(kernel, kernel_opts.cfg);
    kernel->add_option("-o,--out", kernel_opts.out, "kernel node dump CSV file");

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(spectrum)) return run_spectrum(spectrum_opts);
        if (app.got_subcommand(disc)) return run_discriminant(disc_opts);
        if (app.got_subcommand(check)) return run_check(check_opts);
        if (app.got_subcommand(construct)) return run_construct(construct_opts);
        if (app.got_subcommand(verify)) return run_verify(verify_opts);
        if (app.got_subcommand(kernel)) return run_kernel(kernel_opts);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IntegrationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
