// Acceptance gate: one line per criterion, [PASS]/[FAIL], exit 1 on any
// failure. Tolerances are pinned here on purpose; loosening them is a
// deliberate act, not a config tweak.

#include "hillspec/errors.hpp"
#include "hillspec/harness.hpp"
#include "hillspec/kernel.hpp"
#include "hillspec/ode.hpp"
#include "hillspec/potential.hpp"
#include "hillspec/spectra.hpp"

#include "../oracles.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace hillspec;

namespace {

int failures = 0;

struct Checker {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

void run(const char* id, const char* text, const std::function<void(Checker&)>& body) {
    Checker c;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.ok = false;
        c.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s %s (%.1fs)\n", c.ok ? "PASS" : "FAIL", id, text, secs);
    if (!c.ok) {
        ++failures;
        std::printf("       %s\n", c.detail.c_str());
    }
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

SearchRegion box(double re_min, double re_max, double im_min = -5.0, double im_max = 5.0) {
    SearchRegion r;
    r.re_min = re_min;
    r.re_max = re_max;
    r.im_min = im_min;
    r.im_max = im_max;
    return r;
}

Potential bfam() {
    Q2Spec q2;
    q2.poly_coeffs = {{16.0, 0.0}, {-4.0, 0.0}};
    return Potential(construct_from_q2(q2, ExtensionMode::HalfPeriod).spec);
}

// ---- criterion bodies ----------------------------------------------------

void a01_free_floquet(Checker& c) {
    Potential q(PotentialSpec::zero());
    SpectrumReport p = find_eigenvalues(q, ProblemTag::P, box(-1.0, 170.0));
    auto want_p = oracle::free_periodic(170.0);
    c.require(p.eigenvalues.size() == want_p.size(),
              "periodic count " + std::to_string(p.eigenvalues.size()));
    if (!c.ok) return;
    for (std::size_t i = 0; i < want_p.size(); ++i) {
        const Eigenvalue& ev = p.eigenvalues[i];
        c.require(std::abs(ev.mu - want_p[i].mu) < 1e-8,
                  "periodic position error " + fmt(std::abs(ev.mu - want_p[i].mu)));
        c.require(ev.algebraic_order == want_p[i].order, "periodic order mismatch");
        c.require(ev.geometric_multiplicity.value_or(1) == want_p[i].order,
                  "periodic geometric multiplicity mismatch");
    }
    SpectrumReport ap = find_eigenvalues(q, ProblemTag::AP, box(-1.0, 170.0));
    auto want_ap = oracle::free_antiperiodic(170.0);
    c.require(ap.eigenvalues.size() == want_ap.size(),
              "anti-periodic count " + std::to_string(ap.eigenvalues.size()));
    if (!c.ok) return;
    for (std::size_t i = 0; i < want_ap.size(); ++i) {
        const Eigenvalue& ev = ap.eigenvalues[i];
        c.require(std::abs(ev.mu - want_ap[i].mu) < 1e-8,
                  "anti-periodic position error " + fmt(std::abs(ev.mu - want_ap[i].mu)));
        c.require(ev.geometric_multiplicity.value_or(1) == 2,
                  "anti-periodic geometric multiplicity mismatch");
    }
}

void a02_constant_shift(Checker& c) {
    for (Complex c0 : {Complex{3.0, 0.0}, Complex{2.0, 1.0}}) {
        Potential q(PotentialSpec::constant(c0));
        for (int k = 0; k < 20; ++k) {
            Complex mu = c0 + Complex{-4.0 + 8.0 * k, double(k % 5) - 2.0};
            Complex got = discriminant(q, mu).value;
            Complex want = oracle::free_discriminant(mu - c0);
            c.require(std::abs(got - want) < 1e-8,
                      "trace error " + fmt(std::abs(got - want)) + " at grid point " +
                          std::to_string(k));
        }
        if (!c.ok) return;

        SearchRegion region = box(-1.0 + c0.real(), 100.0 + c0.real(), -5.0 + c0.imag(),
                                  5.0 + c0.imag());
        auto check_tag = [&](ProblemTag tag, const std::vector<double>& base) {
            SpectrumReport rep = find_eigenvalues(q, tag, region, {});
            c.require(rep.eigenvalues.size() == base.size(),
                      tag_name(tag) + " count " + std::to_string(rep.eigenvalues.size()) +
                          " want " + std::to_string(base.size()));
            if (!c.ok) return;
            for (std::size_t i = 0; i < base.size(); ++i) {
                double err = std::abs(rep.eigenvalues[i].mu - (base[i] + c0));
                c.require(err < 1e-8, tag_name(tag) + " shift error " + fmt(err));
            }
        };
        check_tag(ProblemTag::D, oracle::free_dirichlet(100.0));
        check_tag(ProblemTag::N, oracle::free_neumann(100.0));
        std::vector<double> p_mus, ap_mus;
        for (auto e : oracle::free_periodic(100.0)) p_mus.push_back(e.mu);
        for (auto e : oracle::free_antiperiodic(100.0)) ap_mus.push_back(e.mu);
        check_tag(ProblemTag::P, p_mus);
        check_tag(ProblemTag::AP, ap_mus);
        if (!c.ok) return;
    }
}

void a03_wronskian_composition(Checker& c) {
    for (const PotentialSpec& spec : oracle::standard_family()) {
        Potential q(spec);
        for (Complex mu : oracle::probe_mu()) {
            TransferState full = monodromy(q, mu);
            double werr = std::abs(full.wronskian() - 1.0);
            c.require(werr < 1e-9, "wronskian error " + fmt(werr));

            TransferState left = transfer(q, mu, 0.0, 0.5);
            TransferState right = transfer(q, mu, 0.5, 1.0);
            Complex comp[4] = {right.c * left.c + right.s * left.cp,
                               right.cp * left.c + right.sp * left.cp,
                               right.c * left.s + right.s * left.sp,
                               right.cp * left.s + right.sp * left.sp};
            Complex direct[4] = {full.c, full.cp, full.s, full.sp};
            double scale = 1.0;
            for (Complex v : direct) scale = std::max(scale, std::abs(v));
            for (int i = 0; i < 4; ++i) {
                double err = std::abs(comp[i] - direct[i]) / scale;
                c.require(err < 1e-8, "composition error " + fmt(err));
            }
            if (!c.ok) return;
        }
    }
}

void a04_derivative_check(Checker& c) {
    for (const PotentialSpec& spec : oracle::standard_family()) {
        Potential q(spec);
        for (Complex mu : oracle::probe_mu()) {
            DiscriminantValue dv = discriminant(q, mu, {}, true);
            double h = 1e-5 * (1.0 + std::abs(mu));
            Complex fd = (discriminant(q, mu + h).value - discriminant(q, mu - h).value) /
                         (2.0 * h);
            double err = std::abs(*dv.derivative - fd) / std::max(1.0, std::abs(fd));
            c.require(err < 1e-4, "discriminant derivative error " + fmt(err));
            if (!c.ok) return;
        }
    }
}

void a05_condition_machinery(Checker& c) {
    for (auto coeffs : {std::vector<Complex>{{16.0, 0.0}, {-4.0, 0.0}},
                        std::vector<Complex>{{-2.0, 0.0}, {0.5, 0.0}},
                        std::vector<Complex>{{3.0, 2.0}, {-0.75, -0.5}}}) {
        Q2Spec q2;
        q2.poly_coeffs = coeffs;
        Potential q(construct_from_q2(q2, ExtensionMode::HalfPeriod).spec);
        double resid = residual_condition_b(q);
        c.require(resid < 1e-10, "constructed factorization residual " + fmt(resid));
    }

    for (const PotentialSpec& spec : oracle::standard_family()) {
        Potential q(spec);
        HalfDecomposition half = decompose_half(q);
        UnitDecomposition unit = decompose_unit(q);
        for (double x : {0.04, 0.21, 0.38, 0.47}) {
            double err = std::abs(half.q1(x) + half.q2(x) - q(x));
            c.require(err < 1e-12, "half reconstruction error " + fmt(err));
        }
        for (double x : {0.08, 0.42, 0.66, 0.94}) {
            double err = std::abs(unit.q1(x) + unit.q2(x) - q(x));
            c.require(err < 1e-12, "unit reconstruction error " + fmt(err));
        }
        if (!c.ok) return;
    }

    Potential cosq(PotentialSpec::fourier({0, 0}, {{1.0, 0.0}}, {}));
    Potential sinq(PotentialSpec::fourier({0, 0}, {}, {{1.0, 0.0}}));
    c.require(residual_symmetry(cosq, SymmetryScope::Half) > 1e-5,
              "cos half-symmetry control too small");
    c.require(residual_condition_b(cosq) > 1e-5, "cos factorization control too small");
    c.require(residual_symmetry(sinq, SymmetryScope::Unit) > 1e-5,
              "sin unit-symmetry control too small");
    c.require(residual_condition_bb(sinq) > 1e-5, "sin unit factorization control too small");
}

void a06_reflection_identity(Checker& c) {
    std::vector<Complex> grid = default_identity_grid();
    for (auto spec :
         {PotentialSpec::zero(), PotentialSpec::fourier({0, 0}, {}, {{1.0, 0.0}})}) {
        IdentityPair r = identity_residual_sym(Potential(spec), grid);
        c.require(r.at_half < 1e-7, "reflection identity residual " + fmt(r.at_half));
    }
    Potential cosq(PotentialSpec::fourier({0, 0}, {{1.0, 0.0}}, {}));
    IdentityPair r = identity_residual_sym(cosq, {Complex{1.0, 0.0}});
    c.require(r.at_half > 1e-2, "asymmetric control residual only " + fmt(r.at_half));
}

void a07_derivative_identity(Checker& c) {
    Potential q(PotentialSpec::zero());
    IdentityPair r = identity_residual_b(q, default_identity_grid());
    c.require(r.at_half < 1e-10, "free derivative identity residual " + fmt(r.at_half));

    Potential qb = bfam();
    VerificationReport rep = run_verification(qb, default_search_region(qb, 2));
    c.require(rep.identity_residuals.count("derivative_identity_half") == 1,
              "identity residual missing from the report");
    auto it = rep.verdicts.find("floquet_double_multiplicity");
    c.require(it != rep.verdicts.end(), "multiplicity verdict missing");
    if (it != rep.verdicts.end())
        c.require(it->second.verdict != Verdict::Inconclusive,
                  "multiplicity verdict inconclusive: " + it->second.explanation);
}

void a08_spectra_matching(Checker& c) {
    Potential cosq(PotentialSpec::fourier({0, 0}, {{1.0, 0.0}}, {}));
    MatchResult dn = spectra_equal(cosq, ProblemTag::DN, ProblemTag::ND, box(-1.0, 120.0), false);
    c.require(dn.cardinality_match, "cos mixed spectra counts differ");
    c.require(dn.distance < 1e-7, "cos mixed spectra distance " + fmt(dn.distance));

    Potential qb = bfam();
    NormalizationResult norm = normalize_to_zero(qb, ProblemTag::N, ShiftPick::NearestZero);
    MatchResult d_vs_n = spectra_equal(Potential(norm.spec), ProblemTag::D, ProblemTag::N,
                                       box(-1.0, 170.0), true);
    c.require(d_vs_n.cardinality_match, "quartic dirichlet/neumann counts differ");
    c.require(d_vs_n.distance < 1e-7,
              "quartic dirichlet/neumann distance " + fmt(d_vs_n.distance));

    Potential sinq(PotentialSpec::fourier({0, 0}, {}, {{1.0, 0.0}}));
    MatchResult bad_dn = spectra_equal(sinq, ProblemTag::DN, ProblemTag::ND, box(-1.0, 120.0),
                                       false);
    c.require(!bad_dn.cardinality_match || bad_dn.distance > 1e-4,
              "sin mixed spectra unexpectedly match");

    MatchResult bad_d_n = spectra_equal(cosq, ProblemTag::D, ProblemTag::N, box(-1.0, 120.0),
                                        true);
    c.require(!bad_d_n.cardinality_match || bad_d_n.distance > 1e-4,
              "cos dirichlet/neumann unexpectedly match");
}

void a09_gap_detection(Checker& c) {
    Potential cosq(PotentialSpec::fourier({0, 0}, {{1.0, 0.0}}, {}));
    SpectrumReport ap = find_eigenvalues(cosq, ProblemTag::AP, box(0.0, 30.0, -6.0, 6.0));
    c.require(ap.eigenvalues.size() == 2,
              "first anti-periodic pair count " + std::to_string(ap.eigenvalues.size()));
    if (!c.ok) return;
    c.require(ap.eigenvalues[0].algebraic_order == 1 && ap.eigenvalues[1].algebraic_order == 1,
              "pair not simple");
    double gap = std::abs(ap.eigenvalues[1].mu - ap.eigenvalues[0].mu);
    c.require(gap > 1e-2, "gap width " + fmt(gap));
}

void a10_kernel(Checker& c) {
    Potential zero(PotentialSpec::zero());
    KernelGrid k0 = solve_goursat(zero, 64);
    c.require(k0.sup_abs() <= 1e-12, "free kernel magnitude " + fmt(k0.sup_abs()));

    Potential one(PotentialSpec::constant({1.0, 0.0}));
    auto mesh_x = [](int n) {
        std::vector<double> out;
        for (int k = 1; k <= 8; ++k) out.push_back(double(k * n / 8) / n);
        return out;
    };
    KernelGrid k128 = solve_goursat(one, 128);
    KernelGrid k256 = solve_goursat(one, 256);
    double r128 = representation_residual(one, k128, default_identity_grid(), mesh_x(128));
    double r256 = representation_residual(one, k256, default_identity_grid(), mesh_x(256));
    c.require(r256 < 5e-4, "representation residual " + fmt(r256));
    double order = std::log2(r128 / r256);
    c.require(order > 1.7 && order < 2.3, "halving order " + fmt(order));
}

void a11_cli_determinism(Checker& c) {
    char tmpl[] = "/tmp/hillspec_accept_XXXXXX";
    if (!mkdtemp(tmpl)) {
        c.require(false, "mkdtemp failed");
        return;
    }
    std::string dir = tmpl;
    {
        std::ofstream out(dir + "/zero.json");
        out << R"({"kind": "zero"})";
    }
    auto run_verify = [&](const std::string& out_name) {
        std::string cmd = std::string(HILLSPEC_CLI_PATH) + " verify --potential " + dir +
                          "/zero.json --bands 1 -o " + dir + "/" + out_name + " > /dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    };
    int code_a = run_verify("a.json");
    int code_b = run_verify("b.json");
    c.require(code_a == 0 && code_b == 0,
              "verify exit codes " + std::to_string(code_a) + ", " + std::to_string(code_b));

    auto slurp = [](const std::string& p) {
        std::ifstream in(p);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    std::string a = slurp(dir + "/a.json");
    std::string b = slurp(dir + "/b.json");
    c.require(!a.empty(), "verify wrote no output");
    c.require(a == b, "verify outputs differ between runs");
    c.require(a.rfind("# hillspec 0.1.0", 0) == 0, "version header not pinned");
    int rc_cleanup = std::system(("rm -rf " + dir).c_str());
    (void)rc_cleanup;
}

} // namespace

int main() {
    std::printf("acceptance suite, tolerances pinned in code\n");

    run("A01", "free potential floquet spectrum with orders and multiplicities",
        a01_free_floquet);
    run("A02", "constant potentials reduce to the spectral shift", a02_constant_shift);
    run("A03", "wronskian and half-interval composition across the family",
        a03_wronskian_composition);
    run("A04", "discriminant mu-derivative matches central differences", a04_derivative_check);
    run("A05", "factorization construction, decomposition and negative controls",
        a05_condition_machinery);
    run("A06", "midpoint reflection identity and its asymmetric control",
        a06_reflection_identity);
    run("A07", "midpoint derivative identity and a definite multiplicity verdict",
        a07_derivative_identity);
    run("A08", "spectra matching for symmetric and factorized potentials",
        a08_spectra_matching);
    run("A09", "open anti-periodic gap resolves into two simple zeros", a09_gap_detection);
    run("A10", "transformation kernel accuracy and convergence order", a10_kernel);
    run("A11", "verification output is byte-identical across runs", a11_cli_determinism);

    if (failures) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
