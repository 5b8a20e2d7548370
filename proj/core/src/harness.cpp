#include "hillspec/harness.hpp"

#include "hillspec/errors.hpp"
#include "hillspec/version.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace hillspec {

namespace {
constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}
} // namespace

IdentityPair identity_residual_b(const Potential& q_normalized,
                                 const std::vector<Complex>& mu_grid,
                                 const IntegratorConfig& cfg) {
    IdentityPair out;
    for (Complex mu : mu_grid) {
        TransferState a = transfer(q_normalized, mu, 0.0, 0.5, cfg, false);
        TransferState b = transfer(q_normalized, mu, 0.0, 1.5, cfg, false);
        out.at_half = std::max(out.at_half, std::abs(a.cp + mu * a.s));
        out.at_three_half = std::max(out.at_three_half, std::abs(b.cp + mu * b.s));
    }
    return out;
}

IdentityPair identity_residual_sym(const Potential& q, const std::vector<Complex>& mu_grid,
                                   const IntegratorConfig& cfg) {
    IdentityPair out;
    for (Complex mu : mu_grid) {
        TransferState a = transfer(q, mu, 0.0, 0.5, cfg, false);
        TransferState b = transfer(q, mu, 0.0, 1.5, cfg, false);
        out.at_half = std::max(out.at_half, std::abs(a.c - a.sp));
        out.at_three_half = std::max(out.at_three_half, std::abs(b.c - b.sp));
    }
    return out;
}

std::vector<Complex> default_identity_grid() {
    std::vector<Complex> grid;
    grid.reserve(16);
    for (int k = 0; k < 8; ++k) grid.emplace_back(100.0 * k / 7.0, 0.0);
    for (int k = 0; k < 8; ++k) {
        double th = 2.0 * kPi * k / 8.0;
        grid.emplace_back(20.0 * std::cos(th), 20.0 * std::sin(th));
    }
    return grid;
}

std::vector<FactorizationRow> monodromy_factorization_check(const Potential& q,
                                                            const SearchRegion& region,
                                                            const IntegratorConfig& cfg) {
    SpectrumReport neumann = find_eigenvalues(q, ProblemTag::N, region, cfg);
    std::vector<FactorizationRow> rows;
    rows.reserve(neumann.eigenvalues.size());
    for (const Eigenvalue& ev : neumann.eigenvalues) {
        FactorizationRow row;
        row.mu = ev.mu;
        TransferState m = monodromy(q, ev.mu, cfg);
        row.s1_abs = std::abs(m.s);
        row.premise_met = row.s1_abs < tol::identity;
        if (row.premise_met) {
            double worst = 0.0;
            for (int k = 0; k <= 16; ++k) {
                double x = k / 16.0;
                TransferState base = transfer(q, ev.mu, 0.0, x, cfg, false);
                TransferState shifted = transfer(q, ev.mu, 0.0, x + 1.0, cfg, false);
                worst = std::max(worst, std::abs(shifted.c - m.c * base.c));
                worst = std::max(worst, std::abs(shifted.s - m.sp * base.s));
            }
            row.residual = worst;
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<ProductRow> product_identity_check(const Potential& q, const SearchRegion& region,
                                               const IntegratorConfig& cfg) {
    SpectrumReport neumann = find_eigenvalues(q, ProblemTag::N, region, cfg);
    std::vector<ProductRow> rows;
    for (const Eigenvalue& ev : neumann.eigenvalues) {
        TransferState m = monodromy(q, ev.mu, cfg);
        if (std::abs(m.s) >= tol::identity) continue;
        ProductRow row;
        row.mu = ev.mu;
        row.product_residual = std::abs(m.sp * m.c - 1.0);
        row.equality_residual = std::abs(m.sp - m.c);
        rows.push_back(row);
    }
    return rows;
}

namespace {

// Eigenvalues repeated by algebraic order, filtered and sorted for matching.
std::vector<Complex> matching_set(const SpectrumReport& report, bool exclude_zero,
                                  double re_cut) {
    std::vector<Complex> mus;
    for (const Eigenvalue& ev : report.eigenvalues) {
        if (exclude_zero && std::abs(ev.mu) < 1e-6) continue;
        if (ev.mu.real() > re_cut) continue;
        for (int k = 0; k < ev.algebraic_order; ++k) mus.push_back(ev.mu);
    }
    std::sort(mus.begin(), mus.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return mus;
}

MatchResult match_reports(const SpectrumReport& ra, const SpectrumReport& rb, bool exclude_zero,
                          const SearchRegion& region) {
    double re_cut = region.re_max - kPi * std::sqrt(std::max(1.0, region.re_max));
    std::vector<Complex> a = matching_set(ra, exclude_zero, re_cut);
    std::vector<Complex> b = matching_set(rb, exclude_zero, re_cut);

    MatchResult out;
    out.count_a = static_cast<int>(a.size());
    out.count_b = static_cast<int>(b.size());
    out.ambiguous = !ra.unresolved.empty() || !rb.unresolved.empty();
    if (a.size() != b.size()) {
        out.cardinality_match = false;
        out.distance = std::numeric_limits<double>::infinity();
        return out;
    }
    std::vector<bool> used(b.size(), false);
    for (Complex mu : a) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            double d = std::abs(mu - b[j]);
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        used[best_j] = true;
        out.distance = std::max(out.distance, best);
    }
    return out;
}

} // namespace

MatchResult spectra_equal(const Potential& q, ProblemTag tag_a, ProblemTag tag_b,
                          const SearchRegion& region, bool exclude_zero,
                          const IntegratorConfig& cfg) {
    SpectrumReport ra = find_eigenvalues(q, tag_a, region, cfg);
    SpectrumReport rb = find_eigenvalues(q, tag_b, region, cfg);
    return match_reports(ra, rb, exclude_zero, region);
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Consistent: return "consistent";
        case Verdict::Violated: return "violated";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

DoublenessRow make_row(const Eigenvalue& ev) {
    DoublenessRow row;
    row.mu = ev.mu;
    row.algebraic_order = ev.algebraic_order;
    row.geometric_multiplicity = ev.geometric_multiplicity.value_or(1);
    row.monodromy_residual = ev.monodromy_residual.value_or(0.0);
    row.near_double = ev.near_double;
    row.is_lowest = ev.is_lowest;
    return row;
}

SearchRegion shift_region(const SearchRegion& r, Complex shift) {
    SearchRegion out = r;
    out.re_min -= shift.real();
    out.re_max -= shift.real();
    out.im_min -= shift.imag();
    out.im_max -= shift.imag();
    return out;
}

DoublenessReport doubleness_impl(const NormalizationResult& norm, const SearchRegion& region,
                                 const IntegratorConfig& cfg) {
    DoublenessReport rep;
    rep.shift = norm.shift;
    Potential qn(norm.spec);
    rep.b_residual = residual_condition_b(qn, NormKind::L2);
    rep.sym_half_residual = residual_symmetry(qn, SymmetryScope::Half, NormKind::L2);
    rep.condition_tolerance = default_condition_tolerance(qn);
    rep.conditions_hold = rep.b_residual < rep.condition_tolerance ||
                          rep.sym_half_residual < rep.condition_tolerance;

    SearchRegion shifted = shift_region(region, norm.shift);
    SpectrumReport p = find_eigenvalues(qn, ProblemTag::P, shifted, cfg);
    SpectrumReport ap = find_eigenvalues(qn, ProblemTag::AP, shifted, cfg);

    rep.p_all_double = true;
    rep.ap_all_double = true;
    for (const Eigenvalue& ev : p.eigenvalues) {
        rep.p_rows.push_back(make_row(ev));
        if (!ev.is_lowest && ev.geometric_multiplicity.value_or(1) != 2)
            rep.p_all_double = false;
        if (ev.near_double) rep.ambiguous = true;
    }
    for (const Eigenvalue& ev : ap.eigenvalues) {
        rep.ap_rows.push_back(make_row(ev));
        if (ev.geometric_multiplicity.value_or(1) != 2) rep.ap_all_double = false;
        if (ev.near_double) rep.ambiguous = true;
    }
    if (!p.unresolved.empty() || !ap.unresolved.empty()) rep.ambiguous = true;

    bool claim = rep.p_all_double || rep.ap_all_double;
    std::ostringstream os;
    os << "conditions " << (rep.conditions_hold ? "hold" : "fail") << " (factorization residual "
       << fmt("%.3e", rep.b_residual) << ", reflection residual "
       << fmt("%.3e", rep.sym_half_residual) << ", tolerance "
       << fmt("%.3e", rep.condition_tolerance) << ", gauge shift re "
       << fmt("%.6e", rep.shift.real()) << "); non-lowest periodic eigenvalues "
       << (rep.p_all_double ? "all double" : "not all double") << ", anti-periodic "
       << (rep.ap_all_double ? "all double" : "not all double");
    if (rep.ambiguous) {
        rep.verdict = Verdict::Inconclusive;
        os << "; near-double clusters or unresolved boxes prevent a verdict";
    } else {
        rep.verdict = claim == rep.conditions_hold ? Verdict::Consistent : Verdict::Violated;
    }
    rep.explanation = os.str();
    return rep;
}

std::string kind_label(PotentialKind k) {
    switch (k) {
        case PotentialKind::Zero: return "zero";
        case PotentialKind::Constant: return "constant";
        case PotentialKind::Fourier: return "fourier";
        case PotentialKind::PolynomialPiece: return "polynomial";
        case PotentialKind::Samples: return "samples";
        case PotentialKind::BFamily: return "b_family";
    }
    return "?";
}

std::string region_text(const SearchRegion& r) {
    std::ostringstream os;
    os << "re=" << fmt("%.17g", r.re_min) << ".." << fmt("%.17g", r.re_max)
       << " im=" << fmt("%.17g", r.im_min) << ".." << fmt("%.17g", r.im_max);
    return os.str();
}

} // namespace

DoublenessReport doubleness_report(const Potential& q, const SearchRegion& region,
                                   const IntegratorConfig& cfg) {
    return doubleness_impl(normalize_half_neumann(q, cfg), region, cfg);
}

VerificationReport run_verification(const Potential& q, const SearchRegion& region,
                                    const IntegratorConfig& cfg) {
    region.validate();
    cfg.validate();

    VerificationReport r;
    r.potential_id = kind_label(q.spec().kind) + "-" + config_hash(q.spec().canonical());
    {
        std::ostringstream os;
        os << "rel_tol=" << fmt("%.17g", cfg.rel_tol) << " abs_tol=" << fmt("%.17g", cfg.abs_tol)
           << " max_step=" << fmt("%.17g", cfg.max_step)
           << " min_steps_per_wave=" << cfg.min_steps_per_wave << " " << region_text(region);
        r.canonical_config = os.str();
    }

    r.condition_report = evaluate_conditions(q, NormKind::L2);

    NormalizationResult norm = normalize_half_neumann(q, cfg);
    Potential qn(norm.spec);
    std::vector<Complex> grid = default_identity_grid();
    IdentityPair b = identity_residual_b(qn, grid, cfg);
    IdentityPair sym = identity_residual_sym(q, grid, cfg);
    r.identity_residuals["derivative_identity_half"] = b.at_half;
    r.identity_residuals["derivative_identity_shifted"] = b.at_three_half;
    r.identity_residuals["reflection_identity_half"] = sym.at_half;
    r.identity_residuals["reflection_identity_shifted"] = sym.at_three_half;

    SpectrumReport rep_d = find_eigenvalues(q, ProblemTag::D, region, cfg);
    SpectrumReport rep_n = find_eigenvalues(q, ProblemTag::N, region, cfg);
    SpectrumReport rep_dn = find_eigenvalues(q, ProblemTag::DN, region, cfg);
    SpectrumReport rep_nd = find_eigenvalues(q, ProblemTag::ND, region, cfg);
    MatchResult m_dn_nd = match_reports(rep_dn, rep_nd, false, region);
    MatchResult m_d_n = match_reports(rep_d, rep_n, true, region);
    r.spectra_matches["dirichlet_vs_neumann_except_zero"] = m_d_n;
    r.spectra_matches["mixed_dn_vs_nd"] = m_dn_nd;

    bool zero_in_neumann = false;
    for (const Eigenvalue& ev : rep_n.eigenvalues)
        if (std::abs(ev.mu) < 1e-6) zero_in_neumann = true;

    r.doubleness = doubleness_impl(norm, region, cfg);

    // Each verdict restates one equivalence: measured spectral statement on
    // the left, measured potential condition on the right.
    {
        TheoremVerdict v;
        bool left = m_dn_nd.cardinality_match && m_dn_nd.distance < tol::verdict;
        bool right = r.condition_report.symmetric_unit;
        std::ostringstream os;
        os << "mixed-condition spectra "
           << (m_dn_nd.cardinality_match
                   ? "match to " + fmt("%.3e", m_dn_nd.distance)
                   : "differ in count (" + std::to_string(m_dn_nd.count_a) + " vs " +
                         std::to_string(m_dn_nd.count_b) + ")")
           << "; unit reflection residual " << fmt("%.3e", r.condition_report.residual_sym_unit);
        if (m_dn_nd.ambiguous) {
            v.verdict = Verdict::Inconclusive;
            os << "; unresolved boxes prevent a verdict";
        } else {
            v.verdict = left == right ? Verdict::Consistent : Verdict::Violated;
        }
        v.explanation = os.str();
        r.verdicts["mixed_spectra_reflection"] = v;
    }
    {
        TheoremVerdict v;
        bool left = m_d_n.cardinality_match && m_d_n.distance < tol::verdict && zero_in_neumann;
        bool right = r.condition_report.condition_bb_holds;
        std::ostringstream os;
        os << "dirichlet/neumann spectra away from zero "
           << (m_d_n.cardinality_match
                   ? "match to " + fmt("%.3e", m_d_n.distance)
                   : "differ in count (" + std::to_string(m_d_n.count_a) + " vs " +
                         std::to_string(m_d_n.count_b) + ")")
           << "; zero " << (zero_in_neumann ? "is" : "is not") << " a neumann eigenvalue"
           << "; unit factorization residual " << fmt("%.3e", r.condition_report.residual_bb);
        if (m_d_n.ambiguous) {
            v.verdict = Verdict::Inconclusive;
            os << "; unresolved boxes prevent a verdict";
        } else {
            v.verdict = left == right ? Verdict::Consistent : Verdict::Violated;
        }
        v.explanation = os.str();
        r.verdicts["dirichlet_neumann_exchange"] = v;
    }
    r.verdicts["floquet_double_multiplicity"] =
        TheoremVerdict{r.doubleness.verdict, r.doubleness.explanation};

    return r;
}

} // namespace hillspec
