#pragma once

#include "hillspec/ode.hpp"
#include "hillspec/potential.hpp"
#include "hillspec/spectra.hpp"

#include <map>
#include <string>
#include <vector>

namespace hillspec {

// Residuals of an identity evaluated at x = 1/2 and, through the periodic
// extension of q, at x = 3/2.
struct IdentityPair {
    double at_half = 0.0;
    double at_three_half = 0.0;
};

// max over mu_grid of |c'(x,mu) + mu s(x,mu)|. Vanishes identically for
// potentials in the normalized gauge that satisfy the half-interval
// factorization condition; for anything else it is an honest measurement.
IdentityPair identity_residual_b(const Potential& q_normalized,
                                 const std::vector<Complex>& mu_grid,
                                 const IntegratorConfig& cfg = {});

// max over mu_grid of |c(x,mu) - s'(x,mu)|. Vanishes iff q(x) = q(1/2 - x).
IdentityPair identity_residual_sym(const Potential& q, const std::vector<Complex>& mu_grid,
                                   const IntegratorConfig& cfg = {});

// 16 probe points: 8 equally spaced on [0, 100] and 8 on the circle
// |mu| = 20. An entire-function identity that holds here to 1e-8 is taken as
// holding identically.
std::vector<Complex> default_identity_grid();

// At each zero mu_n of c'(1,.) the first column of the monodromy matrix is
// (c(1), 0); if also s(1, mu_n) = 0 the matrix is diagonal and both
// fundamental solutions factorize under the unit shift:
//   c(x+1) = c(1) c(x),   s(x+1) = s'(1) s(x).
struct FactorizationRow {
    Complex mu;
    double s1_abs = 0.0;        // |s(1, mu)|
    bool premise_met = false;   // s1_abs below the identity tolerance
    double residual = 0.0;      // max shift-factorization mismatch, premise rows only
};
std::vector<FactorizationRow> monodromy_factorization_check(const Potential& q,
                                                            const SearchRegion& region,
                                                            const IntegratorConfig& cfg = {});

// At the same diagonal-monodromy points the Wronskian forces
// s'(1) c(1) = 1, and the trace lies on the discriminant curve, so the pair
// (|s'(1)c(1) - 1|, |s'(1) - c(1)|) measures how far the point is from a
// true periodic/anti-periodic double eigenvalue.
struct ProductRow {
    Complex mu;
    double product_residual = 0.0;   // |s'(1)c(1) - 1|
    double equality_residual = 0.0;  // |s'(1) - c(1)|
};
std::vector<ProductRow> product_identity_check(const Potential& q, const SearchRegion& region,
                                               const IntegratorConfig& cfg = {});

// Greedy nearest-neighbor matching of two eigenvalue sets, eigenvalues
// repeated by algebraic order. Both sets are truncated at
// re_max - pi sqrt(max(1, re_max)) so a pair straddling the region edge is
// dropped or kept as a whole. Cardinality mismatch gives distance infinity.
struct MatchResult {
    double distance = 0.0;
    int count_a = 0;
    int count_b = 0;
    bool cardinality_match = true;
    bool ambiguous = false;  // unresolved boxes in either search
};
MatchResult spectra_equal(const Potential& q, ProblemTag tag_a, ProblemTag tag_b,
                          const SearchRegion& region, bool exclude_zero,
                          const IntegratorConfig& cfg = {});

enum class Verdict { Consistent, Violated, Inconclusive };
std::string verdict_name(Verdict v);

struct DoublenessRow {
    Complex mu;  // in the normalized gauge; add the recorded shift to recover the input gauge
    int algebraic_order = 1;
    int geometric_multiplicity = 1;
    double monodromy_residual = 0.0;
    bool near_double = false;
    bool is_lowest = false;
};

// Measurement of the multiplicity-two claim: the potential is shifted so the
// lowest half-interval Neumann eigenvalue sits at zero, the half-interval
// factorization and reflection conditions are evaluated in that gauge, and
// every periodic/anti-periodic eigenvalue in the region is classified by
// geometric multiplicity. The verdict is a pure function of the recorded
// numbers: conditions and full doubleness (of one of the two families,
// lowest periodic eigenvalue exempt) must agree, with near-double clusters
// or unresolved boxes forcing "inconclusive".
struct DoublenessReport {
    Complex shift{0.0, 0.0};
    double b_residual = 0.0;
    double sym_half_residual = 0.0;
    double condition_tolerance = 0.0;
    bool conditions_hold = false;
    std::vector<DoublenessRow> p_rows, ap_rows;
    bool p_all_double = false;
    bool ap_all_double = false;
    bool ambiguous = false;
    Verdict verdict = Verdict::Inconclusive;
    std::string explanation;
};
DoublenessReport doubleness_report(const Potential& q, const SearchRegion& region,
                                   const IntegratorConfig& cfg = {});

struct TheoremVerdict {
    Verdict verdict = Verdict::Inconclusive;
    std::string explanation;
};

struct VerificationReport {
    std::string potential_id;
    std::string canonical_config;
    ConditionReport condition_report;  // input gauge
    std::map<std::string, double> identity_residuals;
    std::map<std::string, MatchResult> spectra_matches;
    DoublenessReport doubleness;
    std::map<std::string, TheoremVerdict> verdicts;
};

// Runs every check against one potential. Deterministic: identical input
// and config give a byte-identical serialized report.
VerificationReport run_verification(const Potential& q, const SearchRegion& region,
                                    const IntegratorConfig& cfg = {});

std::string report_to_json(const VerificationReport& report);
std::string report_to_text(const VerificationReport& report);

} // namespace hillspec
