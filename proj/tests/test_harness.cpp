#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hillspec/harness.hpp"
#include "hillspec/potential.hpp"

#include "oracles.hpp"

#include <cmath>
#include <complex>

using namespace hillspec;

namespace {

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

} // namespace

TEST_CASE("identity grid has the documented layout") {
    std::vector<Complex> grid = default_identity_grid();
    REQUIRE(grid.size() == 16);
    for (int k = 0; k < 8; ++k) {
        CHECK(grid[k].imag() == 0.0);
        CHECK(grid[k].real() >= 0.0);
        CHECK(grid[k].real() <= 100.0);
    }
    for (int k = 8; k < 16; ++k) CHECK(std::abs(std::abs(grid[k]) - 20.0) < 1e-12);
}

TEST_CASE("reflection identity holds for half-symmetric potentials") {
    std::vector<Complex> grid = default_identity_grid();
    // q = 0 and q = sin 2 pi x are symmetric about 1/4 on the half cell
    for (auto spec : {PotentialSpec::zero(),
                      PotentialSpec::fourier({0, 0}, {}, {{1.0, 0.0}})}) {
        IdentityPair r = identity_residual_sym(Potential(spec), grid);
        CHECK(r.at_half < 1e-7);
        CHECK(r.at_three_half < 1e-7);
    }
}

TEST_CASE("reflection identity fails for the asymmetric control") {
    Potential cosq(PotentialSpec::fourier({0, 0}, {{1.0, 0.0}}, {}));
    IdentityPair r = identity_residual_sym(cosq, {Complex{1.0, 0.0}});
    CHECK(r.at_half > 1e-2);
}

TEST_CASE("derivative identity vanishes for the free potential") {
    Potential q(PotentialSpec::zero());
    IdentityPair r = identity_residual_b(q, default_identity_grid());
    CHECK(r.at_half < 1e-10);
    // the shifted probe runs to x = 3/2 where states on the |mu| = 20 circle
    // have grown by two orders, so the absolute residual is looser
    CHECK(r.at_three_half < 1e-7);
}

TEST_CASE("mixed spectra coincide for a unit-symmetric potential") {
    Potential cosq(PotentialSpec::fourier({0, 0}, {{1.0, 0.0}}, {}));
    MatchResult m = spectra_equal(cosq, ProblemTag::DN, ProblemTag::ND, box(-1.0, 120.0), false);
    CHECK(m.cardinality_match);
    CHECK(!m.ambiguous);
    CHECK(m.distance < 1e-7);
}

TEST_CASE("mixed spectra separate without the symmetry") {
    Potential sinq(PotentialSpec::fourier({0, 0}, {}, {{1.0, 0.0}}));
    MatchResult m = spectra_equal(sinq, ProblemTag::DN, ProblemTag::ND, box(-1.0, 120.0), false);
    if (m.cardinality_match) CHECK(m.distance > 1e-4);
}

TEST_CASE("dirichlet equals neumann away from zero for the factorized quartic") {
    Potential q = bfam();
    NormalizationResult norm = normalize_to_zero(q, ProblemTag::N, ShiftPick::NearestZero);
    MatchResult m = spectra_equal(Potential(norm.spec), ProblemTag::D, ProblemTag::N,
                                  box(-1.0, 170.0), true);
    CHECK(m.cardinality_match);
    CHECK(m.distance < 1e-7);

    // control: for cos 2 pi x the dirichlet and neumann spectra disagree
    Potential cosq(PotentialSpec::fourier({0, 0}, {{1.0, 0.0}}, {}));
    MatchResult bad = spectra_equal(cosq, ProblemTag::D, ProblemTag::N, box(-1.0, 120.0), true);
    bool fails = !bad.cardinality_match || bad.distance > 1e-4;
    CHECK(fails);
}

TEST_CASE("monodromy factorization premise follows the dirichlet overlap") {
    Potential q(PotentialSpec::zero());
    auto rows = monodromy_factorization_check(q, box(-1.0, 100.0));
    REQUIRE(!rows.empty());
    // zeros of c'(1): mu = 0 (s(1) = 1, premise fails) and k^2 pi^2 (premise holds)
    int met = 0;
    for (const auto& row : rows) {
        if (std::abs(row.mu) < 1.0) {
            CHECK(!row.premise_met);
        } else {
            CHECK(row.premise_met);
            CHECK(row.residual < 1e-7);
            ++met;
        }
    }
    CHECK(met >= 3);
}

TEST_CASE("product identity holds at the diagonal monodromy points") {
    Potential q(PotentialSpec::zero());
    auto rows = product_identity_check(q, box(-1.0, 100.0));
    REQUIRE(!rows.empty());
    for (const auto& row : rows) {
        if (std::abs(row.mu) < 1.0) continue; // s(1) != 0 there
        CHECK(row.product_residual < 1e-7);
        CHECK(row.equality_residual < 1e-7);
    }
}

TEST_CASE("doubleness report classifies the free potential") {
    Potential q(PotentialSpec::zero());
    DoublenessReport rep = doubleness_report(q, box(-1.0, 170.0));
    CHECK(rep.conditions_hold);
    CHECK(rep.p_all_double);
    CHECK(rep.ap_all_double);
    CHECK(!rep.ambiguous);
    CHECK(rep.verdict == Verdict::Consistent);
    CHECK(std::abs(rep.shift) < 1e-7);
    REQUIRE(rep.p_rows.size() == 3);
    CHECK(rep.p_rows[0].is_lowest);
    CHECK(rep.p_rows[0].geometric_multiplicity == 1);
    CHECK(rep.p_rows[1].geometric_multiplicity == 2);
}

TEST_CASE("doubleness report stays consistent for an open-gap potential") {
    // cos 2 pi x satisfies neither condition and has simple anti-periodic
    // zeros, so both sides of the equivalence are false
    Potential cosq(PotentialSpec::fourier({0, 0}, {{1.0, 0.0}}, {}));
    DoublenessReport rep = doubleness_report(cosq, box(-1.0, 60.0, -6.0, 6.0));
    CHECK(!rep.conditions_hold);
    CHECK(!rep.ap_all_double);
    CHECK(rep.verdict == Verdict::Consistent);
}

TEST_CASE("verification runs end to end and is deterministic") {
    Potential q(PotentialSpec::zero());
    SearchRegion region = default_search_region(q, 1);
    VerificationReport a = run_verification(q, region);
    VerificationReport b = run_verification(q, region);
    CHECK(report_to_json(a) == report_to_json(b));
    CHECK(!a.canonical_config.empty());
    CHECK(a.verdicts.size() == 3);
    for (const auto& [name, v] : a.verdicts) {
        INFO(name);
        CHECK(v.verdict == Verdict::Consistent);
    }
}

TEST_CASE("verification text and json renderings carry the verdicts") {
    Potential q(PotentialSpec::zero());
    VerificationReport rep = run_verification(q, default_search_region(q, 1));
    std::string json = report_to_json(rep);
    std::string text = report_to_text(rep);
    for (const char* key :
         {"dirichlet_neumann_exchange", "floquet_double_multiplicity",
          "mixed_spectra_reflection"}) {
        CHECK(json.find(key) != std::string::npos);
        CHECK(text.find(key) != std::string::npos);
    }
    CHECK(json.find("\"verdict\": \"consistent\"") != std::string::npos);
}
