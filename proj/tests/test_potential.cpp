#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hillspec/errors.hpp"
#include "hillspec/potential.hpp"

#include "oracles.hpp"

#include <cmath>
#include <complex>

using namespace hillspec;

namespace {
double cabs(Complex z) { return std::abs(z); }
} // namespace

TEST_CASE("spec validation rejects bad parameters") {
    PotentialSpec s = PotentialSpec::zero();
    s.grid_n = 8;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s.grid_n = 17;
    CHECK_THROWS_AS(s.validate(), ValidationError);

    PotentialSpec samples = PotentialSpec::sampled(std::vector<Complex>(10), 256);
    CHECK_THROWS_AS(samples.validate(), ValidationError);

    PotentialSpec b;
    b.kind = PotentialKind::BFamily;
    CHECK_THROWS_AS(b.validate(), ValidationError);
    b.q2_coeffs = {{16.0, 0.0}, {-4.0, 0.0}};
    CHECK_NOTHROW(b.validate());
    b.extension = ExtensionMode::ExplicitTail;
    CHECK_THROWS_AS(b.validate(), ValidationError); // tail missing
}

TEST_CASE("evaluation matches the defining formulas") {
    Potential c(PotentialSpec::constant({2.0, 1.0}));
    CHECK(cabs(c(0.3) - Complex{2.0, 1.0}) == 0.0);

    Potential f(PotentialSpec::fourier({0.5, 0.0}, {{1.0, 0.0}, {0.0, 2.0}}, {{3.0, 0.0}}));
    for (double x : {0.0, 0.2, 0.7}) {
        Complex want = Complex{0.5, 0.0} + std::cos(2 * oracle::pi * x) +
                       Complex{0.0, 2.0} * std::cos(4 * oracle::pi * x) +
                       3.0 * std::sin(2 * oracle::pi * x);
        CHECK(cabs(f(x) - want) < 1e-14);
    }

    Potential p(PotentialSpec::polynomial({{2.0, 0.0}, {0.0, 0.0}, {-1.0, 0.0}}));
    CHECK(cabs(p(0.5) - Complex{-0.5, 0.0}) < 1e-15); // 2 x^2 - 1 at 1/2
}

TEST_CASE("evaluation is periodic with period one") {
    for (const PotentialSpec& spec : oracle::standard_family()) {
        Potential q(spec);
        for (double x : {0.1, 0.37, 0.93}) {
            CHECK(cabs(q(x + 1.0) - q(x)) < 1e-12);
            CHECK(cabs(q(x - 1.0) - q(x)) < 1e-12);
        }
    }
}

TEST_CASE("sampled potentials interpolate linearly") {
    int n = 16;
    std::vector<Complex> v(n + 1);
    for (int j = 0; j <= n; ++j) v[j] = Complex{double(j), -2.0 * j};
    Potential q(PotentialSpec::sampled(v, n));
    double x = 3.5 / n;
    CHECK(cabs(q(x) - Complex{3.5, -7.0}) < 1e-13);
}

TEST_CASE("json round trip preserves every kind") {
    for (const PotentialSpec& spec : oracle::standard_family()) {
        PotentialSpec back = potential_from_json(potential_to_json(spec));
        CHECK(back.canonical() == spec.canonical());
    }
    PotentialSpec tail_spec;
    tail_spec.kind = PotentialKind::BFamily;
    tail_spec.grid_n = 32;
    tail_spec.extension = ExtensionMode::ExplicitTail;
    tail_spec.q2_coeffs = {{4.0, 0.0}, {-1.0, 0.0}};
    tail_spec.tail.assign(17, Complex{0.25, -0.5});
    PotentialSpec back = potential_from_json(potential_to_json(tail_spec));
    CHECK(back.canonical() == tail_spec.canonical());
}

TEST_CASE("json parsing rejects malformed input") {
    CHECK_THROWS_AS(potential_from_json("not json"), ValidationError);
    CHECK_THROWS_AS(potential_from_json(R"({"kind": "zero", "bogus": 1})"), ValidationError);
    CHECK_THROWS_AS(potential_from_json(R"({"kind": "warp"})"), ValidationError);
    CHECK_THROWS_AS(potential_from_json(R"({"kind": "constant", "params": {"value": 3}})"),
                    ValidationError);
    CHECK_THROWS_AS(
        potential_from_json(R"({"kind": "constant", "params": {"value": [3, 0], "x": 1}})"),
        ValidationError);
    CHECK_THROWS_AS(load_potential_file("/nonexistent/path.json"), ValidationError);
}

TEST_CASE("json loader skips a leading header comment") {
    std::string text = "# tool header line\n" + potential_to_json(PotentialSpec::constant({3, 0}));
    PotentialSpec spec = potential_from_json(text);
    CHECK(spec.kind == PotentialKind::Constant);
}

TEST_CASE("decomposition splits into even and odd parts") {
    Potential q(PotentialSpec::fourier({0.3, 0.0}, {{1.0, 0.0}}, {{2.0, 0.0}}));

    HalfDecomposition half = decompose_half(q);
    UnitDecomposition unit = decompose_unit(q);
    for (double x : {0.05, 0.17, 0.31, 0.44}) {
        CHECK(cabs(half.q1(x) - half.q1(0.5 - x)) < 1e-13);
        CHECK(cabs(half.q2(x) + half.q2(0.5 - x)) < 1e-13);
        // reconstruction
        CHECK(cabs(half.q1(x) + half.q2(x) - q(x)) < 1e-12);
    }
    for (double x : {0.1, 0.33, 0.62, 0.9}) {
        CHECK(cabs(unit.q1(x) - unit.q1(1.0 - x)) < 1e-13);
        CHECK(cabs(unit.q2(x) + unit.q2(1.0 - x)) < 1e-13);
        CHECK(cabs(unit.q1(x) + unit.q2(x) - q(x)) < 1e-12);
    }
}

TEST_CASE("construction from polynomial q2 satisfies the factorization") {
    for (auto coeffs : {std::vector<Complex>{{16.0, 0.0}, {-4.0, 0.0}},
                        std::vector<Complex>{{-2.0, 0.0}, {0.5, 0.0}},
                        std::vector<Complex>{{3.0, 2.0}, {-0.75, -0.5}}}) {
        Q2Spec q2;
        q2.poly_coeffs = coeffs;
        ConstructResult r = construct_from_q2(q2, ExtensionMode::HalfPeriod);
        CHECK(r.warning.empty());
        Potential q(r.spec);
        CHECK(residual_condition_b(q) < 1e-10);
    }
}

TEST_CASE("half-period extension of a factorized potential also factorizes on the cell") {
    Q2Spec q2;
    q2.poly_coeffs = {{16.0, 0.0}, {-4.0, 0.0}};
    Potential q(construct_from_q2(q2, ExtensionMode::HalfPeriod).spec);
    CHECK(residual_condition_bb(q) < 1e-10);
}

TEST_CASE("non-antisymmetric q2 is antisymmetrized with a warning") {
    Q2Spec q2;
    q2.poly_coeffs = {{1.0, 0.0}}; // constant, even about 1/4
    ConstructResult r = construct_from_q2(q2, ExtensionMode::HalfPeriod);
    CHECK(!r.warning.empty());
    // antisymmetric part of a constant is zero, so the output is the zero cell
    Potential q(r.spec);
    CHECK(cabs(q(0.2)) < 1e-15);

    Q2Spec mixed;
    mixed.poly_coeffs = {{16.0, 0.0}, {-3.0, 0.0}}; // 16x - 3 = 16(x - 1/4) + 1
    ConstructResult m = construct_from_q2(mixed, ExtensionMode::HalfPeriod);
    CHECK(!m.warning.empty());
    Potential qm(m.spec);
    CHECK(residual_condition_b(qm) < 1e-10);
}

TEST_CASE("construction from sampled q2 closes the round trip on the grid") {
    int grid_n = 512;
    int n = grid_n / 2;
    std::vector<Complex> samples(n + 1);
    for (int j = 0; j <= n; ++j) {
        double x = 0.5 * j / n;
        samples[j] = Complex{16.0 * (x - 0.25), 0.0};
    }
    Q2Spec q2;
    q2.samples = samples;
    ConstructResult r = construct_from_q2(q2, ExtensionMode::HalfPeriod, grid_n);
    CHECK(r.warning.empty());
    CHECK(r.spec.kind == PotentialKind::Samples);
    Potential q(r.spec);
    double h = 1.0 / grid_n;
    CHECK(residual_condition_b(q) < 10 * h * h);
}

TEST_CASE("reflect extension produces a half-symmetric cell") {
    Q2Spec q2;
    q2.poly_coeffs = {{16.0, 0.0}, {-4.0, 0.0}};
    Potential q(construct_from_q2(q2, ExtensionMode::ReflectAboutHalf).spec);
    CHECK(residual_symmetry(q, SymmetryScope::Unit) < 1e-10);
}

TEST_CASE("condition residuals separate the symmetry classes") {
    Potential cosq(PotentialSpec::fourier({0, 0}, {{1.0, 0.0}}, {}));
    Potential sinq(PotentialSpec::fourier({0, 0}, {}, {{1.0, 0.0}}));

    // cos 2 pi x: symmetric about 1/2 on the cell, not about 1/4 on the half
    CHECK(residual_symmetry(cosq, SymmetryScope::Unit) < 1e-10);
    CHECK(residual_symmetry(cosq, SymmetryScope::Half) > 1e-2);
    // sin 2 pi x: the other way round
    CHECK(residual_symmetry(sinq, SymmetryScope::Half) < 1e-10);
    CHECK(residual_symmetry(sinq, SymmetryScope::Unit) > 1e-2);

    // negative controls for the factorization conditions
    CHECK(residual_condition_b(cosq) > 1e-2);
    CHECK(residual_condition_bb(sinq) > 1e-2);
}

TEST_CASE("evaluate_conditions reports verdicts against the default tolerance") {
    Q2Spec q2;
    q2.poly_coeffs = {{16.0, 0.0}, {-4.0, 0.0}};
    Potential q(construct_from_q2(q2, ExtensionMode::HalfPeriod).spec);
    ConditionReport rep = evaluate_conditions(q);
    CHECK(rep.tolerance == 1e-8);
    CHECK(rep.condition_b_holds);
    CHECK(rep.condition_bb_holds);
    CHECK(!rep.symmetric_half);
    CHECK(!rep.symmetric_unit);

    ConditionReport zero = evaluate_conditions(Potential(PotentialSpec::zero()));
    CHECK(zero.condition_b_holds);
    CHECK(zero.condition_bb_holds);
    CHECK(zero.symmetric_half);
    CHECK(zero.symmetric_unit);
}

TEST_CASE("sup norm dominates the l2 norm on residuals") {
    Potential cosq(PotentialSpec::fourier({0, 0}, {{1.0, 0.0}}, {}));
    double l2 = residual_condition_b(cosq, NormKind::L2);
    double sup = residual_condition_b(cosq, NormKind::Sup);
    CHECK(sup >= l2 / std::sqrt(0.5)); // interval length 1/2
    CHECK(sup > l2 * 0.99);
}

TEST_CASE("offset shifts the evaluated potential") {
    PotentialSpec spec = PotentialSpec::constant({1.0, 0.0});
    spec.offset = {-2.5, 0.5};
    Potential q(spec);
    CHECK(cabs(q(0.4) - Complex{-1.5, 0.5}) < 1e-15);
}
