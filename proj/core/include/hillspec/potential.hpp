#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace hillspec {

using Complex = std::complex<double>;

enum class PotentialKind { Zero, Constant, Fourier, PolynomialPiece, Samples, BFamily };

// How values on (1/2, 1] are produced for kinds that are specified on [0, 1/2]
// only (currently BFamily). Ignored by kinds defined on the whole cell.
enum class ExtensionMode { HalfPeriod, ReflectAboutHalf, ExplicitTail };

enum class NormKind { L2, Sup };

// Declarative description of one period of the potential. Polynomial
// coefficient lists are ordered from the highest degree down to the constant
// term, matching the way they are written on the command line.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::Zero;
    int grid_n = 256;
    ExtensionMode extension = ExtensionMode::HalfPeriod;

    Complex constant_value{0.0, 0.0};  // Constant
    Complex fourier_a0{0.0, 0.0};      // Fourier: a0 + sum ak cos(2 pi k x) + bk sin(2 pi k x)
    std::vector<Complex> fourier_cos;  // ak, k = 1..K
    std::vector<Complex> fourier_sin;  // bk, k = 1..K
    std::vector<Complex> poly_coeffs;  // PolynomialPiece: polynomial in x on [0,1)
    std::vector<Complex> samples;      // Samples: grid_n + 1 values on [0,1]
    std::vector<Complex> q2_coeffs;    // BFamily: polynomial q2 on [0,1/2]
    std::vector<Complex> tail;         // BFamily + ExplicitTail: grid_n + 1 values on [1/2,1]

    // Additive spectral shift: the evaluated potential is the base kind plus
    // this constant. Written by the normalization routines.
    Complex offset{0.0, 0.0};

    // Throws ValidationError (naming the offending field) on bad parameters.
    void validate() const;

    // Canonical one-line rendering; equal specs render equally. Feeds the
    // config hash in output file headers.
    std::string canonical() const;

    static PotentialSpec zero();
    static PotentialSpec constant(Complex value);
    static PotentialSpec fourier(Complex a0, std::vector<Complex> cos_coeffs,
                                 std::vector<Complex> sin_coeffs);
    static PotentialSpec polynomial(std::vector<Complex> coeffs_desc);
    static PotentialSpec sampled(std::vector<Complex> values, int grid_n);
};

// JSON round trip for spec files. Schema:
//   {"kind": ..., "params": {...}, "grid_n": ..., "extension_mode": ...}
// Complex scalars are [re, im] pairs. Unknown keys are rejected. Leading
// lines starting with '#' (tool output headers) are skipped on read.
PotentialSpec potential_from_json(const std::string& text);
std::string potential_to_json(const PotentialSpec& spec);
PotentialSpec load_potential_file(const std::string& path);

// Runtime evaluator. Periodic with period one: evaluation takes x modulo 1.
// Sampled kinds interpolate linearly between grid nodes.
class Potential {
public:
    explicit Potential(PotentialSpec spec);

    Complex operator()(double x) const;
    const PotentialSpec& spec() const noexcept { return spec_; }

    // True when evaluation involves interpolation of tabulated data, in which
    // case residual verdicts use the quadrature-limited tolerance 10 h^2.
    bool is_sampled() const noexcept;

    // Points strictly inside (x0, x1) where the periodic extension is only
    // piecewise smooth: period boundaries for piecewise kinds, plus the seam
    // at half-integers for kinds specified on [0, 1/2]. Empty for globally
    // analytic kinds. The ODE integrator restarts at these points.
    std::vector<double> breakpoints(double x0, double x1) const;

    // L2(0,1) norm, composite trapezoid on the grid_n grid. Cached.
    double l2_norm() const;

    int grid_n() const noexcept { return spec_.grid_n; }

private:
    PotentialSpec spec_;
    std::vector<Complex> left_poly_;  // BFamily: q1 + q2 on [0,1/2], descending
    mutable double l2_cache_ = -1.0;

    Complex eval_cell(double x) const;  // x in [0,1)
};

Complex evaluate(const PotentialSpec& spec, double x);

// Splitting of q about the quarter point: q1 is the even part and q2 the odd
// part of q(x) under x -> 1/2 - x, both defined for x in [0, 1/2].
struct HalfDecomposition {
    std::function<Complex(double)> q1;
    std::function<Complex(double)> q2;
};

// Same splitting about the midpoint: parts of q(x) under x -> 1 - x on [0,1].
struct UnitDecomposition {
    std::function<Complex(double)> q1;
    std::function<Complex(double)> q2;
};

HalfDecomposition decompose_half(const Potential& q);
UnitDecomposition decompose_unit(const Potential& q);

// || q1(x) - (int_{1/2}^x q2)^2 || over [0,1/2]. The inner integral is a
// cumulative trapezoid accumulated from 1/2 on a grid of grid_n intervals.
double residual_condition_b(const Potential& q, NormKind norm = NormKind::L2);

// Unit-interval analogue: || q1(x) - (int_1^x q2)^2 || over [0,1].
double residual_condition_bb(const Potential& q, NormKind norm = NormKind::L2);

enum class SymmetryScope { Half, Unit };

// || q(x) - q(1/2 - x) || over [0,1/2], or || q(x) - q(1 - x) || over [0,1].
double residual_symmetry(const Potential& q, SymmetryScope scope, NormKind norm = NormKind::L2);

// Input to construct_from_q2: either a polynomial on [0,1/2] (descending
// coefficients) or uniform samples of q2 on [0,1/2] (grid_n + 1 values).
struct Q2Spec {
    std::vector<Complex> poly_coeffs;
    std::vector<Complex> samples;
    bool is_poly() const noexcept { return !poly_coeffs.empty() || samples.empty(); }
};

struct ConstructResult {
    PotentialSpec spec;
    // Non-empty when the supplied q2 was not antisymmetric about 1/4 and had
    // to be antisymmetrized first.
    std::string warning;
};

// Builds the potential q = (int_{1/2}^x q2)^2 + q2 on [0,1/2], extended to
// the full cell by the requested mode. Polynomial input yields an analytic
// BFamily spec; sampled input yields a Samples spec built with the same
// cumulative trapezoid rule the residuals use.
ConstructResult construct_from_q2(const Q2Spec& q2, ExtensionMode mode, int grid_n = 256,
                                  std::vector<Complex> tail = {});

struct ConditionReport {
    double residual_b = 0.0;
    double residual_bb = 0.0;
    double residual_sym_half = 0.0;
    double residual_sym_unit = 0.0;
    NormKind norm = NormKind::L2;
    double tolerance = 0.0;
    bool condition_b_holds = false;
    bool condition_bb_holds = false;
    bool symmetric_half = false;
    bool symmetric_unit = false;
};

// Evaluates all four residuals and compares against tol. A negative tol picks
// the default: 1e-8 for analytic kinds, 10 h^2 for sampled ones.
ConditionReport evaluate_conditions(const Potential& q, NormKind norm = NormKind::L2,
                                    double tol = -1.0);

double default_condition_tolerance(const Potential& q);

} // namespace hillspec
