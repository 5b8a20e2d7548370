#pragma once

#include "hillspec/ode.hpp"
#include "hillspec/potential.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hillspec {

// Boundary problems on the period cell (or its left half for the *Half tags)
// and the two Floquet problems. Each tag names an entire characteristic
// function of mu whose zeros are the eigenvalues:
//   D  -> s(1)     N  -> c'(1)     DN -> s'(1)     ND -> c(1)
//   P  -> c(1) + s'(1) - 2         AP -> c(1) + s'(1) + 2
// and the same at x = 1/2 for DHalf, NHalf, DNHalf, NDHalf.
enum class ProblemTag { D, N, DN, ND, P, AP, DHalf, NHalf, DNHalf, NDHalf };

std::string tag_name(ProblemTag tag);
std::optional<ProblemTag> tag_from_name(const std::string& name);

Complex char_value(const Potential& q, ProblemTag tag, Complex mu,
                   const IntegratorConfig& cfg = {});

// Rectangle in the mu plane. Searches subdivide it recursively; max_depth
// bounds the recursion.
struct SearchRegion {
    double re_min = 0.0, re_max = 1.0;
    double im_min = -1.0, im_max = 1.0;
    int max_depth = 28;

    double width() const { return re_max - re_min; }
    double height() const { return im_max - im_min; }
    double diagonal() const;
    bool contains(Complex mu) const;
    void validate() const;
};

// Re in [-10, (2 pi bands)^2 + 10], Im within +-(5 + 2 ||q||_2).
SearchRegion default_search_region(const Potential& q, int bands = 4);

// Number of zeros of the characteristic function inside the region, counted
// with multiplicity by the argument principle along the region boundary.
// A zero too close to the contour triggers an automatic dilation of the
// region by 1e-6 of its diagonal, retried at most five times.
int count_zeros(const Potential& q, ProblemTag tag, const SearchRegion& region,
                const IntegratorConfig& cfg = {});

struct Eigenvalue {
    Complex mu;
    ProblemTag tag = ProblemTag::D;
    int algebraic_order = 1;
    // Present for P and AP only: 2 when the monodromy matrix is -+identity
    // within tolerance, else 1; the residual is ||M -+ I||_inf.
    std::optional<int> geometric_multiplicity;
    std::optional<double> monodromy_residual;
    double char_residual = 0.0;
    bool is_lowest = false;   // P only: smallest real part, ties by imaginary part
    bool near_double = false; // one of a pair of simple zeros closer than 1e-6 (1 + |mu|)
};

struct SpectrumReport {
    ProblemTag tag = ProblemTag::D;
    // The rectangle actually searched. It may be minutely larger than the
    // request when a zero sat on the requested boundary.
    SearchRegion region;
    std::vector<Eigenvalue> eigenvalues;  // ordered by (Re mu, Im mu)
    int winding_total = 0;                // argument-principle count over region
    int refined_total = 0;                // sum of algebraic orders below
    std::vector<SearchRegion> unresolved; // boxes the search gave up on
};

// Finds all zeros in the region: recursive subdivision until each box holds
// at most two zeros, Newton refinement inside each box (on the function for
// simple zeros, on its mu-derivative for double ones), then an independent
// tight-contour recount around every accepted root.
SpectrumReport find_eigenvalues(const Potential& q, ProblemTag tag, const SearchRegion& region,
                                const IntegratorConfig& cfg = {});

struct MultiplicityResult {
    int multiplicity = 1;
    double monodromy_residual = 0.0;  // ||M -+ I||_inf
};

// Geometric multiplicity of a periodic (tag P) or antiperiodic (tag AP)
// eigenvalue: 2 exactly when the monodromy matrix is +I (resp. -I).
MultiplicityResult geometric_multiplicity(const Potential& q, Complex mu, ProblemTag tag,
                                          const IntegratorConfig& cfg = {});

struct NormalizationResult {
    PotentialSpec spec;  // input potential shifted so the target eigenvalue is 0
    Complex shift;       // the eigenvalue that was subtracted
};

// Shifts q so that the lowest eigenvalue of the half-interval Neumann problem
// (zeros of c'(1/2, .)) lands at mu = 0. Throws ConvergenceError when the
// default region contains no such eigenvalue.
NormalizationResult normalize_half_neumann(const Potential& q, const IntegratorConfig& cfg = {});

// Generic form: shifts q by an eigenvalue of the given problem, picking either
// the lowest one (smallest real part, ties by |Im|) or the one nearest zero.
enum class ShiftPick { Lowest, NearestZero };
NormalizationResult normalize_to_zero(const Potential& q, ProblemTag tag, ShiftPick pick,
                                      const IntegratorConfig& cfg = {});

// CSV with a tool/config comment line, then a header row
// tag,re_mu,im_mu,algebraic_order,geometric_multiplicity,char_residual,monodromy_residual,is_lowest
// Multiplicity columns are empty for tags other than P/AP.
void write_spectrum_csv(std::ostream& out, const SpectrumReport& report,
                        const std::string& config_line);

} // namespace hillspec
