#include "hillspec/potential.hpp"

#include "hillspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <sstream>

namespace hillspec {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

// Polynomial helpers. Public coefficient lists are descending; the algebra
// below uses ascending order.
std::vector<Complex> ascending(const std::vector<Complex>& desc) {
    return {desc.rbegin(), desc.rend()};
}

std::vector<Complex> descending(const std::vector<Complex>& asc) {
    return {asc.rbegin(), asc.rend()};
}

Complex horner_desc(const std::vector<Complex>& desc, double x) {
    Complex acc{0.0, 0.0};
    for (Complex c : desc) acc = acc * x + c;
    return acc;
}

Complex eval_asc(const std::vector<Complex>& asc, double x) {
    Complex acc{0.0, 0.0};
    for (auto it = asc.rbegin(); it != asc.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<Complex> poly_mul(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<Complex> out(a.size() + b.size() - 1, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

std::vector<Complex> poly_add(std::vector<Complex> a, const std::vector<Complex>& b) {
    if (a.size() < b.size()) a.resize(b.size(), Complex{0.0, 0.0});
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
}

// p(1/2 - x) expanded in powers of x.
std::vector<Complex> reflect_quarter(const std::vector<Complex>& asc) {
    std::size_t n = asc.size();
    std::vector<Complex> out(n, Complex{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        // (1/2 - x)^k = sum_j C(k,j) (1/2)^(k-j) (-1)^j x^j
        double binom = 1.0;
        for (std::size_t j = 0; j <= k; ++j) {
            double sign = (j % 2 == 0) ? 1.0 : -1.0;
            out[j] += asc[k] * (binom * sign * std::pow(0.5, double(k - j)));
            binom = binom * double(k - j) / double(j + 1);
        }
    }
    return out;
}

std::vector<Complex> antiderivative(const std::vector<Complex>& asc) {
    std::vector<Complex> out(asc.size() + 1, Complex{0.0, 0.0});
    for (std::size_t k = 0; k < asc.size(); ++k) out[k + 1] = asc[k] / double(k + 1);
    return out;
}

// q1 + q2 on [0,1/2] for a BFamily spec, with q1 = (int_{1/2}^x q2)^2.
std::vector<Complex> bfamily_left_poly(const std::vector<Complex>& q2_desc) {
    auto q2 = ascending(q2_desc);
    auto prim = antiderivative(q2);
    Complex at_half = eval_asc(prim, 0.5);
    auto shifted = prim;
    if (shifted.empty()) shifted.assign(1, Complex{0.0, 0.0});
    shifted[0] -= at_half;
    auto q1 = poly_mul(shifted, shifted);
    return descending(poly_add(q1, q2));
}

Complex lerp_samples(const std::vector<Complex>& v, double a, double b, double x) {
    // v holds uniform samples of a function on [a, b].
    std::size_t n = v.size() - 1;
    double u = (x - a) / (b - a) * double(n);
    if (u <= 0.0) return v.front();
    if (u >= double(n)) return v.back();
    std::size_t j = static_cast<std::size_t>(u);
    double w = u - double(j);
    return v[j] * (1.0 - w) + v[j + 1] * w;
}

void append_complex(std::ostringstream& os, Complex z) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "(%.17g,%.17g)", z.real(), z.imag());
    os << buf;
}

void append_list(std::ostringstream& os, const char* name, const std::vector<Complex>& v) {
    os << ' ' << name << "=[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ',';
        append_complex(os, v[i]);
    }
    os << ']';
}

const char* kind_name(PotentialKind k) {
    switch (k) {
        case PotentialKind::Zero: return "zero";
        case PotentialKind::Constant: return "constant";
        case PotentialKind::Fourier: return "fourier";
        case PotentialKind::PolynomialPiece: return "polynomial_piece";
        case PotentialKind::Samples: return "samples";
        case PotentialKind::BFamily: return "b_family";
    }
    return "?";
}

const char* extension_name(ExtensionMode m) {
    switch (m) {
        case ExtensionMode::HalfPeriod: return "half_period";
        case ExtensionMode::ReflectAboutHalf: return "reflect_about_half";
        case ExtensionMode::ExplicitTail: return "explicit_tail";
    }
    return "?";
}

} // namespace

void PotentialSpec::validate() const {
    require(grid_n >= 16, "grid_n must be at least 16");
    require(grid_n % 2 == 0, "grid_n must be even");
    require(finite(offset), "offset must be finite");
    switch (kind) {
        case PotentialKind::Zero:
            break;
        case PotentialKind::Constant:
            require(finite(constant_value), "constant value must be finite");
            break;
        case PotentialKind::Fourier:
            require(finite(fourier_a0), "fourier a0 must be finite");
            for (Complex c : fourier_cos) require(finite(c), "fourier cos coefficient must be finite");
            for (Complex c : fourier_sin) require(finite(c), "fourier sin coefficient must be finite");
            break;
        case PotentialKind::PolynomialPiece:
            require(!poly_coeffs.empty(), "polynomial_piece needs coefficients");
            for (Complex c : poly_coeffs) require(finite(c), "polynomial coefficient must be finite");
            break;
        case PotentialKind::Samples:
            require(static_cast<int>(samples.size()) == grid_n + 1,
                    "samples must hold grid_n + 1 values");
            for (Complex c : samples) require(finite(c), "sample value must be finite");
            break;
        case PotentialKind::BFamily:
            require(!q2_coeffs.empty(), "b_family needs q2 coefficients");
            for (Complex c : q2_coeffs) require(finite(c), "q2 coefficient must be finite");
            if (extension == ExtensionMode::ExplicitTail) {
                require(static_cast<int>(tail.size()) == grid_n / 2 + 1,
                        "explicit_tail requires grid_n/2 + 1 tail values on [1/2,1]");
                for (Complex c : tail) require(finite(c), "tail value must be finite");
            }
            break;
    }
}

std::string PotentialSpec::canonical() const {
    std::ostringstream os;
    os << "kind=" << kind_name(kind) << " grid_n=" << grid_n
       << " extension=" << extension_name(extension);
    os << " offset=";
    append_complex(os, offset);
    switch (kind) {
        case PotentialKind::Zero:
            break;
        case PotentialKind::Constant:
            os << " value=";
            append_complex(os, constant_value);
            break;
        case PotentialKind::Fourier:
            os << " a0=";
            append_complex(os, fourier_a0);
            append_list(os, "cos", fourier_cos);
            append_list(os, "sin", fourier_sin);
            break;
        case PotentialKind::PolynomialPiece:
            append_list(os, "coeffs", poly_coeffs);
            break;
        case PotentialKind::Samples:
            append_list(os, "samples", samples);
            break;
        case PotentialKind::BFamily:
            append_list(os, "q2", q2_coeffs);
            if (extension == ExtensionMode::ExplicitTail) append_list(os, "tail", tail);
            break;
    }
    return os.str();
}

PotentialSpec PotentialSpec::zero() { return {}; }

PotentialSpec PotentialSpec::constant(Complex value) {
    PotentialSpec s;
    s.kind = PotentialKind::Constant;
    s.constant_value = value;
    return s;
}

PotentialSpec PotentialSpec::fourier(Complex a0, std::vector<Complex> cos_coeffs,
                                     std::vector<Complex> sin_coeffs) {
    PotentialSpec s;
    s.kind = PotentialKind::Fourier;
    s.fourier_a0 = a0;
    s.fourier_cos = std::move(cos_coeffs);
    s.fourier_sin = std::move(sin_coeffs);
    return s;
}

PotentialSpec PotentialSpec::polynomial(std::vector<Complex> coeffs_desc) {
    PotentialSpec s;
    s.kind = PotentialKind::PolynomialPiece;
    s.poly_coeffs = std::move(coeffs_desc);
    return s;
}

PotentialSpec PotentialSpec::sampled(std::vector<Complex> values, int grid_n) {
    PotentialSpec s;
    s.kind = PotentialKind::Samples;
    s.samples = std::move(values);
    s.grid_n = grid_n;
    return s;
}

Potential::Potential(PotentialSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    if (spec_.kind == PotentialKind::BFamily) left_poly_ = bfamily_left_poly(spec_.q2_coeffs);
}

bool Potential::is_sampled() const noexcept {
    return spec_.kind == PotentialKind::Samples ||
           (spec_.kind == PotentialKind::BFamily && spec_.extension == ExtensionMode::ExplicitTail);
}

Complex Potential::eval_cell(double x) const {
    switch (spec_.kind) {
        case PotentialKind::Zero:
            return {0.0, 0.0};
        case PotentialKind::Constant:
            return spec_.constant_value;
        case PotentialKind::Fourier: {
            Complex acc = spec_.fourier_a0;
            for (std::size_t k = 0; k < spec_.fourier_cos.size(); ++k)
                acc += spec_.fourier_cos[k] * std::cos(2.0 * std::numbers::pi * double(k + 1) * x);
            for (std::size_t k = 0; k < spec_.fourier_sin.size(); ++k)
                acc += spec_.fourier_sin[k] * std::sin(2.0 * std::numbers::pi * double(k + 1) * x);
            return acc;
        }
        case PotentialKind::PolynomialPiece:
            return horner_desc(spec_.poly_coeffs, x);
        case PotentialKind::Samples:
            return lerp_samples(spec_.samples, 0.0, 1.0, x);
        case PotentialKind::BFamily: {
            if (x <= 0.5) return horner_desc(left_poly_, x);
            switch (spec_.extension) {
                case ExtensionMode::HalfPeriod:
                    return horner_desc(left_poly_, x - 0.5);
                case ExtensionMode::ReflectAboutHalf:
                    return horner_desc(left_poly_, 1.0 - x);
                case ExtensionMode::ExplicitTail:
                    return lerp_samples(spec_.tail, 0.5, 1.0, x);
            }
            return {0.0, 0.0};
        }
    }
    return {0.0, 0.0};
}

Complex Potential::operator()(double x) const {
    double cell = x - std::floor(x);
    return eval_cell(cell) + spec_.offset;
}

std::vector<double> Potential::breakpoints(double x0, double x1) const {
    std::vector<double> out;
    double step = 0.0;
    switch (spec_.kind) {
        case PotentialKind::Zero:
        case PotentialKind::Constant:
        case PotentialKind::Fourier:
            return out;
        case PotentialKind::PolynomialPiece:
        case PotentialKind::Samples:
            step = 1.0;
            break;
        case PotentialKind::BFamily:
            step = 0.5;
            break;
    }
    double k = std::ceil(x0 / step);
    if (k * step <= x0) k += 1.0;
    for (; k * step < x1; k += 1.0) out.push_back(k * step);
    return out;
}

double Potential::l2_norm() const {
    if (l2_cache_ >= 0.0) return l2_cache_;
    int n = spec_.grid_n;
    double h = 1.0 / n;
    double acc = 0.0;
    for (int j = 0; j <= n; ++j) {
        double w = (j == 0 || j == n) ? 0.5 : 1.0;
        acc += w * std::norm((*this)(j * h));
    }
    l2_cache_ = std::sqrt(acc * h);
    return l2_cache_;
}

Complex evaluate(const PotentialSpec& spec, double x) { return Potential(spec)(x); }

HalfDecomposition decompose_half(const Potential& q) {
    auto p = std::make_shared<Potential>(q);
    return {
        [p](double x) { return 0.5 * ((*p)(x) + (*p)(0.5 - x)); },
        [p](double x) { return 0.5 * ((*p)(x) - (*p)(0.5 - x)); },
    };
}

UnitDecomposition decompose_unit(const Potential& q) {
    auto p = std::make_shared<Potential>(q);
    return {
        [p](double x) { return 0.5 * ((*p)(x) + (*p)(1.0 - x)); },
        [p](double x) { return 0.5 * ((*p)(x) - (*p)(1.0 - x)); },
    };
}

namespace {

// Norm of cell-midpoint samples. L2 uses the midpoint rule (equal weights).
double midpoint_norm(const std::vector<Complex>& values, double h, NormKind norm) {
    if (norm == NormKind::Sup) {
        double m = 0.0;
        for (Complex v : values) m = std::max(m, std::abs(v));
        return m;
    }
    double acc = 0.0;
    for (Complex v : values) acc += std::norm(v);
    return std::sqrt(acc * h);
}

// Shared core of the two integral-condition residuals: on [0, len] with the
// cell grid restricted to it, compare q1 against the square of the cumulative
// integral of q2 taken from the right endpoint. Everything is sampled at cell
// midpoints: potentials built by extension have jumps exactly at grid nodes,
// where a point sample would read a one-sided value that carries no L2 weight.
double condition_residual(const Potential& q, double len, NormKind norm) {
    int n = static_cast<int>(std::lround(len * q.grid_n()));
    double h = len / n;
    std::vector<Complex> q1(n), q2(n);
    for (int j = 0; j < n; ++j) {
        double x = (j + 0.5) * h;
        Complex a = q(x);
        Complex b = q(len - x);
        q1[j] = 0.5 * (a + b);
        q2[j] = 0.5 * (a - b);
    }
    // Cumulative integral from len down to each midpoint: trapezoid between
    // midpoints plus a slope-extrapolated half cell at the right end, which
    // keeps the rule exact for linear q2 without touching the endpoint node.
    std::vector<Complex> integral(n);
    Complex slope_end = n >= 2 ? (q2[n - 1] - q2[n - 2]) : Complex{0.0, 0.0};
    integral[n - 1] = -(0.5 * h * q2[n - 1] + 0.125 * h * slope_end);
    for (int j = n - 2; j >= 0; --j)
        integral[j] = integral[j + 1] - 0.5 * h * (q2[j] + q2[j + 1]);
    std::vector<Complex> resid(n);
    for (int j = 0; j < n; ++j) resid[j] = q1[j] - integral[j] * integral[j];
    return midpoint_norm(resid, h, norm);
}

} // namespace

double residual_condition_b(const Potential& q, NormKind norm) {
    return condition_residual(q, 0.5, norm);
}

double residual_condition_bb(const Potential& q, NormKind norm) {
    return condition_residual(q, 1.0, norm);
}

double residual_symmetry(const Potential& q, SymmetryScope scope, NormKind norm) {
    double len = scope == SymmetryScope::Half ? 0.5 : 1.0;
    int n = static_cast<int>(std::lround(len * q.grid_n()));
    double h = len / n;
    std::vector<Complex> diff(n);
    for (int j = 0; j < n; ++j) {
        double x = (j + 0.5) * h;
        diff[j] = q(x) - q(len - x);
    }
    return midpoint_norm(diff, h, norm);
}

ConstructResult construct_from_q2(const Q2Spec& q2, ExtensionMode mode, int grid_n,
                                  std::vector<Complex> tail) {
    require(grid_n >= 16 && grid_n % 2 == 0, "grid_n must be even and at least 16");
    ConstructResult result;

    if (q2.is_poly()) {
        require(!q2.poly_coeffs.empty(), "q2 polynomial needs coefficients");
        auto asc = ascending(q2.poly_coeffs);
        auto refl = reflect_quarter(asc);
        std::vector<Complex> anti(asc.size());
        double drift = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < asc.size(); ++k) {
            anti[k] = 0.5 * (asc[k] - refl[k]);
            drift = std::max(drift, std::abs(asc[k] - anti[k]));
            scale = std::max(scale, std::abs(asc[k]));
        }
        if (drift > 1e-14 * std::max(1.0, scale))
            result.warning = "q2 was not antisymmetric about 1/4; using its antisymmetric part";

        PotentialSpec spec;
        spec.kind = PotentialKind::BFamily;
        spec.grid_n = grid_n;
        spec.extension = mode;
        spec.q2_coeffs = descending(anti);
        if (mode == ExtensionMode::ExplicitTail) spec.tail = std::move(tail);
        spec.validate();
        result.spec = std::move(spec);
        return result;
    }

    // Sampled q2 on [0,1/2]: the construction reuses the exact quadrature the
    // residuals apply, so the round trip closes to rounding error.
    int n = grid_n / 2;
    require(static_cast<int>(q2.samples.size()) == n + 1,
            "sampled q2 must hold grid_n/2 + 1 values on [0,1/2]");
    double h = 0.5 / n;
    std::vector<Complex> anti(n + 1);
    double drift = 0.0, scale = 0.0;
    for (int j = 0; j <= n; ++j) {
        anti[j] = 0.5 * (q2.samples[j] - q2.samples[n - j]);
        drift = std::max(drift, std::abs(q2.samples[j] - anti[j]));
        scale = std::max(scale, std::abs(q2.samples[j]));
    }
    if (drift > 1e-12 * std::max(1.0, scale))
        result.warning = "q2 was not antisymmetric about 1/4; using its antisymmetric part";

    std::vector<Complex> integral(n + 1);
    integral[n] = {0.0, 0.0};
    for (int j = n - 1; j >= 0; --j)
        integral[j] = integral[j + 1] - 0.5 * h * (anti[j] + anti[j + 1]);

    std::vector<Complex> cell(grid_n + 1);
    for (int j = 0; j <= n; ++j) cell[j] = integral[j] * integral[j] + anti[j];
    switch (mode) {
        case ExtensionMode::HalfPeriod:
            for (int k = 1; k <= n; ++k) cell[n + k] = cell[k];
            break;
        case ExtensionMode::ReflectAboutHalf:
            for (int k = 1; k <= n; ++k) cell[n + k] = cell[n - k];
            break;
        case ExtensionMode::ExplicitTail:
            require(static_cast<int>(tail.size()) == n + 1,
                    "explicit_tail requires grid_n/2 + 1 tail values on [1/2,1]");
            for (int k = 1; k <= n; ++k) cell[n + k] = tail[k];
            break;
    }

    result.spec = PotentialSpec::sampled(std::move(cell), grid_n);
    return result;
}

double default_condition_tolerance(const Potential& q) {
    if (q.is_sampled()) {
        double h = 1.0 / q.grid_n();
        return 10.0 * h * h;
    }
    return 1e-8;
}

ConditionReport evaluate_conditions(const Potential& q, NormKind norm, double tol) {
    ConditionReport r;
    r.norm = norm;
    r.tolerance = tol < 0.0 ? default_condition_tolerance(q) : tol;
    r.residual_b = residual_condition_b(q, norm);
    r.residual_bb = residual_condition_bb(q, norm);
    r.residual_sym_half = residual_symmetry(q, SymmetryScope::Half, norm);
    r.residual_sym_unit = residual_symmetry(q, SymmetryScope::Unit, norm);
    r.condition_b_holds = r.residual_b < r.tolerance;
    r.condition_bb_holds = r.residual_bb < r.tolerance;
    r.symmetric_half = r.residual_sym_half < r.tolerance;
    r.symmetric_unit = r.residual_sym_unit < r.tolerance;
    return r;
}

} // namespace hillspec
