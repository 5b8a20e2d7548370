#pragma once

#include "hillspec/potential.hpp"

#include <array>
#include <complex>
#include <optional>

namespace hillspec {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 1e-2;
    int min_steps_per_wave = 16;

    void validate() const;  // throws ValidationError on nonsensical settings
};

// Fundamental system of -y'' + q y = mu y at a point: c and s are the
// solutions with c = 1, c' = 0 and s = 0, s' = 1 at the base point. The
// optional d* block carries their derivatives with respect to mu. Everything
// is a function of mu itself, never of its square root, so all entries are
// entire in mu.
struct TransferState {
    double x = 0.0;
    Complex mu{0.0, 0.0};
    Complex c{1.0, 0.0};
    Complex cp{0.0, 0.0};
    Complex s{0.0, 0.0};
    Complex sp{1.0, 0.0};
    bool has_mu_derivative = false;
    Complex dc{0.0, 0.0};
    Complex dcp{0.0, 0.0};
    Complex ds{0.0, 0.0};
    Complex dsp{0.0, 0.0};

    // det of the 2x2 fundamental matrix; identically 1 for the true flow.
    Complex wronskian() const { return c * sp - cp * s; }
};

// Integrates the fundamental system from x0 to x1 (x0 <= x1, both within
// [-1, 2]; the potential is extended periodically). The returned state is
// based at x0. Throws IntegrationError if the step size underflows.
TransferState transfer(const Potential& q, Complex mu, double x0, double x1,
                       const IntegratorConfig& cfg = {}, bool with_mu_derivative = false);

// Transfer over one full period starting at 0.
TransferState monodromy(const Potential& q, Complex mu, const IntegratorConfig& cfg = {},
                        bool with_mu_derivative = false);

// Transfer over [0, 1/2].
TransferState half_transfer(const Potential& q, Complex mu, const IntegratorConfig& cfg = {},
                            bool with_mu_derivative = false);

struct DiscriminantValue {
    Complex value;                      // c(1) + s'(1)
    std::optional<Complex> derivative;  // d/dmu of the same
};

DiscriminantValue discriminant(const Potential& q, Complex mu, const IntegratorConfig& cfg = {},
                               bool with_derivative = false);

// The pair built from the half-period state:
//   y1 = s'(1/2) c - c'(1/2) s,   y2 = c(1/2) s - s(1/2) c.
// y1 and y2 are normalized at the midpoint: y1(1/2) = 1, y2'(1/2) = 1 (both
// by the Wronskian identity), y1'(1/2) = 0, y2(1/2) = 0.
struct AuxiliaryPair {
    Complex y1, y1p, y2, y2p;
};

AuxiliaryPair auxiliary_pair(const Potential& q, Complex mu, double x,
                             const IntegratorConfig& cfg = {});

} // namespace hillspec
