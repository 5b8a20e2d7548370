#include "hillspec/ode.hpp"

#include "hillspec/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace hillspec {

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw ValidationError("integrator tolerances must be positive");
    if (!(max_step > 0.0)) throw ValidationError("max_step must be positive");
    if (min_steps_per_wave < 1) throw ValidationError("min_steps_per_wave must be at least 1");
}

namespace {

// Dormand-Prince 5(4) pair. The first same as last property is used: the
// seventh stage of an accepted step is the first stage of the next one.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

using State = std::array<Complex, 8>;

struct Rhs {
    const Potential& q;
    Complex mu;
    int n;  // 4 without the mu-derivative block, 8 with it

    // evaluation window: stage points are clamped into the open segment so a
    // piecewise potential is sampled one-sidedly at seam endpoints
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    void operator()(double x, const State& y, State& dy) const {
        Complex w = q(std::min(std::max(x, lo), hi)) - mu;
        dy[0] = y[1];
        dy[1] = w * y[0];
        dy[2] = y[3];
        dy[3] = w * y[2];
        if (n == 8) {
            dy[4] = y[5];
            dy[5] = w * y[4] - y[0];
            dy[6] = y[7];
            dy[7] = w * y[6] - y[2];
        }
    }
};

// Integrates y through [x0, x1]. y holds the initial state on entry and the
// final state on exit.
void dopri5(const Rhs& f, double x0, double x1, const IntegratorConfig& cfg, State& y) {
    const int n = f.n;
    const double span = x1 - x0;
    if (span == 0.0) return;

    // Oscillation guard: solutions behave like exp(i sqrt(mu) x), so steps
    // must resolve the local wavelength even when the error estimate would
    // allow larger ones.
    const double wave_cap =
        2.0 * 3.14159265358979323846 /
        (double(cfg.min_steps_per_wave) * std::max(1.0, std::sqrt(std::abs(f.mu))));
    const double hmax = std::min(cfg.max_step, wave_cap);

    const double safe = 0.9, fac1 = 0.2, fac2 = 10.0, beta = 0.04;
    const double expo1 = 0.2 - beta * 0.75;
    double facold = 1e-4;

    double x = x0;
    double h = std::min(hmax, span);
    State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    f(x, y, k1);

    const double h_floor = 16.0 * std::numeric_limits<double>::epsilon();
    int rejected_in_a_row = 0;

    while (x < x1) {
        if (h > x1 - x) h = x1 - x;
        if (h < h_floor * std::max(1.0, std::abs(x)))
            throw IntegrationError("step size underflow", x);

        for (int i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a21 * k1[i]);
        f(x + c2 * h, ytmp, k2);
        for (int i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(x + c3 * h, ytmp, k3);
        for (int i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(x + c4 * h, ytmp, k4);
        for (int i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(x + c5 * h, ytmp, k5);
        for (int i = 0; i < n; ++i)
            ytmp[i] =
                y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(x + h, ytmp, k6);
        for (int i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(x + h, ynew, k7);

        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            Complex ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                              e7 * k7[i]);
            double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            double r = std::abs(ei) / sc;
            err += r * r;
        }
        err = std::sqrt(err / n);

        double fac11 = std::pow(std::max(err, 1e-32), expo1);
        if (err <= 1.0) {
            x += h;
            y = ynew;
            k1 = k7;
            facold = std::max(err, 1e-4);
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(1.0 / fac2, std::min(1.0 / fac1, fac / safe));
            h = std::min(h / fac, hmax);
            rejected_in_a_row = 0;
        } else {
            h = h / std::min(1.0 / fac1, fac11 / safe);
            if (++rejected_in_a_row > 200)
                throw IntegrationError("step control failed to settle", x);
        }
    }
}

} // namespace

TransferState transfer(const Potential& q, Complex mu, double x0, double x1,
                       const IntegratorConfig& cfg, bool with_mu_derivative) {
    cfg.validate();
    if (!(x0 <= x1)) throw ValidationError("transfer requires x0 <= x1");
    if (x0 < -1.0 || x1 > 2.0) throw ValidationError("transfer endpoints must lie in [-1, 2]");
    if (!(std::isfinite(mu.real()) && std::isfinite(mu.imag())))
        throw ValidationError("mu must be finite");

    State y{};
    y[0] = 1.0;  // c
    y[3] = 1.0;  // s'
    Rhs f{q, mu, with_mu_derivative ? 8 : 4};
    if (q.breakpoints(-1.0, 2.0).empty()) {
        dopri5(f, x0, x1, cfg, y);
    } else {
        // restart at seam points so every dopri5 call integrates one smooth
        // piece of the coefficient
        std::vector<double> cuts = q.breakpoints(x0, x1);
        cuts.push_back(x1);
        double from = x0;
        for (double to : cuts) {
            double margin = std::min(1e-13, 0.25 * (to - from));
            f.lo = from + margin;
            f.hi = to - margin;
            dopri5(f, from, to, cfg, y);
            from = to;
        }
    }

    TransferState out;
    out.x = x1;
    out.mu = mu;
    out.c = y[0];
    out.cp = y[1];
    out.s = y[2];
    out.sp = y[3];
    out.has_mu_derivative = with_mu_derivative;
    if (with_mu_derivative) {
        out.dc = y[4];
        out.dcp = y[5];
        out.ds = y[6];
        out.dsp = y[7];
    }
    return out;
}

TransferState monodromy(const Potential& q, Complex mu, const IntegratorConfig& cfg,
                        bool with_mu_derivative) {
    return transfer(q, mu, 0.0, 1.0, cfg, with_mu_derivative);
}

TransferState half_transfer(const Potential& q, Complex mu, const IntegratorConfig& cfg,
                            bool with_mu_derivative) {
    return transfer(q, mu, 0.0, 0.5, cfg, with_mu_derivative);
}

DiscriminantValue discriminant(const Potential& q, Complex mu, const IntegratorConfig& cfg,
                               bool with_derivative) {
    TransferState m = monodromy(q, mu, cfg, with_derivative);
    DiscriminantValue out;
    out.value = m.c + m.sp;
    if (with_derivative) out.derivative = m.dc + m.dsp;
    return out;
}

AuxiliaryPair auxiliary_pair(const Potential& q, Complex mu, double x,
                             const IntegratorConfig& cfg) {
    if (x < 0.0 || x > 2.0) throw ValidationError("auxiliary_pair requires x in [0, 2]");
    TransferState h = half_transfer(q, mu, cfg);
    TransferState t = transfer(q, mu, 0.0, x, cfg);
    AuxiliaryPair out;
    out.y1 = h.sp * t.c - h.cp * t.s;
    out.y1p = h.sp * t.cp - h.cp * t.sp;
    out.y2 = h.c * t.s - h.s * t.c;
    out.y2p = h.c * t.sp - h.s * t.cp;
    return out;
}

} // namespace hillspec
