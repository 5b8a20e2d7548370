#include "hillspec/kernel.hpp"

#include "hillspec/errors.hpp"
#include "hillspec/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace hillspec {

namespace {

using Field = std::vector<std::vector<Complex>>;

Field make_triangle(int n) {
    Field f(n + 1);
    for (int i = 0; i <= n; ++i) f[i].assign(n + 1 - i, Complex{0.0, 0.0});
    return f;
}

// sin(lambda t)/lambda with the removable singularity at lambda = 0.
Complex sine_factor(Complex lambda, double t) {
    Complex z = lambda * t;
    if (std::abs(z) < 1e-4) {
        Complex z2 = z * z;
        return t * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
    }
    return std::sin(z) / lambda;
}

} // namespace

double KernelGrid::sup_abs() const {
    double m = 0.0;
    for (const auto& row : values)
        for (Complex v : row) m = std::max(m, std::abs(v));
    return m;
}

KernelGrid solve_goursat(const Potential& q, int n, double picard_tol) {
    if (n < 16) throw ValidationError("kernel mesh parameter must be at least 16");
    if (!(picard_tol > 0.0)) throw ValidationError("picard_tol must be positive");

    double h = 1.0 / n;

    // q along the diagonal argument xi + eta = (i + j) h.
    std::vector<Complex> qs(n + 1);
    for (int k = 0; k <= n; ++k) qs[k] = q(k * h);

    // Characteristic data g(xi) = (1/2) int_0^xi q, cumulative trapezoid.
    std::vector<Complex> g(n + 1);
    g[0] = {0.0, 0.0};
    for (int k = 1; k <= n; ++k) g[k] = g[k - 1] + 0.25 * h * (qs[k - 1] + qs[k]);

    // Fixed point of u(xi,eta) = g(xi) + int_0^xi int_0^eta q(a+b) u(a,b) db da.
    // The inner rectangle of any triangle node stays inside the triangle, so
    // cumulative trapezoid sums never leave the stored nodes.
    Field u = make_triangle(n);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n - i; ++j) u[i][j] = g[i];

    Field w = make_triangle(n);
    Field row_int = make_triangle(n);
    Field rect_int = make_triangle(n);
    Field next = make_triangle(n);

    KernelGrid out;
    out.n = n;
    out.q_ref = q.spec();

    for (int sweep = 1; sweep <= 50; ++sweep) {
        parallel_for(static_cast<std::size_t>(n) + 1, [&](std::size_t ii) {
            int i = static_cast<int>(ii);
            for (int j = 0; j <= n - i; ++j) w[i][j] = qs[i + j] * u[i][j];
            row_int[i][0] = {0.0, 0.0};
            for (int j = 1; j <= n - i; ++j)
                row_int[i][j] = row_int[i][j - 1] + 0.5 * h * (w[i][j - 1] + w[i][j]);
        });
        // Column pass: integrate the row integrals in xi. Column j exists for
        // rows i <= n - j.
        parallel_for(static_cast<std::size_t>(n) + 1, [&](std::size_t jj) {
            int j = static_cast<int>(jj);
            rect_int[0][j] = {0.0, 0.0};
            for (int i = 1; i <= n - j; ++i)
                rect_int[i][j] = rect_int[i - 1][j] + 0.5 * h * (row_int[i - 1][j] + row_int[i][j]);
        });

        double delta = 0.0;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n - i; ++j) {
                next[i][j] = g[i] + rect_int[i][j];
                delta = std::max(delta, std::abs(next[i][j] - u[i][j]));
            }
        std::swap(u, next);
        out.picard_iterations = sweep;
        out.final_delta = delta;
        if (delta < picard_tol) {
            out.values = std::move(u);
            return out;
        }
    }
    std::ostringstream os;
    os << "kernel iteration did not converge within 50 sweeps (last sweep moved by "
       << out.final_delta << ")";
    throw ConvergenceError(os.str());
}

double representation_residual(const Potential& q, const KernelGrid& K,
                               const std::vector<Complex>& mu_grid,
                               const std::vector<double>& x_grid,
                               const IntegratorConfig& cfg) {
    if (K.n < 1 || K.values.size() != static_cast<std::size_t>(K.n) + 1)
        throw ValidationError("kernel grid is empty");
    if (K.q_ref.canonical() != q.spec().canonical())
        throw ValidationError("kernel was solved for a different potential");

    int n = K.n;
    double h = K.h();

    // Map each x to its mesh line x = m/n; the nodes on that line are
    // (i, m-i), i = 0..m, at t = (2i - m) h.
    std::vector<int> lines;
    lines.reserve(x_grid.size());
    for (double x : x_grid) {
        if (x < 0.0 || x > 1.0) throw ValidationError("representation x values must lie in [0,1]");
        int m = static_cast<int>(std::lround(x * n));
        if (std::abs(x - m * h) > 1e-12)
            throw ValidationError("representation x values must be multiples of the kernel mesh spacing");
        lines.push_back(m);
    }

    double worst = 0.0;
    for (Complex mu : mu_grid) {
        Complex lambda = std::sqrt(mu);
        for (std::size_t xi = 0; xi < lines.size(); ++xi) {
            int m = lines[xi];
            double x = m * h;
            TransferState ode = transfer(q, mu, 0.0, x, cfg, false);

            Complex ic{0.0, 0.0}, is{0.0, 0.0};
            for (int i = 0; i <= m; ++i) {
                double t = (2 * i - m) * h;
                Complex kv = K.values[i][m - i];
                double weight = (i == 0 || i == m) ? 0.5 : 1.0;
                ic += weight * kv * std::cos(lambda * t);
                is += weight * kv * sine_factor(lambda, t);
            }
            ic *= 2.0 * h;
            is *= 2.0 * h;

            Complex c_rep = std::cos(lambda * x) + ic;
            Complex s_rep = sine_factor(lambda, x) + is;
            worst = std::max(worst, std::abs(ode.c - c_rep));
            worst = std::max(worst, std::abs(ode.s - s_rep));
        }
    }
    return worst;
}

void write_kernel_csv(std::ostream& out, const KernelGrid& K, const std::string& config_line) {
    if (!config_line.empty()) out << "# " << config_line << "\n";
    out << "x,t,re_K,im_K\n";
    double h = K.h();
    char buf[128];
    for (int i = 0; i <= K.n; ++i)
        for (int j = 0; j <= K.n - i; ++j) {
            double x = (i + j) * h;
            double t = (i - j) * h;
            Complex v = K.values[i][j];
            std::snprintf(buf, sizeof(buf), "%.15g,%.15g,%.15g,%.15g\n", x, t, v.real(), v.imag());
            out << buf;
        }
}

} // namespace hillspec
