#include "hillspec/spectra.hpp"

#include "hillspec/errors.hpp"
#include "hillspec/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace hillspec {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

// Two simple zeros closer than this are one near-double cluster.
double separation_threshold(Complex mu) { return 1e-6 * (1.0 + std::abs(mu)); }
} // namespace

std::string tag_name(ProblemTag tag) {
    switch (tag) {
        case ProblemTag::D: return "D";
        case ProblemTag::N: return "N";
        case ProblemTag::DN: return "DN";
        case ProblemTag::ND: return "ND";
        case ProblemTag::P: return "P";
        case ProblemTag::AP: return "AP";
        case ProblemTag::DHalf: return "D_half";
        case ProblemTag::NHalf: return "N_half";
        case ProblemTag::DNHalf: return "DN_half";
        case ProblemTag::NDHalf: return "ND_half";
    }
    return "?";
}

std::optional<ProblemTag> tag_from_name(const std::string& name) {
    static const std::pair<const char*, ProblemTag> table[] = {
        {"D", ProblemTag::D},           {"N", ProblemTag::N},
        {"DN", ProblemTag::DN},         {"ND", ProblemTag::ND},
        {"P", ProblemTag::P},           {"AP", ProblemTag::AP},
        {"D_half", ProblemTag::DHalf},  {"N_half", ProblemTag::NHalf},
        {"DN_half", ProblemTag::DNHalf},{"ND_half", ProblemTag::NDHalf},
    };
    for (auto& [n, t] : table)
        if (name == n) return t;
    return std::nullopt;
}

double SearchRegion::diagonal() const { return std::hypot(width(), height()); }

bool SearchRegion::contains(Complex mu) const {
    return mu.real() >= re_min && mu.real() <= re_max && mu.imag() >= im_min &&
           mu.imag() <= im_max;
}

void SearchRegion::validate() const {
    if (!(re_min < re_max) || !(im_min < im_max))
        throw ValidationError("search region must have positive extent");
    if (!std::isfinite(re_min) || !std::isfinite(re_max) || !std::isfinite(im_min) ||
        !std::isfinite(im_max))
        throw ValidationError("search region bounds must be finite");
    if (max_depth < 4 || max_depth > 64)
        throw ValidationError("search region max_depth must lie in [4, 64]");
}

SearchRegion default_search_region(const Potential& q, int bands) {
    if (bands < 1) throw ValidationError("bands must be at least 1");
    double span = 5.0 + 2.0 * q.l2_norm();
    double top = 2.0 * kPi * double(bands);
    return SearchRegion{-10.0, top * top + 10.0, -span, span, 28};
}

namespace {

struct CharFn {
    const Potential& q;
    ProblemTag tag;
    const IntegratorConfig& cfg;

    double endpoint() const {
        switch (tag) {
            case ProblemTag::DHalf:
            case ProblemTag::NHalf:
            case ProblemTag::DNHalf:
            case ProblemTag::NDHalf: return 0.5;
            default: return 1.0;
        }
    }

    static Complex pick(const TransferState& t, ProblemTag tag) {
        switch (tag) {
            case ProblemTag::D:
            case ProblemTag::DHalf: return t.s;
            case ProblemTag::N:
            case ProblemTag::NHalf: return t.cp;
            case ProblemTag::DN:
            case ProblemTag::DNHalf: return t.sp;
            case ProblemTag::ND:
            case ProblemTag::NDHalf: return t.c;
            case ProblemTag::P: return t.c + t.sp - 2.0;
            case ProblemTag::AP: return t.c + t.sp + 2.0;
        }
        return {};
    }

    static Complex pick_derivative(const TransferState& t, ProblemTag tag) {
        switch (tag) {
            case ProblemTag::D:
            case ProblemTag::DHalf: return t.ds;
            case ProblemTag::N:
            case ProblemTag::NHalf: return t.dcp;
            case ProblemTag::DN:
            case ProblemTag::DNHalf: return t.dsp;
            case ProblemTag::ND:
            case ProblemTag::NDHalf: return t.dc;
            case ProblemTag::P:
            case ProblemTag::AP: return t.dc + t.dsp;
        }
        return {};
    }

    Complex value(Complex mu) const {
        return pick(transfer(q, mu, 0.0, endpoint(), cfg, false), tag);
    }

    // One 8-component solve: the characteristic value, its mu-derivative, and
    // noise estimates for both. A value like c + s' - 2 can cancel to far
    // below the sizes of c and s', so the absolute evaluation noise is set by
    // the solution magnitudes, not by |f|.
    struct Probe {
        Complex f, fp;
        double noise_f = 0.0;
        double noise_fp = 0.0;
    };

    Probe probe(Complex mu) const {
        TransferState t = transfer(q, mu, 0.0, endpoint(), cfg, true);
        Probe out;
        out.f = pick(t, tag);
        out.fp = pick_derivative(t, tag);
        double mag = std::abs(t.c) + std::abs(t.s) + std::abs(t.cp) + std::abs(t.sp);
        double mag_d = std::abs(t.dc) + std::abs(t.ds) + std::abs(t.dcp) + std::abs(t.dsp);
        out.noise_f = cfg.rel_tol * mag + cfg.abs_tol;
        out.noise_fp = cfg.rel_tol * mag_d + cfg.abs_tol;
        return out;
    }
};

// Control-flow signal: the contour ran too close to a zero (tiny |f| or a
// phase step that bisection could not resolve). The caller dilates and
// retries.
struct NearZeroOnContour {};

struct ContourOutcome {
    int winding = 0;
    Complex m1{0.0, 0.0};  // sum of enclosed zeros
    Complex m2{0.0, 0.0};  // sum of their squares
    double scale = 0.0;    // max |f| seen on the contour
};

// Walks a closed polyline accumulating the branch-tracked logarithm of f.
// Segments are bisected until both the phase step and the modulus step are
// small; the winding number and the first two zero moments come out of the
// same walk. Moments use the identity
//   (1/2 pi i) oint mu^k f'/f dmu
//     = mu0^k w - (k/2 pi i) oint mu^(k-1) log f dmu
// so no derivative evaluations are needed on the contour.
class ContourWalker {
public:
    ContourWalker(const std::function<Complex(Complex)>& f, double guard)
        : f_(f), guard_(guard) {}

    ContourOutcome run(const std::vector<Complex>& loop, const std::vector<Complex>& values) {
        phi_ = 0.0;
        i_log_ = i_mulog_ = {0.0, 0.0};
        scale_ = 0.0;
        for (Complex v : values) scale_ = std::max(scale_, std::abs(v));
        for (Complex v : values)
            if (std::abs(v) < guard_ * std::max(scale_, 1e-300)) throw NearZeroOnContour{};

        for (std::size_t i = 0; i + 1 < loop.size(); ++i)
            segment(loop[i], values[i], loop[i + 1], values[i + 1], 0);

        double w_real = phi_ / (2.0 * kPi);
        long w = std::lround(w_real);
        if (std::abs(w_real - double(w)) > 0.05) throw NearZeroOnContour{};

        ContourOutcome out;
        out.winding = static_cast<int>(w);
        out.scale = scale_;
        Complex mu0 = loop.front();
        out.m1 = mu0 * double(w) - i_log_ / (2.0 * kPi * kI);
        out.m2 = mu0 * mu0 * double(w) - i_mulog_ / (kPi * kI);
        return out;
    }

private:
    static bool quiet_step(Complex f0, Complex f1) {
        Complex ratio = f1 / f0;
        return std::abs(std::arg(ratio)) <= 0.5 * kPi &&
               std::abs(std::log(std::abs(ratio))) <= 0.7;
    }

    Complex eval_guarded(Complex mu) {
        Complex fm = f_(mu);
        double am = std::abs(fm);
        scale_ = std::max(scale_, am);
        if (!std::isfinite(am) || am < guard_ * std::max(scale_, 1e-300))
            throw NearZeroOnContour{};
        return fm;
    }

    void segment(Complex mu0, Complex f0, Complex mu1, Complex f1, int depth) {
        if (quiet_step(f0, f1)) {
            if (depth >= 42) {
                accumulate(mu0, f0, mu1, f1);
                return;
            }
            // Quiet endpoints can still hide a full turn of the phase: when a
            // zero sits just off the segment and the endpoints straddle the
            // dip in |f| symmetrically, the 2 pi jump aliases to a small one
            // and both step criteria stay silent. The midpoint of such a
            // straddle necessarily lands near the dip, so accept a segment
            // only after its midpoint confirms both halves are quiet too.
            Complex mid = 0.5 * (mu0 + mu1);
            Complex fm = eval_guarded(mid);
            if (quiet_step(f0, fm) && quiet_step(fm, f1)) {
                accumulate(mu0, f0, mid, fm);
                accumulate(mid, fm, mu1, f1);
                return;
            }
            segment(mu0, f0, mid, fm, depth + 1);
            segment(mid, fm, mu1, f1, depth + 1);
            return;
        }
        if (depth >= 42) throw NearZeroOnContour{};
        Complex mid = 0.5 * (mu0 + mu1);
        Complex fm = eval_guarded(mid);
        segment(mu0, f0, mid, fm, depth + 1);
        segment(mid, fm, mu1, f1, depth + 1);
    }

    void accumulate(Complex mu0, Complex f0, Complex mu1, Complex f1) {
        double dphi = std::arg(f1 / f0);
        double phi0 = phi_;
        double phi1 = phi0 + dphi;
        Complex l0{std::log(std::abs(f0)), phi0};
        Complex l1{std::log(std::abs(f1)), phi1};
        Complex dmu = mu1 - mu0;
        i_log_ += 0.5 * (l0 + l1) * dmu;
        i_mulog_ += 0.5 * (mu0 * l0 + mu1 * l1) * dmu;
        phi_ = phi1;
    }

    const std::function<Complex(Complex)>& f_;
    double guard_;
    double phi_ = 0.0;
    Complex i_log_{0.0, 0.0}, i_mulog_{0.0, 0.0};
    double scale_ = 0.0;
};

std::vector<Complex> rectangle_loop(const SearchRegion& r, int per_side) {
    std::vector<Complex> pts;
    pts.reserve(4 * per_side + 1);
    auto emit_side = [&](Complex a, Complex b) {
        for (int k = 0; k < per_side; ++k)
            pts.push_back(a + (b - a) * (double(k) / per_side));
    };
    Complex c00{r.re_min, r.im_min}, c10{r.re_max, r.im_min};
    Complex c11{r.re_max, r.im_max}, c01{r.re_min, r.im_max};
    emit_side(c00, c10);
    emit_side(c10, c11);
    emit_side(c11, c01);
    emit_side(c01, c00);
    pts.push_back(c00);
    return pts;
}

SearchRegion inflate(const SearchRegion& r, double amount) {
    SearchRegion out = r;
    out.re_min -= amount;
    out.re_max += amount;
    out.im_min -= amount;
    out.im_max += amount;
    return out;
}

ContourOutcome walk_loop(const CharFn& fn, const std::vector<Complex>& loop) {
    std::function<Complex(Complex)> f = [&fn](Complex mu) { return fn.value(mu); };
    std::vector<Complex> values(loop.size());
    for (std::size_t i = 0; i < loop.size(); ++i) values[i] = f(loop[i]);
    ContourWalker walker(f, 1e-12);
    return walker.run(loop, values);
}

// Rectangle count with the documented dilation fallback: each retry pushes
// the boundary outward by another 1e-6 of the diagonal and samples finer.
ContourOutcome rect_contour(const CharFn& fn, const SearchRegion& region, int per_side,
                            SearchRegion& used) {
    for (int attempt = 0; attempt <= 5; ++attempt) {
        SearchRegion r = inflate(region, double(attempt) * 1e-6 * region.diagonal());
        int side = per_side << std::min(attempt, 3);
        try {
            ContourOutcome out = walk_loop(fn, rectangle_loop(r, side));
            used = r;
            return out;
        } catch (const NearZeroOnContour&) {
        }
    }
    std::ostringstream os;
    os << "a zero of the " << tag_name(fn.tag)
       << " characteristic function stays on the contour after 5 dilations; "
          "move the region boundary";
    throw ConvergenceError(os.str());
}

struct NewtonResult {
    Complex root{0.0, 0.0};
    double residual = 0.0;  // |f(root)|
    double noise = 0.0;     // evaluation noise estimate at the root
    double fp_abs = 0.0;    // |f'(root)|; noise/fp_abs bounds the position error
    bool ok = false;
};

// Newton on the characteristic function. Quadratic at simple zeros, linear
// (ratio 1/2) at double ones. Near a zero the computed |f| bottoms out at the
// integration noise, so "value at noise level" is accepted alongside the
// usual small-step exit; without it the iteration would jitter forever on
// noise-sized steps.
NewtonResult newton_simple(const CharFn& fn, Complex seed, double escape_radius) {
    Complex mu = seed;
    NewtonResult out;
    for (int it = 0; it < 60; ++it) {
        CharFn::Probe p = fn.probe(mu);
        if (!std::isfinite(std::abs(p.f)) || !std::isfinite(std::abs(p.fp))) return out;
        if (std::abs(p.f) <= 3.0 * p.noise_f) {
            // noise_f is a conservative bound, so one more correction usually
            // still gains position accuracy where |f'| is small; keep it only
            // when the residual actually drops
            if (std::abs(p.fp) > 0.0) {
                Complex polished = mu - p.f / p.fp;
                if (std::abs(polished - seed) <= escape_radius) {
                    CharFn::Probe fin = fn.probe(polished);
                    if (std::isfinite(std::abs(fin.f)) && std::abs(fin.f) <= std::abs(p.f)) {
                        mu = polished;
                        p = fin;
                    }
                }
            }
            out.root = mu;
            out.residual = std::abs(p.f);
            out.noise = p.noise_f;
            out.fp_abs = std::abs(p.fp);
            out.ok = true;
            return out;
        }
        if (std::abs(p.fp) == 0.0) return out;
        Complex step = p.f / p.fp;
        mu -= step;
        if (std::abs(mu - seed) > escape_radius) return out;
        if (std::abs(step) <= 1e-13 * (1.0 + std::abs(mu))) {
            CharFn::Probe fin = fn.probe(mu);
            out.root = mu;
            out.residual = std::abs(fin.f);
            out.noise = fin.noise_f;
            out.fp_abs = std::abs(fin.fp);
            out.ok = true;
            return out;
        }
    }
    return out;
}

struct CriticalPointResult {
    Complex mu_star{0.0, 0.0};
    Complex f_star{0.0, 0.0};
    Complex f_second{0.0, 0.0};
    double noise_f = 0.0;
    bool ok = false;
};

// Newton on f' locates the critical point inside a (near-)double cluster.
// f'' comes from a central difference of the analytic f'.
CriticalPointResult newton_derivative(const CharFn& fn, Complex seed, double escape_radius) {
    Complex mu = seed;
    CriticalPointResult out;
    auto finish = [&](Complex at) {
        CharFn::Probe p = fn.probe(at);
        double delta = 1e-5 * (1.0 + std::abs(at));
        CharFn::Probe hi = fn.probe(at + delta);
        CharFn::Probe lo = fn.probe(at - delta);
        out.mu_star = at;
        out.f_star = p.f;
        out.f_second = (hi.fp - lo.fp) / (2.0 * delta);
        out.noise_f = p.noise_f;
        out.ok = true;
    };
    for (int it = 0; it < 50; ++it) {
        double delta = 1e-5 * (1.0 + std::abs(mu));
        CharFn::Probe p = fn.probe(mu);
        if (std::abs(p.fp) <= 3.0 * p.noise_fp) {
            finish(mu);
            return out;
        }
        CharFn::Probe hi = fn.probe(mu + delta);
        CharFn::Probe lo = fn.probe(mu - delta);
        Complex g2 = (hi.fp - lo.fp) / (2.0 * delta);
        if (!std::isfinite(std::abs(g2)) || std::abs(g2) == 0.0) return out;
        Complex step = p.fp / g2;
        mu -= step;
        if (std::abs(mu - seed) > escape_radius) return out;
        if (std::abs(step) <= 1e-12 * (1.0 + std::abs(mu))) {
            finish(mu);
            return out;
        }
    }
    return out;
}

struct FoundRoot {
    Complex mu;
    int order = 1;
    double char_abs = 0.0;
    bool near_double = false;
};

struct BoxOutcome {
    std::vector<FoundRoot> roots;
    std::vector<SearchRegion> children;
    std::vector<SearchRegion> unresolved;
};

// Subdivision point sits slightly off-center so grid lines stay off the real
// axis, where the spectra of real potentials concentrate.
constexpr double kSplit = 17.0 / 32.0;

void subdivide(const SearchRegion& r, int depth, BoxOutcome& out) {
    if (depth + 1 > r.max_depth) {
        out.unresolved.push_back(r);
        return;
    }
    double rs = r.re_min + kSplit * r.width();
    double is = r.im_min + kSplit * r.height();
    out.children.push_back({r.re_min, rs, r.im_min, is, r.max_depth});
    out.children.push_back({rs, r.re_max, r.im_min, is, r.max_depth});
    out.children.push_back({r.re_min, rs, is, r.im_max, r.max_depth});
    out.children.push_back({rs, r.re_max, is, r.im_max, r.max_depth});
}

bool inside_inflated(const SearchRegion& r, Complex mu, double margin_frac) {
    double mw = margin_frac * r.width(), mh = margin_frac * r.height();
    return mu.real() >= r.re_min - mw && mu.real() <= r.re_max + mw &&
           mu.imag() >= r.im_min - mh && mu.imag() <= r.im_max + mh;
}

// Attempts to resolve a box with winding 1 or 2 into explicit roots. Returns
// false when the box should be subdivided instead. Counts stay sound without
// per-root recounts: every accepted root must lie in its certified box, and
// the top-level winding must equal the sum of accepted orders at the end.
bool refine_box(const CharFn& fn, const SearchRegion& box, const ContourOutcome& contour,
                const SearchRegion& outer, BoxOutcome& out) {
    double escape = 4.0 * box.diagonal() + 1.0;

    auto acceptable = [&](const NewtonResult& nr) {
        return nr.residual <= std::max(1e-7 * std::max(contour.scale, 1e-300), 10.0 * nr.noise);
    };
    auto in_boxes = [&](Complex mu) {
        return inside_inflated(box, mu, 0.3) && inside_inflated(outer, mu, 0.0);
    };

    if (contour.winding == 1) {
        Complex seed = contour.m1;
        if (!std::isfinite(std::abs(seed)) || !inside_inflated(box, seed, 0.5))
            seed = {0.5 * (box.re_min + box.re_max), 0.5 * (box.im_min + box.im_max)};
        NewtonResult nr = newton_simple(fn, seed, escape);
        if (!nr.ok || !acceptable(nr) || !in_boxes(nr.root)) return false;
        out.roots.push_back({nr.root, 1, nr.residual, false});
        return true;
    }

    // winding == 2: two zeros whose sum and sum of squares are known from the
    // contour moments.
    Complex m1 = contour.m1, m2 = contour.m2;
    Complex centroid = 0.5 * m1;
    if (!std::isfinite(std::abs(centroid)) || !inside_inflated(box, centroid, 0.5))
        centroid = {0.5 * (box.re_min + box.re_max), 0.5 * (box.im_min + box.im_max)};
    Complex disc = std::sqrt(2.0 * m2 - m1 * m1);
    if (!std::isfinite(std::abs(disc))) disc = {0.0, 0.0};

    // Two polished points only count as distinct roots when the separation
    // clears both position uncertainties: near an exact double zero Newton
    // stops anywhere inside a noise basin of radius sqrt(noise/|f''|), and
    // two such stop points must not masquerade as an open pair.
    auto resolved_pair = [](const NewtonResult& x, const NewtonResult& y) {
        double sep = std::abs(x.root - y.root);
        double ux = x.noise / std::max(x.fp_abs, 1e-300);
        double uy = y.noise / std::max(y.fp_abs, 1e-300);
        return std::max(ux, uy) <= 0.1 * sep;
    };

    NewtonResult ra = newton_simple(fn, centroid + 0.5 * disc, escape);
    NewtonResult rb = newton_simple(fn, centroid - 0.5 * disc, escape);
    double sep_tol = separation_threshold(centroid);

    if (ra.ok && rb.ok && std::abs(ra.root - rb.root) >= sep_tol && resolved_pair(ra, rb)) {
        if (!acceptable(ra) || !acceptable(rb)) return false;
        if (!in_boxes(ra.root) || !in_boxes(rb.root)) return false;
        out.roots.push_back({ra.root, 1, ra.residual, false});
        out.roots.push_back({rb.root, 1, rb.residual, false});
        return true;
    }

    // Collapsed cluster: find the critical point and let the local quadratic
    // model decide between one double zero and a tiny pair.
    Complex cp_seed = (ra.ok && rb.ok) ? 0.5 * (ra.root + rb.root) : (ra.ok ? ra.root : centroid);
    CriticalPointResult cp = newton_derivative(fn, cp_seed, escape);
    if (!cp.ok || !in_boxes(cp.mu_star)) return false;

    sep_tol = separation_threshold(cp.mu_star);

    if (std::abs(cp.f_star) <= 100.0 * cp.noise_f) {
        // Indistinguishable from an exact double zero at integration accuracy.
        out.roots.push_back({cp.mu_star, 2, std::abs(cp.f_star), false});
        return true;
    }

    if (std::abs(cp.f_second) == 0.0) return false;
    Complex delta = std::sqrt(-2.0 * cp.f_star / cp.f_second);
    double sep_est = 2.0 * std::abs(delta);

    if (sep_est >= sep_tol) {
        // A resolvable pair after all; polish each half from inside its own
        // basin (the quadratic model puts the seeds there).
        NewtonResult pa = newton_simple(fn, cp.mu_star + delta, escape);
        NewtonResult pb = newton_simple(fn, cp.mu_star - delta, escape);
        if (pa.ok && pb.ok && acceptable(pa) && acceptable(pb) && resolved_pair(pa, pb) &&
            in_boxes(pa.root) && in_boxes(pb.root)) {
            bool near = std::abs(pa.root - pb.root) < sep_tol;
            out.roots.push_back({pa.root, 1, pa.residual, near});
            out.roots.push_back({pb.root, 1, pb.residual, near});
            return true;
        }
        // Polish could not separate them beyond the noise; fall through to
        // the model-pair report.
    }

    // A pair below the resolution limit: report the quadratic-model members
    // rather than overclaiming an exact double.
    if (!in_boxes(cp.mu_star + delta) || !in_boxes(cp.mu_star - delta)) return false;
    out.roots.push_back({cp.mu_star + delta, 1, std::abs(cp.f_star), true});
    out.roots.push_back({cp.mu_star - delta, 1, std::abs(cp.f_star), true});
    return true;
}

BoxOutcome process_box(const CharFn& fn, const SearchRegion& box, int depth,
                       const SearchRegion& outer) {
    BoxOutcome out;
    ContourOutcome contour;
    int per_side = std::max(16, 64 >> std::min(depth, 2));
    try {
        SearchRegion used = box;
        contour = rect_contour(fn, box, per_side, used);
    } catch (const ConvergenceError&) {
        // The box contour is pathologically close to a zero; subdividing
        // moves the edges, so split instead of giving up.
        subdivide(box, depth, out);
        return out;
    }
    if (contour.winding == 0) return out;

    bool small_enough = box.diagonal() <= 2.0;
    if (contour.winding <= 2 && small_enough && refine_box(fn, box, contour, outer, out))
        return out;

    out.roots.clear();
    subdivide(box, depth, out);
    return out;
}

MultiplicityResult multiplicity_impl(const Potential& q, Complex mu, ProblemTag tag,
                                     const IntegratorConfig& cfg) {
    if (tag != ProblemTag::P && tag != ProblemTag::AP)
        throw ValidationError("geometric multiplicity applies to P and AP problems only");
    TransferState m = monodromy(q, mu, cfg);
    double sign = tag == ProblemTag::P ? 1.0 : -1.0;
    double resid = std::max(std::abs(m.c - sign) + std::abs(m.s),
                            std::abs(m.cp) + std::abs(m.sp - sign));
    double scale = std::max(std::abs(m.c) + std::abs(m.s), std::abs(m.cp) + std::abs(m.sp));
    MultiplicityResult out;
    out.monodromy_residual = resid;
    out.multiplicity = resid < 1e-7 * (1.0 + scale) ? 2 : 1;
    return out;
}

} // namespace

Complex char_value(const Potential& q, ProblemTag tag, Complex mu, const IntegratorConfig& cfg) {
    return CharFn{q, tag, cfg}.value(mu);
}

int count_zeros(const Potential& q, ProblemTag tag, const SearchRegion& region,
                const IntegratorConfig& cfg) {
    region.validate();
    CharFn fn{q, tag, cfg};
    SearchRegion used = region;
    return rect_contour(fn, region, 64, used).winding;
}

SpectrumReport find_eigenvalues(const Potential& q, ProblemTag tag, const SearchRegion& region,
                                const IntegratorConfig& cfg) {
    region.validate();
    cfg.validate();
    CharFn fn{q, tag, cfg};

    SpectrumReport report;
    report.tag = tag;

    // Top-level count; the possibly dilated rectangle becomes the root box so
    // the final bookkeeping compares like with like.
    SearchRegion root = region;
    ContourOutcome top = rect_contour(fn, region, 64, root);
    report.region = root;
    report.winding_total = top.winding;
    if (top.winding == 0) return report;

    std::vector<FoundRoot> found;
    std::vector<std::pair<SearchRegion, int>> frontier{{root, 0}};
    while (!frontier.empty()) {
        std::vector<BoxOutcome> results(frontier.size());
        parallel_for(frontier.size(), [&](std::size_t i) {
            results[i] = process_box(fn, frontier[i].first, frontier[i].second, root);
        });
        std::vector<std::pair<SearchRegion, int>> next;
        for (std::size_t i = 0; i < results.size(); ++i) {
            int depth = frontier[i].second;
            for (const FoundRoot& r : results[i].roots) found.push_back(r);
            for (const SearchRegion& c : results[i].children) next.emplace_back(c, depth + 1);
            for (const SearchRegion& u : results[i].unresolved) report.unresolved.push_back(u);
        }
        frontier = std::move(next);
    }

    // Roots on shared box edges are found from both sides; keep one copy.
    std::sort(found.begin(), found.end(), [](const FoundRoot& a, const FoundRoot& b) {
        if (a.mu.real() != b.mu.real()) return a.mu.real() < b.mu.real();
        if (a.mu.imag() != b.mu.imag()) return a.mu.imag() < b.mu.imag();
        return a.order > b.order;
    });
    std::vector<FoundRoot> unique;
    for (const FoundRoot& r : found) {
        if (!unique.empty() &&
            std::abs(r.mu - unique.back().mu) < 1e-9 * (1.0 + std::abs(r.mu))) {
            if (r.order > unique.back().order) unique.back() = r;
            continue;
        }
        unique.push_back(r);
    }

    // A double zero split by integration bias lands as two nearby zeros of the
    // measured function, possibly certified from different boxes. Whenever two
    // simple roots sit close, the critical point between them arbitrates: a
    // critical value at the noise floor means the instrument cannot separate
    // the pair, and one order-2 root at the critical point is the honest
    // report. Genuinely resolved pairs keep a critical value far above noise
    // and pass through unchanged.
    std::vector<FoundRoot> resolved;
    for (std::size_t i = 0; i < unique.size(); ++i) {
        if (i + 1 < unique.size() && unique[i].order == 1 && unique[i + 1].order == 1) {
            Complex a = unique[i].mu, b = unique[i + 1].mu;
            double gap = std::abs(a - b);
            if (gap <= 1e-2 * (1.0 + std::sqrt(std::abs(a)))) {
                Complex mid = 0.5 * (a + b);
                double escape = std::max(4.0 * gap, 1e-3 * (1.0 + std::abs(mid)));
                CriticalPointResult cp = newton_derivative(fn, mid, escape);
                // Newton value-exits anywhere inside the basin where |f| sinks
                // below noise, so the members scatter up to the basin radius
                // around the true positions; allow that much slack between the
                // pair midpoint and the critical point.
                double basin = escape;
                if (std::abs(cp.f_second) > 0.0)
                    basin = std::min(basin,
                                     2.0 * std::sqrt(6.0 * cp.noise_f / std::abs(cp.f_second)));
                bool centered = cp.ok && std::abs(cp.mu_star - mid) <= 0.5 * gap + basin;
                bool clear = true;
                for (std::size_t j = 0; clear && j < unique.size(); ++j)
                    if (j != i && j != i + 1 &&
                        std::abs(unique[j].mu - cp.mu_star) < separation_threshold(cp.mu_star))
                        clear = false;
                if (centered && clear && std::abs(cp.f_star) <= 100.0 * cp.noise_f) {
                    resolved.push_back({cp.mu_star, 2, std::abs(cp.f_star), false});
                    ++i;
                    continue;
                }
            }
        }
        resolved.push_back(unique[i]);
    }

    for (const FoundRoot& r : resolved) {
        Eigenvalue ev;
        ev.mu = r.mu;
        ev.tag = tag;
        ev.algebraic_order = r.order;
        ev.char_residual = r.char_abs;
        ev.near_double = r.near_double;
        if (tag == ProblemTag::P || tag == ProblemTag::AP) {
            MultiplicityResult m = multiplicity_impl(q, r.mu, tag, cfg);
            ev.geometric_multiplicity = m.multiplicity;
            ev.monodromy_residual = m.monodromy_residual;
        }
        report.eigenvalues.push_back(ev);
        report.refined_total += r.order;
    }

    if (tag == ProblemTag::P && !report.eigenvalues.empty()) {
        std::size_t lowest = 0;
        for (std::size_t i = 1; i < report.eigenvalues.size(); ++i) {
            Complex a = report.eigenvalues[i].mu, b = report.eigenvalues[lowest].mu;
            if (a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag())) lowest = i;
        }
        report.eigenvalues[lowest].is_lowest = true;
    }

    if (report.unresolved.empty() && report.refined_total != report.winding_total) {
        std::ostringstream os;
        os << "eigenvalue search bookkeeping failed for " << tag_name(tag) << ": contour count "
           << report.winding_total << " but " << report.refined_total
           << " zeros were refined; the region boundary may graze a zero";
        throw ConvergenceError(os.str());
    }
    return report;
}

MultiplicityResult geometric_multiplicity(const Potential& q, Complex mu, ProblemTag tag,
                                          const IntegratorConfig& cfg) {
    return multiplicity_impl(q, mu, tag, cfg);
}

NormalizationResult normalize_to_zero(const Potential& q, ProblemTag tag, ShiftPick pick,
                                      const IntegratorConfig& cfg) {
    SpectrumReport report = find_eigenvalues(q, tag, default_search_region(q), cfg);
    if (report.eigenvalues.empty())
        throw ConvergenceError("no " + tag_name(tag) +
                               " eigenvalue found in the default region; enlarge the region");
    std::size_t best = 0;
    for (std::size_t i = 1; i < report.eigenvalues.size(); ++i) {
        Complex a = report.eigenvalues[i].mu, b = report.eigenvalues[best].mu;
        bool better;
        if (pick == ShiftPick::Lowest)
            better = a.real() < b.real() ||
                     (a.real() == b.real() && std::abs(a.imag()) < std::abs(b.imag()));
        else
            better = std::abs(a) < std::abs(b);
        if (better) best = i;
    }
    NormalizationResult out;
    out.shift = report.eigenvalues[best].mu;
    out.spec = q.spec();
    out.spec.offset -= out.shift;
    return out;
}

NormalizationResult normalize_half_neumann(const Potential& q, const IntegratorConfig& cfg) {
    return normalize_to_zero(q, ProblemTag::NHalf, ShiftPick::Lowest, cfg);
}

} // namespace hillspec
