#include "hillspec/spectra.hpp"

#include <cstdio>
#include <ostream>

namespace hillspec {

namespace {
std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

std::string fmt_e(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}
} // namespace

void write_spectrum_csv(std::ostream& out, const SpectrumReport& report,
                        const std::string& config_line) {
    if (!config_line.empty()) out << "# " << config_line << "\n";
    out << "tag,re_mu,im_mu,algebraic_order,geometric_multiplicity,char_residual,"
           "monodromy_residual,is_lowest\n";
    for (const Eigenvalue& ev : report.eigenvalues) {
        out << tag_name(ev.tag) << ',' << fmt_g(ev.mu.real()) << ',' << fmt_g(ev.mu.imag()) << ','
            << ev.algebraic_order << ',';
        if (ev.geometric_multiplicity) out << *ev.geometric_multiplicity;
        out << ',' << fmt_e(ev.char_residual) << ',';
        if (ev.monodromy_residual) out << fmt_e(*ev.monodromy_residual);
        out << ',' << (ev.is_lowest ? "true" : "false") << "\n";
    }
}

} // namespace hillspec
