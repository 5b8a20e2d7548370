#include "hillspec/harness.hpp"
#include "hillspec/version.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hillspec {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json complex_pair(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json match_json(const MatchResult& m) {
    ordered_json j;
    if (std::isfinite(m.distance))
        j["distance"] = m.distance;
    else
        j["distance"] = "infinity";
    j["count_a"] = m.count_a;
    j["count_b"] = m.count_b;
    j["cardinality_match"] = m.cardinality_match;
    j["ambiguous"] = m.ambiguous;
    return j;
}

ordered_json row_json(const DoublenessRow& row) {
    ordered_json j;
    j["mu"] = complex_pair(row.mu);
    j["algebraic_order"] = row.algebraic_order;
    j["geometric_multiplicity"] = row.geometric_multiplicity;
    j["monodromy_residual"] = row.monodromy_residual;
    j["near_double"] = row.near_double;
    j["is_lowest"] = row.is_lowest;
    return j;
}

std::string efmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

} // namespace

std::string report_to_json(const VerificationReport& r) {
    ordered_json j;
    j["meta"] = {
        {"tool", kToolName},
        {"version", kToolVersion},
        {"config", r.canonical_config},
        {"config_hash", config_hash(r.canonical_config)},
        {"tolerances",
         {{"integration", tol::integration},
          {"root", tol::root},
          {"identity", tol::identity},
          {"verdict", tol::verdict}}},
    };
    j["potential_id"] = r.potential_id;

    const ConditionReport& c = r.condition_report;
    j["condition_report"] = {
        {"norm", c.norm == NormKind::L2 ? "l2" : "sup"},
        {"tolerance", c.tolerance},
        {"half_factorization", {{"residual", c.residual_b}, {"holds", c.condition_b_holds}}},
        {"unit_factorization", {{"residual", c.residual_bb}, {"holds", c.condition_bb_holds}}},
        {"half_reflection", {{"residual", c.residual_sym_half}, {"holds", c.symmetric_half}}},
        {"unit_reflection", {{"residual", c.residual_sym_unit}, {"holds", c.symmetric_unit}}},
    };

    ordered_json ids;
    for (const auto& [name, value] : r.identity_residuals) ids[name] = value;
    j["identities"] = ids;

    ordered_json matches;
    for (const auto& [name, m] : r.spectra_matches) matches[name] = match_json(m);
    j["spectra_matches"] = matches;

    const DoublenessReport& d = r.doubleness;
    ordered_json pd;
    pd["shift"] = complex_pair(d.shift);
    pd["factorization_residual"] = d.b_residual;
    pd["reflection_residual"] = d.sym_half_residual;
    pd["condition_tolerance"] = d.condition_tolerance;
    pd["conditions_hold"] = d.conditions_hold;
    ordered_json prows = ordered_json::array(), aprows = ordered_json::array();
    for (const DoublenessRow& row : d.p_rows) prows.push_back(row_json(row));
    for (const DoublenessRow& row : d.ap_rows) aprows.push_back(row_json(row));
    pd["periodic"] = prows;
    pd["anti_periodic"] = aprows;
    pd["periodic_all_double"] = d.p_all_double;
    pd["anti_periodic_all_double"] = d.ap_all_double;
    pd["ambiguous"] = d.ambiguous;
    pd["verdict"] = verdict_name(d.verdict);
    pd["explanation"] = d.explanation;
    j["doubleness"] = pd;

    ordered_json verdicts;
    for (const auto& [name, v] : r.verdicts)
        verdicts[name] = {{"verdict", verdict_name(v.verdict)}, {"explanation", v.explanation}};
    j["verdicts"] = verdicts;

    return j.dump(2) + "\n";
}

std::string report_to_text(const VerificationReport& r) {
    std::ostringstream os;
    os << file_header(r.canonical_config) << "\n";
    os << "potential " << r.potential_id << "\n\n";

    const ConditionReport& c = r.condition_report;
    os << "conditions (norm " << (c.norm == NormKind::L2 ? "l2" : "sup") << ", tolerance "
       << efmt(c.tolerance) << ")\n";
    auto cond_line = [&](const char* name, double resid, bool holds) {
        os << "  " << name << " residual " << efmt(resid) << "  "
           << (holds ? "holds" : "fails") << "\n";
    };
    cond_line("half factorization", c.residual_b, c.condition_b_holds);
    cond_line("unit factorization", c.residual_bb, c.condition_bb_holds);
    cond_line("half reflection   ", c.residual_sym_half, c.symmetric_half);
    cond_line("unit reflection   ", c.residual_sym_unit, c.symmetric_unit);

    os << "\nidentity residuals (max over probe grid)\n";
    for (const auto& [name, value] : r.identity_residuals)
        os << "  " << name << "  " << efmt(value) << "\n";

    os << "\nspectra matches\n";
    for (const auto& [name, m] : r.spectra_matches) {
        os << "  " << name << "  ";
        if (m.cardinality_match)
            os << "distance " << efmt(m.distance);
        else
            os << "count mismatch " << m.count_a << " vs " << m.count_b;
        if (m.ambiguous) os << " (ambiguous)";
        os << "\n";
    }

    const DoublenessReport& d = r.doubleness;
    os << "\nmultiplicity survey (gauge shift re " << efmt(d.shift.real()) << ", im "
       << efmt(d.shift.imag()) << ")\n";
    auto rows = [&](const char* label, const std::vector<DoublenessRow>& list) {
        os << "  " << label << "\n";
        char buf[160];
        for (const DoublenessRow& row : list) {
            std::snprintf(buf, sizeof(buf),
                          "    mu=(%.12g, %.12g) order=%d geometric=%d residual=%.3e%s%s\n",
                          row.mu.real(), row.mu.imag(), row.algebraic_order,
                          row.geometric_multiplicity, row.monodromy_residual,
                          row.near_double ? " near-double" : "", row.is_lowest ? " lowest" : "");
            os << buf;
        }
    };
    rows("periodic", d.p_rows);
    rows("anti-periodic", d.ap_rows);

    os << "\nverdicts\n";
    for (const auto& [name, v] : r.verdicts)
        os << "  " << name << ": " << verdict_name(v.verdict) << "\n    " << v.explanation << "\n";
    return os.str();
}

} // namespace hillspec
