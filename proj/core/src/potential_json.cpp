#include "hillspec/errors.hpp"
#include "hillspec/potential.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hillspec {

namespace {

using nlohmann::ordered_json;

Complex parse_complex(const ordered_json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ValidationError(where + ": complex values are [re, im] number pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Complex> parse_complex_list(const ordered_json& j, const std::string& where) {
    if (!j.is_array()) throw ValidationError(where + ": expected an array");
    std::vector<Complex> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(parse_complex(e, where));
    return out;
}

std::vector<double> parse_real_list(const ordered_json& j, const std::string& where) {
    if (!j.is_array()) throw ValidationError(where + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_number()) throw ValidationError(where + ": expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<Complex> zip_samples(const std::vector<double>& re, const std::vector<double>& im,
                                 const std::string& where) {
    if (re.size() != im.size())
        throw ValidationError(where + ": 're' and 'im' arrays must have equal length");
    std::vector<Complex> out(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) out[i] = {re[i], im[i]};
    return out;
}

void reject_unknown(const ordered_json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ValidationError(where + ": unknown key '" + it.key() + "'");
}

const std::map<std::string, PotentialKind> kKinds = {
    {"zero", PotentialKind::Zero},
    {"constant", PotentialKind::Constant},
    {"fourier", PotentialKind::Fourier},
    {"polynomial_piece", PotentialKind::PolynomialPiece},
    {"samples", PotentialKind::Samples},
    {"b_family", PotentialKind::BFamily},
};

const std::map<std::string, ExtensionMode> kExtensions = {
    {"half_period", ExtensionMode::HalfPeriod},
    {"reflect_about_half", ExtensionMode::ReflectAboutHalf},
    {"explicit_tail", ExtensionMode::ExplicitTail},
};

ordered_json complex_json(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json complex_list_json(const std::vector<Complex>& v) {
    ordered_json out = ordered_json::array();
    for (Complex z : v) out.push_back(complex_json(z));
    return out;
}

} // namespace

PotentialSpec potential_from_json(const std::string& text) {
    // Files written by the tool start with a "# hillspec ..." header line.
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t line_start = pos;
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
        if (pos < text.size() && text[pos] == '#') {
            while (pos < text.size() && text[pos] != '\n') ++pos;
            if (pos < text.size()) ++pos;
        } else {
            pos = line_start;
            break;
        }
    }

    ordered_json j;
    try {
        j = ordered_json::parse(text.substr(pos));
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("potential spec is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("potential spec must be a JSON object");
    reject_unknown(j, {"kind", "params", "grid_n", "extension_mode"}, "potential spec");

    if (!j.contains("kind") || !j["kind"].is_string())
        throw ValidationError("potential spec: 'kind' must be a string");
    auto kind_it = kKinds.find(j["kind"].get<std::string>());
    if (kind_it == kKinds.end())
        throw ValidationError("potential spec: unknown kind '" + j["kind"].get<std::string>() + "'");

    PotentialSpec spec;
    spec.kind = kind_it->second;

    if (j.contains("grid_n")) {
        if (!j["grid_n"].is_number_integer())
            throw ValidationError("potential spec: 'grid_n' must be an integer");
        spec.grid_n = j["grid_n"].get<int>();
    }
    if (j.contains("extension_mode")) {
        if (!j["extension_mode"].is_string())
            throw ValidationError("potential spec: 'extension_mode' must be a string");
        auto ext_it = kExtensions.find(j["extension_mode"].get<std::string>());
        if (ext_it == kExtensions.end())
            throw ValidationError("potential spec: unknown extension_mode '" +
                                  j["extension_mode"].get<std::string>() + "'");
        spec.extension = ext_it->second;
    }

    ordered_json params = ordered_json::object();
    if (j.contains("params")) {
        if (!j["params"].is_object())
            throw ValidationError("potential spec: 'params' must be an object");
        params = j["params"];
    }
    if (params.contains("offset")) spec.offset = parse_complex(params["offset"], "params.offset");

    switch (spec.kind) {
        case PotentialKind::Zero:
            reject_unknown(params, {"offset"}, "params (zero)");
            break;
        case PotentialKind::Constant:
            reject_unknown(params, {"offset", "value"}, "params (constant)");
            if (!params.contains("value"))
                throw ValidationError("params (constant): missing 'value'");
            spec.constant_value = parse_complex(params["value"], "params.value");
            break;
        case PotentialKind::Fourier:
            reject_unknown(params, {"offset", "a0", "cos", "sin"}, "params (fourier)");
            if (params.contains("a0")) spec.fourier_a0 = parse_complex(params["a0"], "params.a0");
            if (params.contains("cos"))
                spec.fourier_cos = parse_complex_list(params["cos"], "params.cos");
            if (params.contains("sin"))
                spec.fourier_sin = parse_complex_list(params["sin"], "params.sin");
            break;
        case PotentialKind::PolynomialPiece:
            reject_unknown(params, {"offset", "coeffs"}, "params (polynomial_piece)");
            if (!params.contains("coeffs"))
                throw ValidationError("params (polynomial_piece): missing 'coeffs'");
            spec.poly_coeffs = parse_complex_list(params["coeffs"], "params.coeffs");
            break;
        case PotentialKind::Samples: {
            reject_unknown(params, {"offset", "re", "im"}, "params (samples)");
            if (!params.contains("re") || !params.contains("im"))
                throw ValidationError("params (samples): missing 're' or 'im'");
            auto re = parse_real_list(params["re"], "params.re");
            auto im = parse_real_list(params["im"], "params.im");
            spec.samples = zip_samples(re, im, "params (samples)");
            break;
        }
        case PotentialKind::BFamily: {
            reject_unknown(params, {"offset", "q2_coeffs", "tail_re", "tail_im"},
                           "params (b_family)");
            if (!params.contains("q2_coeffs"))
                throw ValidationError("params (b_family): missing 'q2_coeffs'");
            spec.q2_coeffs = parse_complex_list(params["q2_coeffs"], "params.q2_coeffs");
            if (params.contains("tail_re") || params.contains("tail_im")) {
                if (!params.contains("tail_re") || !params.contains("tail_im"))
                    throw ValidationError("params (b_family): need both 'tail_re' and 'tail_im'");
                auto re = parse_real_list(params["tail_re"], "params.tail_re");
                auto im = parse_real_list(params["tail_im"], "params.tail_im");
                spec.tail = zip_samples(re, im, "params (b_family tail)");
            }
            break;
        }
    }

    spec.validate();
    return spec;
}

std::string potential_to_json(const PotentialSpec& spec) {
    spec.validate();
    ordered_json j;
    ordered_json params = ordered_json::object();
    switch (spec.kind) {
        case PotentialKind::Zero:
            j["kind"] = "zero";
            break;
        case PotentialKind::Constant:
            j["kind"] = "constant";
            params["value"] = complex_json(spec.constant_value);
            break;
        case PotentialKind::Fourier:
            j["kind"] = "fourier";
            params["a0"] = complex_json(spec.fourier_a0);
            params["cos"] = complex_list_json(spec.fourier_cos);
            params["sin"] = complex_list_json(spec.fourier_sin);
            break;
        case PotentialKind::PolynomialPiece:
            j["kind"] = "polynomial_piece";
            params["coeffs"] = complex_list_json(spec.poly_coeffs);
            break;
        case PotentialKind::Samples: {
            j["kind"] = "samples";
            ordered_json re = ordered_json::array(), im = ordered_json::array();
            for (Complex z : spec.samples) {
                re.push_back(z.real());
                im.push_back(z.imag());
            }
            params["re"] = std::move(re);
            params["im"] = std::move(im);
            break;
        }
        case PotentialKind::BFamily: {
            j["kind"] = "b_family";
            params["q2_coeffs"] = complex_list_json(spec.q2_coeffs);
            if (!spec.tail.empty()) {
                ordered_json re = ordered_json::array(), im = ordered_json::array();
                for (Complex z : spec.tail) {
                    re.push_back(z.real());
                    im.push_back(z.imag());
                }
                params["tail_re"] = std::move(re);
                params["tail_im"] = std::move(im);
            }
            break;
        }
    }
    if (spec.offset != Complex{0.0, 0.0}) params["offset"] = complex_json(spec.offset);
    j["params"] = std::move(params);
    j["grid_n"] = spec.grid_n;
    j["extension_mode"] = spec.extension == ExtensionMode::HalfPeriod ? "half_period"
                          : spec.extension == ExtensionMode::ReflectAboutHalf
                              ? "reflect_about_half"
                              : "explicit_tail";
    return j.dump(2) + "\n";
}

PotentialSpec load_potential_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open potential file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return potential_from_json(buf.str());
}

} // namespace hillspec
