#pragma once

#include <string>
#include <string_view>

namespace hillspec {

inline constexpr std::string_view kToolName = "hillspec";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Default tolerance ladder. Each layer is roughly two orders looser than the
// one below it, so failures point at the layer that actually broke.
namespace tol {
inline constexpr double integration = 1e-10; // relative ODE tolerance
inline constexpr double root = 1e-8;         // eigenvalue location
inline constexpr double identity = 1e-6;     // analytic identity residuals
inline constexpr double verdict = 1e-5;      // theorem-level verdicts
} // namespace tol

// FNV-1a over a canonical key=value rendering; used to stamp output files so
// runs with different settings are distinguishable.
std::string config_hash(const std::string& canonical);

// "tool=hillspec 0.1.0 ..." one-line header written as a comment into every
// output file.
std::string file_header(const std::string& canonical_config);

} // namespace hillspec
