#include "hillspec/version.hpp"

#include <cstdint>
#include <sstream>

namespace hillspec {

std::string config_hash(const std::string& canonical) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

std::string file_header(const std::string& canonical_config) {
    std::ostringstream os;
    os << kToolName << ' ' << kToolVersion << " config=" << config_hash(canonical_config)
       << ' ' << canonical_config;
    return os.str();
}

} // namespace hillspec
