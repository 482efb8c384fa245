#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gridcred {

// Error categories map 1:1 onto CLI exit codes (see cli_commands.hpp).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or physically inconsistent system / network data.
struct StructureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Archive / file parsing failures; message carries file and line context.
struct IngestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Regression / curve-fit failures (rank deficiency, too few samples, ...).
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Load-adjustment search could not bracket the reliability target.
struct NonBracketableError : std::runtime_error {
    NonBracketableError(const std::string& msg, double lo_la, double lo_lolh,
                        double hi_la, double hi_lolh)
        : std::runtime_error(msg), la_low(lo_la), lolh_low(lo_lolh),
          la_high(hi_la), lolh_high(hi_lolh) {}
    double la_low;
    double lolh_low;
    double la_high;
    double lolh_high;
};

inline constexpr const char* kVersion = "0.1.0";

// FNV-1a, used for config provenance hashes.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace gridcred
