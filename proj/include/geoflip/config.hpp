#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace geoflip {

// Central tolerance and budget knobs. Every operation that needs a tolerance
// takes a Config so the constants live in exactly one place.
struct Config {
    double iso_tol = 1e-9;            // isometry normalization / round-trip identities
    double horocycle_tol = 1e-9;      // window on |center| + radius - 1 for tangency
    double duplicate_tol = 1e-12;     // coincident-vertex rejection on insert
    double element_match_tol = 1e-7;  // identification of Mobius group elements
    int canonicalize_steps = 1000;    // walk budget for domain reduction
    std::size_t group_ball_cap = 1000000;
    std::int64_t flip_budget = 100000000;
    int walk_restart_factor = 10;     // locate restarts after factor * |F| steps
};

// GEOFLIP_MAX_BALL overrides the group-ball cap.
inline Config default_config() {
    Config c;
    if (const char* s = std::getenv("GEOFLIP_MAX_BALL")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(s, &end, 10);
        if (end != s && *end == '\0' && v > 0) c.group_ball_cap = static_cast<std::size_t>(v);
    }
    return c;
}

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct io_error : error {
    using error::error;
};
struct structural_error : error {
    using error::error;
};
struct resource_error : error {
    using error::error;
};
struct contract_error : error {
    using error::error;
};
struct numeric_error : error {
    using error::error;
};

}  // namespace geoflip
