#pragma once

#include <stdexcept>
#include <string>

namespace qldev {

// Error taxonomy shared across modules.  The CLI maps these onto exit codes:
// capacity_error -> 3, everything else derived from error -> 2.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

struct validation_error : error { using error::error; };
struct domain_error : error { using error::error; };
struct support_error : error { using error::error; };
struct rank_error : error { using error::error; };
struct structure_error : error { using error::error; };
struct boundary_error : error { using error::error; };
struct feasibility_error : error { using error::error; };
struct estimation_error : error { using error::error; };
struct config_error : error { using error::error; };
struct capacity_error : error { using error::error; };

}  // namespace qldev
