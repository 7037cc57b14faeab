#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace delayopt {

// Failure classes. The CLI maps them onto process exit codes: computation
// failures (domain, degenerate, numeric, insufficient data) exit 1,
// input/usage failures (bad file content, bad invocation) exit 2.
enum class errc {
    out_of_domain,      // argument outside the mathematical domain of the operation
    degenerate,         // structurally singular configuration (vanishing denominator, rank loss)
    numeric_failure,    // divergence or non-convergence during evaluation
    insufficient_data,  // too few points/rows for the requested operation
    bad_input,          // malformed file or scenario content
    usage,              // bad flags, missing files, invalid configuration
};

class error : public std::runtime_error {
public:
    error(errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw error(code, msg); }

// Non-fatal findings attached to results (model-validity notes, boundary
// conditions, value injections). `code` is a stable machine-readable tag.
struct Warning {
    std::string code;
    std::string message;
};

using WarningList = std::vector<Warning>;

}  // namespace delayopt
