// Verification suites behind the CLI `verify` subcommand: each runs a set of
// seeded property checks for one module family and returns a Report.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lqot/dynamics.hpp"
#include "lqot/io.hpp"

namespace lqot {

struct VerifyOptions {
    std::uint64_t seed = 0;
    std::size_t problems = 4;       // seeded instances per suite
    std::size_t mc_samples = 5000;  // Monte-Carlo sample count
    std::map<std::string, double> tol;  // per-check overrides by check name
    std::optional<LQProblem> problem;   // run against this fixed problem
};

Report verify_dynamics(const VerifyOptions& opts);
Report verify_cost(const VerifyOptions& opts);
Report verify_ot(const VerifyOptions& opts);
Report verify_comparison(const VerifyOptions& opts);
Report verify_entropy(const VerifyOptions& opts);

std::vector<Report> verify_all(const VerifyOptions& opts);

}  // namespace lqot
