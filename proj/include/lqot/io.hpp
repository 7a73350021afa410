// JSON/CSV serialization: problem and measure files, plan and curve exports,
// verification reports, and the machine-readable error envelope.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lqot/comparison.hpp"
#include "lqot/discrete.hpp"
#include "lqot/dynamics.hpp"
#include "lqot/error.hpp"
#include "lqot/interpolation.hpp"
#include "lqot/measure.hpp"

namespace lqot {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// {"A": [[...]], "B": [[...]], "Q": [[...]], "T": number}
LQProblem problem_from_json_text(const std::string& text);
std::string problem_to_json_text(const LQProblem& p);
LQProblem load_problem(const std::string& path);
void save_problem(const LQProblem& p, const std::string& path);

// {"type": "discrete", "points": [[...]], "weights": [...]} or
// {"type": "gaussian", "mean": [...], "cov": [[...]]}
Measure measure_from_json_text(const std::string& text);
std::string measure_to_json_text(const Measure& m);
Measure load_measure(const std::string& path);
void save_measure(const Measure& m, const std::string& path);

// FNV-1a over the canonical problem JSON; stable across runs.
std::uint64_t problem_hash(const LQProblem& p);
std::string hash_hex(std::uint64_t h);

std::string plan_to_json_text(const TransportPlan& plan);
std::string plan_to_csv(const TransportPlan& plan);

// tau, state, costate, control, running action; one row per grid node.
std::string trajectory_to_csv(const LQProblem& p, const Trajectory& traj);

// Discrete: one row per (tau, atom); Gaussian: one row per tau with mean and
// covariance entries.
std::string curve_to_csv(const MeasureCurve& curve);

std::string distortion_to_csv(const DistortionCurve& curve);

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct Report {
    std::string suite;
    std::uint64_t seed = 0;
    std::string problem_hash;  // hex; empty when no single fixed problem
    std::vector<Check> checks;

    bool all_pass() const;
};

std::string report_to_json_text(const Report& r);
std::string reports_to_json_text(const std::vector<Report>& rs);

std::string error_envelope_json(ErrorCode code, const std::string& message);

}  // namespace lqot
