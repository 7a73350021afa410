#include "lqot/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "lqot/cost.hpp"

namespace lqot {

namespace {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        fail(ErrorCode::schema_error, "input is not valid JSON");
    return j;
}

const json& require_field(const json& j, const char* name) {
    if (!j.is_object() || !j.contains(name))
        fail(ErrorCode::schema_error,
             std::string("missing required field \"") + name + "\"");
    return j.at(name);
}

double number_from_json(const json& j, const char* name) {
    if (!j.is_number())
        fail(ErrorCode::schema_error,
             std::string("field \"") + name + "\" must be a number");
    return j.get<double>();
}

Vec vec_from_json(const json& j, const char* name) {
    if (!j.is_array())
        fail(ErrorCode::schema_error,
             std::string("field \"") + name + "\" must be an array");
    Vec v;
    v.reserve(j.size());
    for (const json& e : j) v.push_back(number_from_json(e, name));
    return v;
}

Matrix matrix_from_json(const json& j, const char* name) {
    if (!j.is_array() || j.empty())
        fail(ErrorCode::schema_error,
             std::string("field \"") + name +
                 "\" must be a non-empty array of rows");
    std::vector<Vec> rows;
    rows.reserve(j.size());
    for (const json& r : j) {
        rows.push_back(vec_from_json(r, name));
        if (rows.back().size() != rows.front().size())
            fail(ErrorCode::schema_error,
                 std::string("field \"") + name +
                     "\" must have rows of equal length");
        if (rows.back().empty())
            fail(ErrorCode::schema_error,
                 std::string("field \"") + name + "\" has an empty row");
    }
    return Matrix::from_rows(rows);
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::io_error, "cannot open file for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) fail(ErrorCode::io_error, "failed to read file: " + path);
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorCode::io_error, "cannot open file for writing: " + path);
    out << text;
    if (!out) fail(ErrorCode::io_error, "failed to write file: " + path);
}

LQProblem problem_from_json_text(const std::string& text) {
    const json j = parse_json(text);
    Matrix a = matrix_from_json(require_field(j, "A"), "A");
    Matrix b = matrix_from_json(require_field(j, "B"), "B");
    Matrix q = matrix_from_json(require_field(j, "Q"), "Q");
    const double T = number_from_json(require_field(j, "T"), "T");
    return LQProblem::create(std::move(a), std::move(b), std::move(q), T);
}

std::string problem_to_json_text(const LQProblem& p) {
    json j;
    j["A"] = matrix_to_json(p.A());
    j["B"] = matrix_to_json(p.B());
    j["Q"] = matrix_to_json(p.Q());
    j["T"] = p.T();
    return j.dump(2) + "\n";
}

LQProblem load_problem(const std::string& path) {
    return problem_from_json_text(read_text_file(path));
}

void save_problem(const LQProblem& p, const std::string& path) {
    write_text_file(path, problem_to_json_text(p));
}

Measure measure_from_json_text(const std::string& text) {
    const json j = parse_json(text);
    const json& type = require_field(j, "type");
    if (!type.is_string())
        fail(ErrorCode::schema_error, "field \"type\" must be a string");
    const std::string kind = type.get<std::string>();
    if (kind == "discrete") {
        const json& pts = require_field(j, "points");
        if (!pts.is_array())
            fail(ErrorCode::schema_error, "field \"points\" must be an array");
        std::vector<Vec> points;
        points.reserve(pts.size());
        for (const json& p : pts) points.push_back(vec_from_json(p, "points"));
        Vec weights = vec_from_json(require_field(j, "weights"), "weights");
        return Measure{make_discrete(std::move(points), std::move(weights))};
    }
    if (kind == "gaussian") {
        Vec mean = vec_from_json(require_field(j, "mean"), "mean");
        Matrix cov = matrix_from_json(require_field(j, "cov"), "cov");
        return Measure{make_gaussian(std::move(mean), std::move(cov))};
    }
    fail(ErrorCode::schema_error,
         "field \"type\" must be \"discrete\" or \"gaussian\"");
}

std::string measure_to_json_text(const Measure& m) {
    json j;
    if (const auto* d = std::get_if<DiscreteMeasure>(&m)) {
        j["type"] = "discrete";
        json pts = json::array();
        for (const Vec& p : d->points) pts.push_back(vec_to_json(p));
        j["points"] = std::move(pts);
        j["weights"] = vec_to_json(d->weights);
    } else {
        const auto& g = std::get<GaussianMeasure>(m);
        j["type"] = "gaussian";
        j["mean"] = vec_to_json(g.mean);
        j["cov"] = matrix_to_json(g.cov.mat());
    }
    return j.dump(2) + "\n";
}

Measure load_measure(const std::string& path) {
    return measure_from_json_text(read_text_file(path));
}

void save_measure(const Measure& m, const std::string& path) {
    write_text_file(path, measure_to_json_text(m));
}

std::uint64_t problem_hash(const LQProblem& p) {
    const std::string text = problem_to_json_text(p);
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

std::string plan_to_json_text(const TransportPlan& plan) {
    json j;
    j["n_source"] = plan.n_source;
    j["n_target"] = plan.n_target;
    j["matrix"] = matrix_to_json(plan.matrix);
    json entries = json::array();
    for (const PlanEntry& e : plan.entries) {
        json entry;
        entry["i"] = e.i;
        entry["j"] = e.j;
        entry["w"] = e.w;
        entries.push_back(std::move(entry));
    }
    j["entries"] = std::move(entries);
    return j.dump(2) + "\n";
}

std::string plan_to_csv(const TransportPlan& plan) {
    std::string out = "i,j,w\n";
    for (const PlanEntry& e : plan.entries) {
        out += std::to_string(e.i);
        out += ',';
        out += std::to_string(e.j);
        out += ',';
        out += format_double(e.w);
        out += '\n';
    }
    return out;
}

std::string trajectory_to_csv(const LQProblem& p, const Trajectory& traj) {
    const std::vector<double> running = action_running(p, traj);
    std::string out = "tau";
    for (std::size_t i = 0; i < p.n(); ++i)
        out += ",x" + std::to_string(i);
    for (std::size_t i = 0; i < p.n(); ++i)
        out += ",p" + std::to_string(i);
    for (std::size_t i = 0; i < p.m(); ++i)
        out += ",u" + std::to_string(i);
    out += ",running_action\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out += format_double(traj.times[k]);
        for (double v : traj.states[k]) out += "," + format_double(v);
        for (double v : traj.costates[k]) out += "," + format_double(v);
        for (double v : traj.controls[k]) out += "," + format_double(v);
        out += "," + format_double(running[k]) + "\n";
    }
    return out;
}

std::string curve_to_csv(const MeasureCurve& curve) {
    std::string out;
    if (const auto* d = std::get_if<DiscreteInterpolation>(&curve)) {
        const std::size_t count = d->pairs.size();
        const std::size_t n =
            count == 0 ? 0 : d->positions.front().size() / count;
        out = "tau,atom,weight";
        for (std::size_t i = 0; i < n; ++i) out += ",z" + std::to_string(i);
        out += "\n";
        for (std::size_t k = 0; k < d->times.size(); ++k) {
            for (std::size_t a = 0; a < count; ++a) {
                out += format_double(d->times[k]);
                out += "," + std::to_string(a);
                out += "," + format_double(d->pairs[a].w);
                for (std::size_t i = 0; i < n; ++i)
                    out += "," + format_double(d->positions[k][a * n + i]);
                out += "\n";
            }
        }
        return out;
    }
    const auto& g = std::get<GaussianInterpolation>(curve);
    const std::size_t n = g.measures.empty() ? 0 : g.measures.front().dim();
    out = "tau";
    for (std::size_t i = 0; i < n; ++i) out += ",mean" + std::to_string(i);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out += ",cov" + std::to_string(i) + "_" + std::to_string(j);
    out += "\n";
    for (std::size_t k = 0; k < g.times.size(); ++k) {
        out += format_double(g.times[k]);
        for (double v : g.measures[k].mean) out += "," + format_double(v);
        const Matrix& cov = g.measures[k].cov.mat();
        for (std::size_t i = 0; i < n * n; ++i)
            out += "," + format_double(cov.data()[i]);
        out += "\n";
    }
    return out;
}

std::string distortion_to_csv(const DistortionCurve& curve) {
    std::string out = "tau,beta\n";
    for (std::size_t k = 0; k < curve.taus.size(); ++k)
        out += format_double(curve.taus[k]) + "," +
               format_double(curve.betas[k]) + "\n";
    return out;
}

bool Report::all_pass() const {
    for (const Check& c : checks)
        if (!c.pass) return false;
    return true;
}

namespace {

json report_to_json(const Report& r) {
    json j;
    j["suite"] = r.suite;
    j["seed"] = r.seed;
    if (!r.problem_hash.empty()) j["problem_hash"] = r.problem_hash;
    json checks = json::array();
    std::size_t passed = 0;
    for (const Check& c : r.checks) {
        json jc;
        jc["name"] = c.name;
        jc["value"] = c.value;
        jc["tolerance"] = c.tolerance;
        jc["pass"] = c.pass;
        checks.push_back(std::move(jc));
        if (c.pass) ++passed;
    }
    j["checks"] = std::move(checks);
    j["summary"] = {{"total", r.checks.size()},
                    {"passed", passed},
                    {"all_pass", passed == r.checks.size()}};
    return j;
}

}  // namespace

std::string report_to_json_text(const Report& r) {
    return report_to_json(r).dump(2) + "\n";
}

std::string reports_to_json_text(const std::vector<Report>& rs) {
    json j;
    json arr = json::array();
    std::size_t total = 0, passed = 0;
    for (const Report& r : rs) {
        arr.push_back(report_to_json(r));
        for (const Check& c : r.checks) {
            ++total;
            if (c.pass) ++passed;
        }
    }
    j["reports"] = std::move(arr);
    j["summary"] = {{"total", total},
                    {"passed", passed},
                    {"all_pass", passed == total}};
    return j.dump(2) + "\n";
}

std::string error_envelope_json(ErrorCode code, const std::string& message) {
    json j;
    j["error"] = {{"code", Error::code_name(code)}, {"message", message}};
    return j.dump(2) + "\n";
}

}  // namespace lqot
