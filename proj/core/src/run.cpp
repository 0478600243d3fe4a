#include "uhlq/run.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace uhlq {

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

double require_finite_number(const json& j, const std::string& key, const std::string& where)
{
    if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
    const double v = j.at(key).get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + ": '" + key + "' must be finite");
    return v;
}

Complex parse_entry(const json& e, const std::string& where)
{
    if (e.is_number()) return Complex(e.get<double>(), 0.0);
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        return Complex(e[0].get<double>(), e[1].get<double>());
    throw ConfigError(where + ": matrix entries must be numbers or [re, im] pairs");
}

Matrix parse_matrix(const json& j, const std::string& key, const std::string& where)
{
    if (!j.contains(key)) throw ConfigError(where + ": missing matrix '" + key + "'");
    const json& rows = j.at(key);
    if (!rows.is_array() || rows.empty())
        throw ConfigError(where + ": '" + key + "' must be a non-empty array of rows");
    const std::size_t n = rows.size();
    Matrix m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        const json& row = rows[r];
        if (!row.is_array() || row.size() != n)
            throw ConfigError(where + ": '" + key + "' must be square");
        for (std::size_t c = 0; c < n; ++c) m(r, c) = parse_entry(row[c], where);
    }
    if (!m.allFinite()) throw ConfigError(where + ": '" + key + "' has non-finite entries");
    return m;
}

RunConfig parse_run_config(const json& j)
{
    RunConfig cfg;

    if (!j.contains("scenario") || !j.at("scenario").is_object())
        throw ConfigError("config: missing 'scenario' section");
    const json& sc = j.at("scenario");
    if (sc.contains("H0") || sc.contains("H")) {
        GenericScenarioConfig g;
        g.h0 = parse_matrix(sc, "H0", "scenario");
        g.h = parse_matrix(sc, "H", "scenario");
        g.beta = require_finite_number(sc, "beta", "scenario");
        if (g.beta < 0.0) throw ConfigError("scenario: 'beta' must be non-negative");
        if (sc.contains("period")) {
            const double tau = require_finite_number(sc, "period", "scenario");
            if (!(tau > 0.0)) throw ConfigError("scenario: 'period' must be positive");
            g.period = tau;
        }
        cfg.scenario = std::move(g);
    } else {
        SpinScenarioConfig s;
        s.omega0 = require_finite_number(sc, "omega0", "scenario");
        s.temperature = require_finite_number(sc, "temperature", "scenario");
        s.theta = require_finite_number(sc, "theta", "scenario");
        s.phi = sc.contains("phi") ? require_finite_number(sc, "phi", "scenario") : 0.0;
        if (!(s.omega0 > 0.0)) throw ConfigError("scenario: 'omega0' must be positive");
        if (!(s.temperature > 0.0)) throw ConfigError("scenario: 'temperature' must be positive");
        cfg.scenario = s;
    }

    if (!j.contains("grid") || !j.at("grid").is_object())
        throw ConfigError("config: missing 'grid' section");
    cfg.grid.t_max = require_finite_number(j.at("grid"), "t_max", "grid");
    cfg.grid.dt = require_finite_number(j.at("grid"), "dt", "grid");
    if (!(cfg.grid.dt > 0.0)) throw ConfigError("grid: 'dt' must be positive");
    if (!(cfg.grid.t_max > 0.0)) throw ConfigError("grid: 't_max' must be positive");
    if (!(cfg.grid.dt < cfg.grid.t_max)) throw ConfigError("grid: 'dt' must be smaller than 't_max'");

    if (!j.contains("outputs") || !j.at("outputs").is_object())
        throw ConfigError("config: missing 'outputs' section");
    const json& out = j.at("outputs");
    if (!out.contains("path") || !out.at("path").is_string() ||
        out.at("path").get<std::string>().empty())
        throw ConfigError("outputs: 'path' must be a non-empty string");
    cfg.outputs.path = out.at("path").get<std::string>();
    if (out.contains("format")) {
        const std::string f = out.at("format").get<std::string>();
        if (f == "csv")
            cfg.outputs.format = OutputFormat::csv;
        else if (f == "json")
            cfg.outputs.format = OutputFormat::json;
        else
            throw ConfigError("outputs: 'format' must be \"csv\" or \"json\"");
    }

    if (j.contains("analysis")) {
        const json& an = j.at("analysis");
        if (an.contains("detect_gdqpt")) {
            if (!an.at("detect_gdqpt").is_boolean())
                throw ConfigError("analysis: 'detect_gdqpt' must be a boolean");
            cfg.analysis.detect_gdqpt = an.at("detect_gdqpt").get<bool>();
        }
        if (an.contains("cyclic_n_max")) {
            if (!an.at("cyclic_n_max").is_number_integer())
                throw ConfigError("analysis: 'cyclic_n_max' must be an integer");
            cfg.analysis.cyclic_n_max = an.at("cyclic_n_max").get<int>();
            if (cfg.analysis.cyclic_n_max < 0)
                throw ConfigError("analysis: 'cyclic_n_max' must be non-negative");
        }
    }
    return cfg;
}

json load_json_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open '" + path + "'");
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
    }
}

} // namespace

RunConfig load_run_config(const std::string& path)
{
    try {
        return parse_run_config(load_json_file(path));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

SweepConfig load_sweep_config(const std::string& path)
{
    const json j = load_json_file(path);
    try {
        SweepConfig sweep;
        sweep.base = parse_run_config(j);
        if (!std::holds_alternative<SpinScenarioConfig>(sweep.base.scenario))
            throw ConfigError("sweep: the base scenario must be the spin form");
        if (!j.contains("temperatures") || !j.at("temperatures").is_array() ||
            j.at("temperatures").empty())
            throw ConfigError("sweep: missing non-empty 'temperatures' array");
        for (const json& t : j.at("temperatures")) {
            if (!t.is_number() || !(t.get<double>() > 0.0))
                throw ConfigError("sweep: temperatures must be positive numbers");
            sweep.temperatures.push_back(t.get<double>());
        }
        return sweep;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

QuenchScenario scenario_from_config(const RunConfig& config)
{
    if (const auto* spin = std::get_if<SpinScenarioConfig>(&config.scenario)) {
        return make_scenario(
            SpinHalfParams(spin->omega0, spin->temperature, spin->theta, spin->phi));
    }
    const auto& g = std::get<GenericScenarioConfig>(config.scenario);
    return QuenchScenario(HermitianMatrix(g.h0), HermitianMatrix(g.h), g.beta, g.period);
}

RunResult compute_trajectory(const RunConfig& config)
{
    const QuenchScenario scenario = scenario_from_config(config);
    if (scenario.commuting())
        std::cerr << "warning: [H, rho0] = 0; the Uhlmann process is trivial for this quench\n";

    const TrajectoryEvaluator eval(scenario);
    const TrajectoryFn fn = [&](double t) { return eval(t); };
    const std::vector<TrajectorySample> samples =
        scan_trajectory(fn, config.grid.t_max, config.grid.dt);

    RunResult result;
    if (config.analysis.detect_gdqpt) {
        result.events = find_critical_times(samples, fn, &result.diagnostics);
        detect_phase_jumps(result.events, samples, fn);
    }
    if (config.analysis.cyclic_n_max > 0)
        result.cyclic = cyclic_samples(eval, config.analysis.cyclic_n_max, result.events);

    result.trajectory.reserve(samples.size());
    for (const TrajectorySample& s : samples) {
        TrajectoryRecord rec;
        rec.t = s.t;
        rec.g = s.g;
        rec.phase_defined = s.phase_defined;
        rec.theta_g = s.theta_g;
        rec.r = s.r;
        result.trajectory.push_back(rec);
    }
    // pin each cyclic reading onto the nearest grid row
    for (const CyclicSample& cs : result.cyclic) {
        const auto idx = static_cast<std::size_t>(std::llround(cs.t / config.grid.dt));
        if (idx >= result.trajectory.size()) continue;
        if (std::abs(result.trajectory[idx].t - cs.t) > 0.5 * config.grid.dt * (1.0 + 1e-9))
            continue;
        result.trajectory[idx].is_cyclic = true;
        result.trajectory[idx].theta_u_defined = cs.phase_defined;
        result.trajectory[idx].theta_u = cs.theta_u;
    }
    return result;
}

namespace {

void write_file_atomic(const fs::path& path, const std::string& content)
{
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open '" + tmp.string() + "' for writing");
        os << content;
        if (!os) throw Error("failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

std::string trajectory_csv(const std::vector<TrajectoryRecord>& rows)
{
    std::string out = "t,re_G,im_G,abs_G,theta_G,r,is_cyclic,theta_U\n";
    for (const TrajectoryRecord& r : rows) {
        out += format_double(r.t);
        out += ',';
        out += format_double(r.g.real());
        out += ',';
        out += format_double(r.g.imag());
        out += ',';
        out += format_double(std::abs(r.g));
        out += ',';
        if (r.phase_defined) out += format_double(r.theta_g);
        out += ',';
        out += r.r.divergent ? "inf" : format_double(r.r.value);
        out += ',';
        out += r.is_cyclic ? '1' : '0';
        out += ',';
        if (r.is_cyclic && r.theta_u_defined) out += format_double(r.theta_u);
        out += '\n';
    }
    return out;
}

std::string events_csv(const std::vector<GdqptEvent>& events)
{
    std::string out = "n,t_star,jump,abs_G,refinement_width\n";
    for (const GdqptEvent& e : events) {
        out += std::to_string(e.index);
        out += ',';
        out += format_double(e.t_star);
        out += ',';
        if (e.jump_known) out += format_double(e.jump);
        out += ',';
        out += format_double(e.refined_abs_g);
        out += ',';
        out += format_double(e.refinement_width);
        out += '\n';
    }
    return out;
}

std::string cyclic_csv(const std::vector<CyclicSample>& cyclic)
{
    std::string out = "n,t,theta_U,crossings_before,class\n";
    for (const CyclicSample& c : cyclic) {
        out += std::to_string(c.n);
        out += ',';
        out += format_double(c.t);
        out += ',';
        if (c.phase_defined) out += format_double(c.theta_u);
        out += ',';
        out += std::to_string(c.crossings_before);
        out += ',';
        out += to_string(c.cls);
        out += '\n';
    }
    return out;
}

std::string trajectory_json(const std::vector<TrajectoryRecord>& rows)
{
    std::string out = "[\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const TrajectoryRecord& r = rows[i];
        out += "  {\"t\":" + format_double(r.t);
        out += ",\"re_G\":" + format_double(r.g.real());
        out += ",\"im_G\":" + format_double(r.g.imag());
        out += ",\"abs_G\":" + format_double(std::abs(r.g));
        out += ",\"theta_G\":" + (r.phase_defined ? format_double(r.theta_g) : "null");
        out += ",\"r\":";
        out += r.r.divergent ? "\"inf\"" : format_double(r.r.value);
        out += ",\"is_cyclic\":";
        out += r.is_cyclic ? "true" : "false";
        out += ",\"theta_U\":" +
               (r.is_cyclic && r.theta_u_defined ? format_double(r.theta_u) : "null");
        out += i + 1 < rows.size() ? "},\n" : "}\n";
    }
    out += "]\n";
    return out;
}

std::string events_json(const std::vector<GdqptEvent>& events)
{
    std::string out = "[\n";
    for (std::size_t i = 0; i < events.size(); ++i) {
        const GdqptEvent& e = events[i];
        out += "  {\"n\":" + std::to_string(e.index);
        out += ",\"t_star\":" + format_double(e.t_star);
        out += ",\"jump\":" + (e.jump_known ? format_double(e.jump) : "null");
        out += ",\"abs_G\":" + format_double(e.refined_abs_g);
        out += ",\"refinement_width\":" + format_double(e.refinement_width);
        out += i + 1 < events.size() ? "},\n" : "}\n";
    }
    out += "]\n";
    return out;
}

std::string cyclic_json(const std::vector<CyclicSample>& cyclic)
{
    std::string out = "[\n";
    for (std::size_t i = 0; i < cyclic.size(); ++i) {
        const CyclicSample& c = cyclic[i];
        out += "  {\"n\":" + std::to_string(c.n);
        out += ",\"t\":" + format_double(c.t);
        out += ",\"theta_U\":" + (c.phase_defined ? format_double(c.theta_u) : "null");
        out += ",\"crossings_before\":" + std::to_string(c.crossings_before);
        out += ",\"class\":\"" + std::string(to_string(c.cls)) + "\"";
        out += i + 1 < cyclic.size() ? "},\n" : "}\n";
    }
    out += "]\n";
    return out;
}

} // namespace

void write_outputs(const RunResult& result, const OutputConfig& outputs)
{
    const fs::path dir(outputs.path);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());

    if (outputs.format == OutputFormat::csv) {
        write_file_atomic(dir / "trajectory.csv", trajectory_csv(result.trajectory));
        write_file_atomic(dir / "events.csv", events_csv(result.events));
        write_file_atomic(dir / "cyclic.csv", cyclic_csv(result.cyclic));
    } else {
        write_file_atomic(dir / "trajectory.json", trajectory_json(result.trajectory));
        write_file_atomic(dir / "events.json", events_json(result.events));
        write_file_atomic(dir / "cyclic.json", cyclic_json(result.cyclic));
    }
}

void run_trajectory(const RunConfig& config)
{
    write_outputs(compute_trajectory(config), config.outputs);
}

int thread_count_from_env()
{
    if (const char* env = std::getenv("UHLQ_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

void run_sweep(const SweepConfig& config, int threads)
{
    if (threads <= 0) threads = thread_count_from_env();
    threads = std::min<int>(threads, static_cast<int>(config.temperatures.size()));

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= config.temperatures.size()) return;
            try {
                RunConfig run = config.base;
                auto spin = std::get<SpinScenarioConfig>(run.scenario);
                spin.temperature = config.temperatures[i];
                run.scenario = spin;
                run.outputs.path = (fs::path(config.base.outputs.path) /
                                    ("T" + format_double(config.temperatures[i])))
                                       .string();
                run_trajectory(run);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

void run_figure1(const std::string& out_dir)
{
    const double half_pi = 0.5 * std::numbers::pi;
    const std::pair<double, const char*> presets[] = {{1.0, "T1.0"}, {0.01, "T0.01"}};
    for (const auto& [temperature, label] : presets) {
        RunConfig cfg;
        cfg.scenario = SpinScenarioConfig{1.0, temperature, half_pi, 0.0};
        cfg.grid = {20.0, 0.01};
        cfg.outputs = {(fs::path(out_dir) / label).string(), OutputFormat::csv};
        cfg.analysis = {true, 3};
        run_trajectory(cfg);
    }
}

} // namespace uhlq
