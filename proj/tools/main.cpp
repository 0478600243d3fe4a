#include "uhlq/run.hpp"
#include "uhlq/validation.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

// exit-code contract: 0 ok, 1 failure, 2 invalid config, 3 full-rank
// violation, 4 cyclicity requested but absent
int guarded(const std::function<int()>& body)
{
    try {
        return body();
    } catch (const uhlq::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const uhlq::FullRankError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const uhlq::CyclicityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv)
try {
    CLI::App app{"Uhlmann-quench dynamics of mixed states: Loschmidt amplitudes, "
                 "geometric phases, rate functions, and GDQPT detection"};
    app.require_subcommand(1);

    std::string config_path;
    std::string level = "fast";
    std::string report_path;
    std::string out_dir;
    int threads = 0;

    CLI::App* trajectory = app.add_subcommand("trajectory", "Run one quench trajectory");
    trajectory->add_option("--config", config_path, "JSON run configuration")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "Run a temperature sweep concurrently");
    sweep->add_option("--config", config_path, "JSON sweep configuration")->required();
    sweep->add_option("--threads", threads, "Worker threads (default: UHLQ_THREADS or all cores)");

    CLI::App* validate = app.add_subcommand("validate", "Run the identity/oracle check suites");
    validate->add_option("--level", level, "fast or full")
        ->check(CLI::IsMember({"fast", "full"}));
    validate->add_option("--out", report_path, "Write the JSON report here instead of stdout");

    CLI::App* figure1 = app.add_subcommand("figure1", "Emit the two-temperature preset tables");
    figure1->add_option("--out", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (trajectory->parsed())
        return guarded([&] {
            uhlq::run_trajectory(uhlq::load_run_config(config_path));
            return 0;
        });

    if (sweep->parsed())
        return guarded([&] {
            uhlq::run_sweep(uhlq::load_sweep_config(config_path), threads);
            return 0;
        });

    if (validate->parsed())
        return guarded([&] {
            const auto lvl =
                level == "full" ? uhlq::ValidationLevel::full : uhlq::ValidationLevel::fast;
            const auto checks = uhlq::run_validation(lvl);
            const std::string report = uhlq::validation_report_json(checks, lvl);
            if (report_path.empty()) {
                std::cout << report;
            } else {
                std::ofstream os(report_path);
                if (!os) throw uhlq::Error("cannot open report path '" + report_path + "'");
                os << report;
            }
            return uhlq::all_passed(checks) ? 0 : 1;
        });

    return guarded([&] {
        uhlq::run_figure1(out_dir);
        return 0;
    });
} catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
} catch (...) {
    return 1;
}
