// Command-line runner: run, verify and export-matrix over a JSON experiment config.
//
// Exit codes: 0 success, 1 verification failed, 2 config error,
// 3 numerical error, 4 parse error.

#include "bfem/error.hpp"
#include "bfem/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

int report_error(const std::exception& e, int code) {
    std::cerr << "error: " << e.what() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian finite element experiments"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run an experiment and write its output files");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();

    auto* verify = app.add_subcommand("verify", "Run the invariant checks for an experiment");
    verify->add_option("config", config_path, "Experiment config (JSON)")->required();

    std::string which;
    std::string output;
    std::size_t case_index = 0;
    auto* exp = app.add_subcommand("export-matrix", "Dump an assembled matrix as 'row col value' triplets");
    exp->add_option("config", config_path, "Experiment config (JSON)")->required();
    exp->add_option("--which", which, "Matrix to export")->required()->check(CLI::IsMember({"K", "M", "Kc", "Phi"}));
    exp->add_option("--case", case_index, "Case index for multi-resolution configs");
    exp->add_option("-o,--output", output, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const auto config = bfem::load_config(config_path);
        if (run->parsed()) {
            const auto report = bfem::run_experiment(config);
            for (const auto& c : report["cases"])
                for (const auto& f : c["files"]) std::cout << (config.outputs.directory / f.get<std::string>()).string() << '\n';
            return 0;
        }
        if (verify->parsed()) {
            const auto checks = bfem::verify_experiment(config);
            bool ok = true;
            for (const auto& c : checks) {
                std::printf("%s %-52s value=%.3e bound=%.1e\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                            c.tolerance);
                ok = ok && c.pass;
            }
            std::printf("%s: %zu checks\n", ok ? "all passed" : "FAILED", checks.size());
            return ok ? 0 : 1;
        }
        if (output.empty()) {
            bfem::export_matrix(config, which, case_index, std::cout);
        } else {
            std::ofstream out(output);
            if (!out) throw bfem::ConfigError("--output", "cannot open '" + output + "'");
            bfem::export_matrix(config, which, case_index, out);
        }
        return 0;
    } catch (const bfem::ConfigError& e) {
        return report_error(e, 2);
    } catch (const bfem::ParseError& e) {
        return report_error(e, 4);
    } catch (const bfem::Error& e) {
        return report_error(e, 3);
    } catch (const std::exception& e) {
        return report_error(e, 3);
    }
}
