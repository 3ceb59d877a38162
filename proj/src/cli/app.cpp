#include "qrabi/cli/app.hpp"

#include <CLI11.hpp>

#include "qrabi/cli/runner.hpp"
#include "qrabi/error.hpp"

#ifndef QRABI_VERSION
#define QRABI_VERSION "dev"
#endif

namespace qrabi::cli {

namespace {

std::string flag_help(const std::string& key) {
    static const std::map<std::string, std::string> help{
        {"out", "output directory (created if missing)"},
        {"parallel", "worker threads; 1 gives the reproducible serial run"},
        {"seed", "seed for randomized utilities"},
        {"g_min", "first coupling of the grid"},
        {"g_max", "last coupling of the grid"},
        {"g_steps", "number of grid points"},
        {"g", "coupling"},
        {"h", "nonlinearity; comma list for meanfield-sweep"},
        {"eta", "frequency ratio; inf eliminates the spin"},
        {"t_max", "integration time"},
        {"samples", "output samples per trajectory"},
        {"trajectories", "number of trajectories"},
        {"radius", "radius of the starting circle"},
        {"zeta", "frequency ratio over two-photon loss; comma list for sweeps"},
        {"fock_dim", "oscillator truncation, 0 = automatic"},
        {"n_eigenvalues", "eigenvalues per parity sector"},
        {"degeneracy_threshold", "|Re lambda| counted as stationary"},
        {"dump_steady_states", "write steady-state matrices as binary files"},
        {"g_target", "stabilizing coupling (must be sqrt 2)"},
        {"g_err", "coupling during the error interval"},
        {"tau", "error interval"},
        {"t_corr", "correction interval"},
        {"ce", "even cat coefficient, e.g. 0.6 or 0.6+0.8i"},
        {"co", "odd cat coefficient"},
        {"asymptotic", "extend t_corr until the fidelity settles"},
    };
    const auto it = help.find(key);
    return it == help.end() ? key : it->second;
}

const char* command_help(Command c) {
    switch (c) {
    case Command::MeanfieldSweep: return "order parameter |alpha| over a coupling grid";
    case Command::Portrait: return "mean-field trajectories and fixed points at one coupling";
    case Command::GapSweep: return "Liouvillian gap and steady-state degeneracy over g and zeta";
    case Command::PhotonSweep: return "steady-state photon number <a^dag a>/zeta over g and zeta";
    case Command::CatProtocol: return "one error/correction cycle of the cat qubit";
    case Command::CatSweep: return "cat-qubit fidelities over g_err and zeta";
    }
    return "";
}

std::string flag_name(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return "--" + key;
}

struct Sub {
    Command command;
    CLI::App* app = nullptr;
    std::string config_file;
    std::map<std::string, std::string> values;
};

} // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dissipative quantum Rabi model: mean field, Liouvillian spectra and cat-qubit protection",
                 "qrabi"};
    app.set_version_flag("--version", std::string(QRABI_VERSION));
    app.require_subcommand(1);

    std::vector<std::unique_ptr<Sub>> subs;
    for (Command c : {Command::MeanfieldSweep, Command::Portrait, Command::GapSweep,
                      Command::PhotonSweep, Command::CatProtocol, Command::CatSweep}) {
        auto sub = std::make_unique<Sub>();
        sub->command = c;
        sub->app = app.add_subcommand(to_string(c), command_help(c));
        sub->app->set_help_flag("--help", "print this help and exit"); // -h is taken by --h
        sub->app->add_option("--config", sub->config_file, "key = value file; flags override it");
        for (const auto& key : known_keys(c))
            sub->app->add_option(flag_name(key), sub->values[key], flag_help(key));
        subs.push_back(std::move(sub));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << QRABI_VERSION << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    Sub* chosen = nullptr;
    for (auto& s : subs)
        if (s->app->parsed())
            chosen = s.get();

    RunConfig config;
    try {
        KeyValues file_values;
        if (!chosen->config_file.empty())
            file_values = read_config_file(chosen->config_file);
        KeyValues flag_values;
        for (const auto& [key, value] : chosen->values)
            if (chosen->app->get_option(flag_name(key))->count() > 0)
                flag_values[key] = value;
        config = parse_config(chosen->command, file_values, flag_values);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::ios_base::failure& e) {
        err << "i/o error: " << e.what() << "\n";
        return kIoError;
    }

    try {
        const RunManifest m = run(config);
        out << "wrote " << m.files.size() << " files and manifest.json to "
            << config.output_dir.string() << "\n";
        return kOk;
    } catch (const qrabi::Error& e) {
        if (e.kind() == ErrorKind::Io) {
            err << "i/o error: " << e.what() << "\n";
            return kIoError;
        }
        err << "numerical error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::ios_base::failure& e) {
        err << "i/o error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    }
}

} // namespace qrabi::cli
