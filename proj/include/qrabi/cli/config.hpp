#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrabi/types.hpp"

namespace qrabi::cli {

enum class Command { MeanfieldSweep, Portrait, GapSweep, PhotonSweep, CatProtocol, CatSweep };

const char* to_string(Command c);
// Throws ConfigError for an unknown name.
Command command_from_string(const std::string& name);

// Raised for anything wrong with the user's configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

// Keys are normalized to snake_case ("g-min" and "g_min" are the same key).
using KeyValues = std::map<std::string, std::string>;

std::string normalize_key(std::string key);

// Flat "key = value" lines; '#' starts a comment. ConfigError on malformed
// lines or duplicate keys, std::ios_base::failure if unreadable.
KeyValues parse_key_values(const std::string& text, const std::string& origin);
KeyValues read_config_file(const std::filesystem::path& path);

struct RunConfig {
    Command command = Command::MeanfieldSweep;
    std::filesystem::path output_dir;
    int parallel = 1;
    std::uint64_t seed = 0;

    // coupling grid (all sweeps); `g` for the single-point commands
    double g_min = 0.0;
    double g_max = 2.0;
    int g_steps = 201;
    double g = 0.6;

    // mean field
    std::vector<double> h_values{1.0};
    double eta = 0.0; // 0 = infinite (reduced system)
    double t_max = 200.0;
    int samples = 2001;
    int trajectories = 8;
    double radius = 1.0;

    // Liouvillian
    std::vector<double> zeta_values{30.0};
    Index fock_dim = 0; // 0 = truncation rule
    int n_eigenvalues = 8;
    double degeneracy_threshold = 1e-8;
    bool dump_steady_states = false;

    // cat protocol
    double g_target = 0.0;
    double g_err = 0.5;
    double tau = 1.0;
    double t_corr = 1.0;
    Complex ce{0.0, 0.0};
    Complex co{0.0, 0.0};
    bool asymptotic = false;

    // every accepted key with its resolved value, defaults included
    std::map<std::string, std::string> echo;
};

// Every key the command accepts, in declaration order.
std::vector<std::string> known_keys(Command command);

// Merges file values with flag values (flags win), applies per-command
// defaults and validates. ConfigError naming the key on any violation.
RunConfig parse_config(Command command, const KeyValues& file_values, const KeyValues& flag_values);

// "0.6", "0.6+0.8i", "-0.5i", "1e-3-2i".
Complex parse_complex(const std::string& text);

} // namespace qrabi::cli
