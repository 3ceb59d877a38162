#include "qrabi/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <regex>
#include <sstream>
#include <thread>

namespace qrabi::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw ConfigError(key, key + ": " + what);
}

double to_double(const std::string& key, const std::string& text, bool allow_inf = false) {
    const std::string t = trim(text);
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (t.empty() || ec != std::errc() || ptr != last)
        bad(key, "cannot parse '" + text + "' as a number");
    if (std::isnan(v) || (!allow_inf && std::isinf(v)))
        bad(key, "value '" + text + "' is not finite");
    return v;
}

long long to_integer(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        bad(key, "cannot parse '" + text + "' as an integer");
    return v;
}

bool to_bool(const std::string& key, const std::string& text) {
    std::string t = trim(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "1" || t == "yes" || t == "on")
        return true;
    if (t == "false" || t == "0" || t == "no" || t == "off")
        return false;
    bad(key, "expected true or false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_double(key, item));
    if (out.empty())
        bad(key, "expected a comma-separated list of numbers");
    return out;
}

struct KeyDefault {
    const char* key;
    std::string value;
};

std::vector<KeyDefault> defaults_for(Command c) {
    const std::string sqrt2 = fmt(std::numbers::sqrt2);
    const std::string half_sqrt2 = fmt(std::numbers::sqrt2 / 2.0);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::vector<KeyDefault> keys{{"out", ""}, {"parallel", std::to_string(hw)}, {"seed", "0"}};
    auto add = [&](std::initializer_list<KeyDefault> more) {
        keys.insert(keys.end(), more.begin(), more.end());
    };
    switch (c) {
    case Command::MeanfieldSweep:
        add({{"g_min", "0"}, {"g_max", "2"}, {"g_steps", "201"}, {"h", "1"}});
        break;
    case Command::Portrait:
        add({{"g", "0.6"}, {"h", "0.25"}, {"eta", "inf"}, {"t_max", "200"}, {"samples", "2001"},
             {"trajectories", "8"}, {"radius", "1"}});
        break;
    case Command::GapSweep:
        add({{"g_min", "0.5"}, {"g_max", "2"}, {"g_steps", "31"}, {"zeta", "10,20,30"},
             {"fock_dim", "0"}, {"n_eigenvalues", "8"}, {"degeneracy_threshold", "1e-8"},
             {"dump_steady_states", "false"}});
        break;
    case Command::PhotonSweep:
        add({{"g_min", "0.5"}, {"g_max", "2"}, {"g_steps", "31"}, {"zeta", "10,20,30"},
             {"fock_dim", "0"}});
        break;
    case Command::CatProtocol:
        add({{"g_target", sqrt2}, {"g_err", "0.5"}, {"tau", "1"}, {"t_corr", "1"}, {"zeta", "30"},
             {"fock_dim", "0"}, {"ce", half_sqrt2}, {"co", half_sqrt2}, {"asymptotic", "false"}});
        break;
    case Command::CatSweep:
        add({{"g_min", "0.2"}, {"g_max", "2"}, {"g_steps", "19"}, {"g_target", sqrt2},
             {"tau", "1"}, {"t_corr", "1"}, {"zeta", "30"}, {"fock_dim", "0"}, {"ce", half_sqrt2},
             {"co", half_sqrt2}});
        break;
    }
    return keys;
}

} // namespace

const char* to_string(Command c) {
    switch (c) {
    case Command::MeanfieldSweep: return "meanfield-sweep";
    case Command::Portrait: return "portrait";
    case Command::GapSweep: return "gap-sweep";
    case Command::PhotonSweep: return "photon-sweep";
    case Command::CatProtocol: return "cat-protocol";
    case Command::CatSweep: return "cat-sweep";
    }
    return "?";
}

std::vector<std::string> known_keys(Command command) {
    std::vector<std::string> keys;
    for (const auto& d : defaults_for(command))
        keys.push_back(d.key);
    return keys;
}

Command command_from_string(const std::string& name) {
    for (Command c : {Command::MeanfieldSweep, Command::Portrait, Command::GapSweep,
                      Command::PhotonSweep, Command::CatProtocol, Command::CatSweep})
        if (name == to_string(c))
            return c;
    throw ConfigError("command", "command: unknown command '" + name + "'");
}

std::string normalize_key(std::string key) {
    key = trim(key);
    while (!key.empty() && key.front() == '-')
        key.erase(key.begin());
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

KeyValues parse_key_values(const std::string& text, const std::string& origin) {
    KeyValues out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos)
            throw ConfigError("", where + ": expected key = value, got '" + line + "'");
        const std::string key = normalize_key(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("", where + ": missing key");
        if (out.count(key))
            throw ConfigError(key, key + ": given twice (" + where + ")");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::ios_base::failure("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str(), path.string());
}

Complex parse_complex(const std::string& text) {
    static const std::regex pattern(
        R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*(?:([+-])\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*i)?\s*$)");
    std::smatch m;
    if (text.find_first_not_of(" \t") == std::string::npos || !std::regex_match(text, m, pattern))
        throw std::invalid_argument("not a complex number: '" + text + "'");
    double re = 0.0, im = 0.0;
    if (m[2].matched) {
        im = m[3].matched ? std::stod(m[3].str()) : 1.0;
        if (m[2].str() == "-")
            im = -im;
        if (m[1].matched)
            re = std::stod(m[1].str());
    } else if (m[1].matched) {
        re = std::stod(m[1].str());
    } else {
        throw std::invalid_argument("not a complex number: '" + text + "'");
    }
    return {re, im};
}

RunConfig parse_config(Command command, const KeyValues& file_values, const KeyValues& flag_values) {
    const auto defaults = defaults_for(command);
    KeyValues values;
    for (const auto& d : defaults)
        values[d.key] = d.value;
    auto merge = [&](const KeyValues& src) {
        for (const auto& [raw, v] : src) {
            const std::string key = normalize_key(raw);
            if (!values.count(key))
                throw ConfigError(key, key + ": not a recognized key for " +
                                           std::string(to_string(command)));
            values[key] = v;
        }
    };
    merge(file_values);
    merge(flag_values);

    RunConfig cfg;
    cfg.command = command;
    cfg.echo = values;
    auto has = [&](const char* k) { return values.count(k) > 0; };
    auto num = [&](const char* k) { return to_double(k, values.at(k)); };
    auto integer = [&](const char* k) { return to_integer(k, values.at(k)); };
    auto require = [](bool ok, const char* k, const std::string& what) {
        if (!ok)
            bad(k, what);
    };

    cfg.output_dir = values.at("out");
    require(!cfg.output_dir.empty(), "out", "an output directory is required");
    const long long parallel = integer("parallel");
    require(parallel >= 1 && parallel <= 4096, "parallel", "must be between 1 and 4096");
    cfg.parallel = static_cast<int>(parallel);
    const long long seed = integer("seed");
    require(seed >= 0, "seed", "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);

    if (has("g_min")) {
        cfg.g_min = num("g_min");
        cfg.g_max = num("g_max");
        const long long steps = integer("g_steps");
        require(cfg.g_min >= 0.0, "g_min", "must be non-negative");
        require(cfg.g_max >= cfg.g_min, "g_max", "must not be below g_min");
        require(steps >= 1 && steps <= 100000, "g_steps", "must be between 1 and 100000");
        require(steps == 1 || cfg.g_max > cfg.g_min, "g_max", "must exceed g_min for several steps");
        cfg.g_steps = static_cast<int>(steps);
    }
    if (has("g")) {
        cfg.g = num("g");
        require(cfg.g >= 0.0, "g", "must be non-negative");
    }
    if (has("h")) {
        cfg.h_values = to_list("h", values.at("h"));
        for (double h : cfg.h_values)
            require(h >= 0.0, "h", "must be non-negative");
        if (command == Command::Portrait)
            require(cfg.h_values.size() == 1, "h", "takes a single value for portrait");
    }
    if (has("eta")) {
        const double eta = to_double("eta", values.at("eta"), true);
        require(eta > 0.0, "eta", "must be positive (inf selects the reduced system)");
        cfg.eta = std::isinf(eta) ? 0.0 : eta;
    }
    if (has("t_max")) {
        cfg.t_max = num("t_max");
        require(cfg.t_max > 0.0, "t_max", "must be positive");
        const long long samples = integer("samples");
        require(samples >= 2 && samples <= 10000000, "samples", "must be between 2 and 1e7");
        cfg.samples = static_cast<int>(samples);
        const long long traj = integer("trajectories");
        require(traj >= 1 && traj <= 10000, "trajectories", "must be between 1 and 10000");
        cfg.trajectories = static_cast<int>(traj);
        cfg.radius = num("radius");
        require(cfg.radius > 0.0, "radius", "must be positive");
    }
    if (has("zeta")) {
        cfg.zeta_values = to_list("zeta", values.at("zeta"));
        for (double z : cfg.zeta_values)
            require(z > 0.0, "zeta", "must be positive");
        if (command == Command::CatProtocol)
            require(cfg.zeta_values.size() == 1, "zeta", "takes a single value for cat-protocol");
    }
    if (has("fock_dim")) {
        const long long n = integer("fock_dim");
        require(n == 0 || (n >= 2 && n <= 2000), "fock_dim",
                "must be 0 (automatic) or between 2 and 2000");
        cfg.fock_dim = static_cast<Index>(n);
    }
    if (has("n_eigenvalues")) {
        const long long k = integer("n_eigenvalues");
        require(k >= 5 && k <= 500, "n_eigenvalues", "must be between 5 and 500");
        cfg.n_eigenvalues = static_cast<int>(k);
        cfg.degeneracy_threshold = num("degeneracy_threshold");
        require(cfg.degeneracy_threshold > 0.0, "degeneracy_threshold", "must be positive");
        cfg.dump_steady_states = to_bool("dump_steady_states", values.at("dump_steady_states"));
    }
    if (has("g_target")) {
        cfg.g_target = num("g_target");
        require(std::abs(cfg.g_target - std::numbers::sqrt2) <= 1e-12, "g_target",
                "the cat code is stationary only at sqrt(2)");
        cfg.tau = num("tau");
        require(cfg.tau >= 0.0, "tau", "must be non-negative");
        cfg.t_corr = num("t_corr");
        require(cfg.t_corr >= 0.0, "t_corr", "must be non-negative");
        for (const char* k : {"ce", "co"}) {
            Complex c;
            try {
                c = parse_complex(values.at(k));
            } catch (const std::exception&) {
                bad(k, "cannot parse '" + values.at(k) + "' as a complex number");
            }
            (std::string(k) == "ce" ? cfg.ce : cfg.co) = c;
        }
        const double norm = std::norm(cfg.ce) + std::norm(cfg.co);
        require(std::abs(norm - 1.0) <= 1e-10, "ce",
                "|ce|^2 + |co|^2 must equal 1, got " + fmt(norm));
    }
    if (has("g_err")) {
        cfg.g_err = num("g_err");
        require(cfg.g_err >= 0.0, "g_err", "must be non-negative");
    }
    if (has("asymptotic"))
        cfg.asymptotic = to_bool("asymptotic", values.at("asymptotic"));
    return cfg;
}

} // namespace qrabi::cli
