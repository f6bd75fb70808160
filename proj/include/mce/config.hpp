#pragma once

// Flat `key = value` run configuration with dotted section prefixes.
//
//   # comment
//   grid.N = 64
//   hamiltonian.variant = rwa
//
// Every key has a default; unknown keys are rejected. The resolved form is
// written as `# key = value` lines atop each CSV and parses back unchanged.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mce/baths.hpp"
#include "mce/channels.hpp"
#include "mce/dynamics.hpp"
#include "mce/errors.hpp"
#include "mce/hamiltonian.hpp"

namespace mce {

using KeyValues = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    return v;
}

inline long long parse_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    long long v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    return v;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw ConfigError(key + ": expected an unsigned integer, got '" + text + "'");
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError(key + ": expected true/false, got '" + text + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_double(key, item));
    }
    return out;
}

inline std::string format_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v[i]);
    }
    return out;
}

} // namespace detail

/// Parse `key = value` lines. `#` starts a comment; blank lines are skipped.
inline KeyValues parse_key_values(std::istream& is, const std::string& source = "config") {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
        kv[key] = detail::trim(line.substr(eq + 1));
    }
    return kv;
}

inline KeyValues read_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_key_values(in, path);
}

/// Apply a `key=value` override.
inline void apply_override(KeyValues& kv, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + assignment + "'");
    const std::string key = detail::trim(assignment.substr(0, eq));
    if (key.empty()) throw ConfigError("--set: empty key");
    kv[key] = detail::trim(assignment.substr(eq + 1));
}

enum class OracleKind { Auto, Sector, Fock };

struct ThermalConfig {
    double beta = std::numeric_limits<double>::infinity();
    int n_samples = 1;

    bool zero_temperature() const { return std::isinf(beta); }
};

struct SweepConfig {
    std::string parameter;  // empty: no sweep
    std::vector<double> values;
};

struct OracleConfig {
    OracleKind kind = OracleKind::Auto;
    int n_max = 6;
    int total_cap = -1;
    double bound = 0.02;
};

struct SimConfig {
    std::uint64_t seed = 1;

    Variant variant = Variant::RotatingWave;
    double epsilon = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double g1 = 1.0;
    double g2 = 1.9;
    PauliPlusConvention pauli_plus = PauliPlusConvention::Half;

    BathSpec bath;
    std::string bath_file;  // used when bath.kind = file
    bool bath_from_file = false;

    GridInit grid;
    IntegratorConfig integrator;
    TimeGrid time{4.0, 5};
    ThermalConfig temperature;
    SweepConfig sweep;
    OracleConfig oracle;

    Tomography tomography = Tomography::Full;
    bool dump_channels = false;
    int initial_state = 1;                 // basis label used by `simulate`
    std::vector<double> initial_amplitudes;  // optional re,im pairs overriding initial_state
    double divergence_tol = 0.01;

    /// Time unit: outputs are in g1 * t for uniform couplings, else in t.
    double time_unit() const {
        if (bath_from_file || bath.kind == BathKind::Ohmic || g1 == 0.0) return 1.0;
        return std::abs(g1);
    }

    void validate() const {
        grid.validate();
        integrator.validate();
        time.validate();
        if (!(temperature.beta > 0.0)) throw ConfigError("temperature.beta must be > 0 (inf for zero temperature)");
        if (temperature.n_samples < 1) throw ConfigError("temperature.N_T must be >= 1");
        if (initial_state < 1 || initial_state > 4) throw ConfigError("initial.state must be in 1..4");
        if (!initial_amplitudes.empty() && initial_amplitudes.size() != 8)
            throw ConfigError("initial.amplitudes needs 8 numbers (re,im for each basis state)");
        if (!sweep.parameter.empty()) {
            const auto& p = sweep.parameter;
            if (p != "g2" && p != "beta" && p != "N" && p != "comp")
                throw ConfigError("sweep.parameter must be one of g2, beta, N, comp (got '" + p + "')");
            if (sweep.values.empty()) throw ConfigError("sweep.values is empty");
        }
        if (oracle.n_max < 1) throw ConfigError("oracle.n_max must be >= 1");
        if (!(oracle.bound > 0.0)) throw ConfigError("oracle.bound must be > 0");
        if (!(divergence_tol > 0.0)) throw ConfigError("divergence.tol must be > 0");
        if (bath_from_file && bath_file.empty()) throw ConfigError("bath.kind = file requires bath.file");
        if (!bath_from_file) bath.validate();
    }
};

namespace detail {

inline const char* variant_name(Variant v) { return v == Variant::SpinBoson ? "spin_boson" : "rwa"; }
inline const char* convention_name(PauliPlusConvention c) { return c == PauliPlusConvention::Paper ? "paper" : "half"; }
inline const char* method_name(IntegratorMethod m) { return m == IntegratorMethod::RK45 ? "rk45" : "rk4"; }
inline const char* tomography_name(Tomography t) { return t == Tomography::Symmetric ? "symmetric" : "full"; }

inline const char* oracle_name(OracleKind k) {
    switch (k) {
    case OracleKind::Sector: return "sector";
    case OracleKind::Fock: return "fock";
    default: return "auto";
    }
}

inline const char* bath_name(const SimConfig& c) {
    if (c.bath_from_file) return "file";
    switch (c.bath.kind) {
    case BathKind::DegenerateDouble: return "degenerate_double";
    case BathKind::Ohmic: return "ohmic";
    default: return "linear";
    }
}

template <class E>
E parse_enum(const std::string& key, const std::string& text, std::initializer_list<std::pair<const char*, E>> table) {
    const std::string t = trim(text);
    std::string allowed;
    for (const auto& [name, value] : table) {
        if (t == name) return value;
        allowed += allowed.empty() ? name : std::string("|") + name;
    }
    throw ConfigError(key + ": expected " + allowed + ", got '" + text + "'");
}

inline int parse_positive_int(const std::string& key, const std::string& text) {
    const long long v = parse_int(key, text);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ConfigError(key + ": integer out of range");
    return static_cast<int>(v);
}

} // namespace detail

/// Canonical key = value listing; the order is fixed.
inline std::vector<std::pair<std::string, std::string>> resolved_entries(const SimConfig& c) {
    using detail::format_double;
    std::vector<std::pair<std::string, std::string>> e;
    e.emplace_back("seed", std::to_string(c.seed));
    e.emplace_back("hamiltonian.variant", detail::variant_name(c.variant));
    e.emplace_back("hamiltonian.epsilon", format_double(c.epsilon));
    e.emplace_back("hamiltonian.delta1", format_double(c.delta1));
    e.emplace_back("hamiltonian.delta2", format_double(c.delta2));
    e.emplace_back("hamiltonian.g1", format_double(c.g1));
    e.emplace_back("hamiltonian.g2", format_double(c.g2));
    e.emplace_back("hamiltonian.pauli_plus", detail::convention_name(c.pauli_plus));
    e.emplace_back("bath.kind", detail::bath_name(c));
    e.emplace_back("bath.M", std::to_string(c.bath.modes));
    e.emplace_back("bath.spacing", format_double(c.bath.spacing));
    e.emplace_back("bath.kondo", format_double(c.bath.kondo));
    e.emplace_back("bath.omega_c", format_double(c.bath.omega_c));
    e.emplace_back("bath.omega_max", format_double(c.bath.omega_max));
    e.emplace_back("bath.file", c.bath_file);
    e.emplace_back("grid.N", std::to_string(c.grid.size));
    e.emplace_back("grid.comp", format_double(c.grid.comp));
    e.emplace_back("grid.conjugate_pairs", c.grid.conjugate_pairs ? "true" : "false");
    e.emplace_back("integrator.method", detail::method_name(c.integrator.method));
    e.emplace_back("integrator.dt", format_double(c.integrator.dt));
    e.emplace_back("integrator.abs_tol", format_double(c.integrator.abs_tol));
    e.emplace_back("integrator.rel_tol", format_double(c.integrator.rel_tol));
    e.emplace_back("integrator.gram_reg", format_double(c.integrator.gram_reg));
    e.emplace_back("time.t_max", format_double(c.time.t_max));
    e.emplace_back("time.output_stride", std::to_string(c.time.output_stride));
    e.emplace_back("temperature.beta", format_double(c.temperature.beta));
    e.emplace_back("temperature.N_T", std::to_string(c.temperature.n_samples));
    e.emplace_back("channel.tomography", detail::tomography_name(c.tomography));
    e.emplace_back("channel.dump", c.dump_channels ? "true" : "false");
    e.emplace_back("initial.state", std::to_string(c.initial_state));
    e.emplace_back("initial.amplitudes", detail::format_list(c.initial_amplitudes));
    e.emplace_back("oracle.kind", detail::oracle_name(c.oracle.kind));
    e.emplace_back("oracle.n_max", std::to_string(c.oracle.n_max));
    e.emplace_back("oracle.total_cap", std::to_string(c.oracle.total_cap));
    e.emplace_back("oracle.bound", format_double(c.oracle.bound));
    e.emplace_back("divergence.tol", format_double(c.divergence_tol));
    e.emplace_back("sweep.parameter", c.sweep.parameter);
    e.emplace_back("sweep.values", detail::format_list(c.sweep.values));
    return e;
}

/// Build a config from defaults plus the given keys.
inline SimConfig config_from_key_values(const KeyValues& kv) {
    using namespace detail;
    SimConfig c;
    c.bath.kind = BathKind::Linear;
    c.bath.modes = 1;
    c.bath.spacing = 0.1;
    c.grid.size = 25;
    c.grid.comp = 2.0;
    for (const auto& [key, value] : kv) {
        if (key == "seed") c.seed = parse_u64(key, value);
        else if (key == "hamiltonian.variant")
            c.variant = parse_enum<Variant>(key, value, {{"rwa", Variant::RotatingWave}, {"spin_boson", Variant::SpinBoson}});
        else if (key == "hamiltonian.epsilon") c.epsilon = parse_double(key, value);
        else if (key == "hamiltonian.delta1") c.delta1 = parse_double(key, value);
        else if (key == "hamiltonian.delta2") c.delta2 = parse_double(key, value);
        else if (key == "hamiltonian.delta") c.delta1 = c.delta2 = parse_double(key, value);
        else if (key == "hamiltonian.g1") c.g1 = parse_double(key, value);
        else if (key == "hamiltonian.g2") c.g2 = parse_double(key, value);
        else if (key == "hamiltonian.pauli_plus")
            c.pauli_plus = parse_enum<PauliPlusConvention>(
                key, value, {{"half", PauliPlusConvention::Half}, {"paper", PauliPlusConvention::Paper}});
        else if (key == "bath.kind") {
            const std::string t = trim(value);
            c.bath_from_file = t == "file";
            if (!c.bath_from_file)
                c.bath.kind = parse_enum<BathKind>(key, value,
                                                   {{"linear", BathKind::Linear},
                                                    {"degenerate_double", BathKind::DegenerateDouble},
                                                    {"ohmic", BathKind::Ohmic}});
        } else if (key == "bath.M") c.bath.modes = parse_positive_int(key, value);
        else if (key == "bath.spacing") c.bath.spacing = parse_double(key, value);
        else if (key == "bath.kondo") c.bath.kondo = parse_double(key, value);
        else if (key == "bath.omega_c") c.bath.omega_c = parse_double(key, value);
        else if (key == "bath.omega_max") c.bath.omega_max = parse_double(key, value);
        else if (key == "bath.file") c.bath_file = trim(value);
        else if (key == "grid.N") c.grid.size = parse_positive_int(key, value);
        else if (key == "grid.comp") c.grid.comp = parse_double(key, value);
        else if (key == "grid.conjugate_pairs") c.grid.conjugate_pairs = parse_bool(key, value);
        else if (key == "integrator.method")
            c.integrator.method = parse_enum<IntegratorMethod>(
                key, value, {{"rk4", IntegratorMethod::RK4}, {"rk45", IntegratorMethod::RK45}});
        else if (key == "integrator.dt") c.integrator.dt = parse_double(key, value);
        else if (key == "integrator.abs_tol") c.integrator.abs_tol = parse_double(key, value);
        else if (key == "integrator.rel_tol") c.integrator.rel_tol = parse_double(key, value);
        else if (key == "integrator.gram_reg") c.integrator.gram_reg = parse_double(key, value);
        else if (key == "time.t_max") c.time.t_max = parse_double(key, value);
        else if (key == "time.output_stride") c.time.output_stride = parse_positive_int(key, value);
        else if (key == "temperature.beta") c.temperature.beta = parse_double(key, value);
        else if (key == "temperature.N_T") c.temperature.n_samples = parse_positive_int(key, value);
        else if (key == "channel.tomography")
            c.tomography = parse_enum<Tomography>(key, value, {{"full", Tomography::Full}, {"symmetric", Tomography::Symmetric}});
        else if (key == "channel.dump") c.dump_channels = parse_bool(key, value);
        else if (key == "initial.state") c.initial_state = parse_positive_int(key, value);
        else if (key == "initial.amplitudes") c.initial_amplitudes = parse_list(key, value);
        else if (key == "oracle.kind")
            c.oracle.kind = parse_enum<OracleKind>(
                key, value, {{"auto", OracleKind::Auto}, {"sector", OracleKind::Sector}, {"fock", OracleKind::Fock}});
        else if (key == "oracle.n_max") c.oracle.n_max = parse_positive_int(key, value);
        else if (key == "oracle.total_cap") c.oracle.total_cap = parse_positive_int(key, value);
        else if (key == "oracle.bound") c.oracle.bound = parse_double(key, value);
        else if (key == "divergence.tol") c.divergence_tol = parse_double(key, value);
        else if (key == "sweep.parameter") c.sweep.parameter = trim(value);
        else if (key == "sweep.values") c.sweep.values = parse_list(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    c.validate();
    return c;
}

inline void write_config_header(std::ostream& os, const SimConfig& c) {
    for (const auto& [k, v] : resolved_entries(c)) os << "# " << k << " = " << v << '\n';
}

/// Recover the config from the `#` header of an emitted CSV.
inline SimConfig read_config_header(std::istream& is) {
    std::stringstream body;
    std::string line;
    while (std::getline(is, line)) {
        if (line.rfind("# ", 0) != 0) break;
        body << line.substr(2) << '\n';
    }
    return config_from_key_values(parse_key_values(body, "header"));
}

/// Apply one sweep value to a copy of the config.
inline SimConfig with_sweep_value(SimConfig c, const std::string& parameter, double value) {
    if (parameter == "g2") c.g2 = value;
    else if (parameter == "beta") c.temperature.beta = value;
    else if (parameter == "N") {
        if (value < 1 || value != std::floor(value)) throw ConfigError("sweep over N needs positive integers");
        c.grid.size = static_cast<int>(value);
    } else if (parameter == "comp") c.grid.comp = value;
    else throw ConfigError("sweep.parameter must be one of g2, beta, N, comp");
    c.sweep = {};
    c.validate();
    return c;
}

} // namespace mce
