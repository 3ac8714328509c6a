#include "config.hpp"

#include "errors.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace bm {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct FieldOps {
    std::function<void(ModemConfig&, const std::string&)> set;
    std::function<std::string(const ModemConfig&)> get;
};

template <typename T>
T parse_num(const std::string& key, const std::string& value) {
    std::istringstream is(value);
    T out{};
    is >> out;
    if (is.fail()) throw ConfigError("config: bad value for '" + key + "': " + value);
    std::string rest;
    is >> rest;
    if (!rest.empty()) throw ConfigError("config: trailing junk for '" + key + "': " + value);
    return out;
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

const std::map<std::string, FieldOps>& field_table() {
    static const std::map<std::string, FieldOps> table = [] {
        std::map<std::string, FieldOps> t;
        auto add_int = [&t](const std::string& k, int ModemConfig::* m) {
            t[k] = {[k, m](ModemConfig& c, const std::string& v) { c.*m = parse_num<int>(k, v); },
                    [m](const ModemConfig& c) { return std::to_string(c.*m); }};
        };
        auto add_dbl = [&t](const std::string& k, double ModemConfig::* m) {
            t[k] = {[k, m](ModemConfig& c, const std::string& v) { c.*m = parse_num<double>(k, v); },
                    [m](const ModemConfig& c) { return fmt_double(c.*m); }};
        };
        auto add_u64 = [&t](const std::string& k, uint64_t ModemConfig::* m) {
            t[k] = {[k, m](ModemConfig& c, const std::string& v) { c.*m = parse_num<uint64_t>(k, v); },
                    [m](const ModemConfig& c) { return std::to_string(c.*m); }};
        };
        add_int("M", &ModemConfig::M);
        add_int("I", &ModemConfig::I);
        add_dbl("rolloff", &ModemConfig::rolloff);
        add_int("tx_span", &ModemConfig::tx_span);
        add_int("mf_len", &ModemConfig::mf_len);
        add_int("Lp", &ModemConfig::Lp);
        add_int("Ld", &ModemConfig::Ld);
        add_int("Lo", &ModemConfig::Lo);
        add_int("L_isi", &ModemConfig::L_isi);
        add_dbl("delta_ppm", &ModemConfig::delta_ppm);
        add_int("delta_sign", &ModemConfig::delta_sign);
        add_dbl("omega3", &ModemConfig::omega3);
        add_dbl("theta0", &ModemConfig::theta0);
        add_dbl("alpha", &ModemConfig::alpha);
        add_int("alpha_random", &ModemConfig::alpha_random);
        add_int("theta0_random", &ModemConfig::theta0_random);
        add_dbl("N0", &ModemConfig::N0);
        add_dbl("rho_c", &ModemConfig::rho_c);
        add_dbl("rho_t", &ModemConfig::rho_t);
        add_int("L1", &ModemConfig::L1);
        add_int("B1", &ModemConfig::B1);
        add_int("B2", &ModemConfig::B2);
        add_dbl("half_width", &ModemConfig::half_width);
        add_dbl("omega_s", &ModemConfig::omega_s);
        add_int("iterations", &ModemConfig::iterations);
        add_u64("interleaver_seed", &ModemConfig::interleaver_seed);
        add_u64("seed", &ModemConfig::seed);
        add_int("noise_prefix", &ModemConfig::noise_prefix);
        add_int("noise_suffix", &ModemConfig::noise_suffix);
        add_dbl("detect_threshold", &ModemConfig::detect_threshold);
        return t;
    }();
    return table;
}

} // namespace

void ModemConfig::validate() const {
    if (M < 2) throw ConfigError("config: M must be >= 2");
    if (I < 1) throw ConfigError("config: I must be >= 1");
    if (!(rolloff > 0.0 && rolloff <= 1.0)) throw ConfigError("config: rolloff must be in (0, 1]");
    if (tx_span < 3) throw ConfigError("config: tx_span too short");
    if (mf_len < 3) throw ConfigError("config: mf_len too short");
    if (L_isi < 1) throw ConfigError("config: L_isi must be >= 1");
    if (Lp <= 2 * L_isi) throw ConfigError("config: Lp must exceed 2*L_isi");
    if (Ld < 5) throw ConfigError("config: Ld must leave at least one info bit after the tail");
    if (Lo < 0) throw ConfigError("config: Lo must be >= 0");
    if (std::abs(omega3) > 0.15 * kPi + 1e-12)
        throw ConfigError("config: |omega3| exceeds 0.15*pi (aliasing)");
    if (!(rho_c > 0.0 && rho_c < 1.0) && rho_c != 0.0)
        throw ConfigError("config: rho_c must be in [0, 1)");
    if (!(rho_t > 0.0 && rho_t < 1.0) && rho_t != 0.0)
        throw ConfigError("config: rho_t must be in [0, 1)");
    if (delta_ppm < 0.0) throw ConfigError("config: delta_ppm must be >= 0");
    if (delta_sign != 1 && delta_sign != -1) throw ConfigError("config: delta_sign must be +-1");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("config: alpha must be in [0, 1)");
    if (N0 < 0.0) throw ConfigError("config: N0 must be >= 0");
    if (L1 < 2 || B1 < 2 || B2 < 2) throw ConfigError("config: ML grid parameters too small");
    if (L1 > Lp - L_isi + 1) throw ConfigError("config: L1 exceeds usable preamble length");
    if (!(half_width > 0.0) || !(omega_s > 0.0)) throw ConfigError("config: bad ML search range");
    if (iterations < 1) throw ConfigError("config: iterations must be >= 1");
    if (noise_prefix < 0 || noise_suffix < 0) throw ConfigError("config: negative guard length");
}

void ModemConfig::set(const std::string& key, const std::string& value) {
    auto it = field_table().find(key);
    if (it == field_table().end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second.set(*this, value);
}

std::string ModemConfig::get(const std::string& key) const {
    auto it = field_table().find(key);
    if (it == field_table().end()) throw ConfigError("config: unknown key '" + key + "'");
    return it->second.get(*this);
}

const std::vector<std::string>& ModemConfig::keys() {
    static const std::vector<std::string> k = [] {
        std::vector<std::string> out;
        for (const auto& [key, ops] : field_table()) out.push_back(key);
        return out;
    }();
    return k;
}

void ModemConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: " + path + ":" + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r\n");
            auto b = s.find_last_not_of(" \t\r\n");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

} // namespace bm
