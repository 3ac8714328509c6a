#ifndef BURSTMODEM_CONFIG_HPP
#define BURSTMODEM_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace bm {

// All modem parameters. Key-value config files and CLI overrides use the
// member names verbatim (one `key = value` per line, `#` comments).
struct ModemConfig {
    int M = 4;              // samples per symbol at the receiver input (T/Ts)
    int I = 4;              // interpolation factor (Ts/Ts1)
    double rolloff = 0.4;   // RRC roll-off
    int tx_span = 25;       // transmit filter length, Ts samples
    int mf_len = 97;        // matched filter length, Ts1 samples
    int Lp = 500;           // preamble length, QPSK symbols
    int Ld = 10000;         // data length, QPSK symbols
    int Lo = 12;            // postamble length, QPSK symbols
    int L_isi = 3;          // one-sided ISI span, symbols
    double delta_ppm = 25.0; // clock accuracy, ppm (effective offset 2*delta)
    int delta_sign = 1;      // +1: receiver clock fast (Ts' < Ts), -1: slow
    double omega3 = 0.15 * 3.14159265358979323846; // total offset, rad/sample
    double theta0 = 0.0;    // carrier phase, rad
    double alpha = 0.0;     // timing phase, units of T, in [0, 1)
    int alpha_random = 1;   // draw alpha ~ U[0, T) per frame
    int theta0_random = 1;  // draw theta0 ~ U[0, 2pi) per frame
    double N0 = 0.0;        // noise parameter; real passband samples have var N0/2
    double rho_c = 0.98;    // phase loop smoothing (0.97 for Lp=250)
    double rho_t = 0.995;   // timing loop smoothing
    int L1 = 100;           // ML step-1 correlation length, symbols
    int B1 = 800;           // ML step-1 bins
    int B2 = 200;           // ML step-2 bins
    double half_width = 0.2;   // ML search half-width, rad
    double omega_s = 4e-5;     // ML final resolution, rad
    int iterations = 8;        // turbo decoder iterations
    uint64_t interleaver_seed = 0x5eed1e44ull;
    uint64_t seed = 1;         // master RNG seed
    int noise_prefix = 32;     // noise-only guard before the burst, Ts' samples
    int noise_suffix = 16;     // guard after the burst, Ts' samples
    double detect_threshold = 8.0; // frame declared detected when R_i exceeds this

    int samples_per_symbol_mf() const { return M * I; }
    int info_bits() const { return Ld - 4; } // 4 tail symbols terminate encoder 1

    // Throws ConfigError when an invariant is violated.
    void validate() const;

    // Parse `key = value` lines; '#' starts a comment. Unknown key -> ConfigError.
    void load_file(const std::string& path);
    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;
    static const std::vector<std::string>& keys();
};

} // namespace bm

#endif
