#include "pulse.hpp"

#include "errors.hpp"

#include <cmath>

namespace bm {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double rrc_value(double t, double rolloff) {
    const double b = rolloff;
    if (std::abs(t) < 1e-12) return 1.0 - b + 4.0 * b / kPi;
    const double tsing = 1.0 / (4.0 * b);
    if (std::abs(std::abs(t) - tsing) < 1e-12) {
        return (b / std::sqrt(2.0)) * ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * b)) +
                                       (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * b)));
    }
    const double num = std::sin(kPi * t * (1.0 - b)) + 4.0 * b * t * std::cos(kPi * t * (1.0 + b));
    const double den = kPi * t * (1.0 - 16.0 * b * b * t * t);
    return num / den;
}

std::vector<double> design_rrc(double rolloff, int span_samples, int samples_per_symbol) {
    if (!(rolloff > 0.0 && rolloff <= 1.0)) throw ConfigError("design_rrc: rolloff must be in (0, 1]");
    if (span_samples < 3) throw ConfigError("design_rrc: span too short");
    if (samples_per_symbol < 2) throw ConfigError("design_rrc: need >= 2 samples per symbol");
    std::vector<double> taps(span_samples);
    const double center = (span_samples - 1) / 2.0;
    double energy = 0.0;
    for (int n = 0; n < span_samples; ++n) {
        taps[n] = rrc_value((n - center) / samples_per_symbol, rolloff);
        energy += taps[n] * taps[n];
    }
    const double g = 1.0 / std::sqrt(energy);
    for (double& v : taps) v *= g;
    return taps;
}

std::vector<double> PulseBank::cascade() const {
    // zero-insert tx by I, convolve with mf, include the 1/2 demodulation loss
    const int nt = static_cast<int>(tx_taps.size());
    const int nm = static_cast<int>(mf_taps.size());
    const int nu = (nt - 1) * I + 1;
    std::vector<double> out(nu + nm - 1, 0.0);
    for (int it = 0; it < nt; ++it) {
        const double v = 0.5 * tx_taps[it];
        for (int im = 0; im < nm; ++im) out[it * I + im] += v * mf_taps[im];
    }
    return out;
}

PulseBank PulseBank::design(const ModemConfig& cfg) {
    PulseBank pb;
    pb.rolloff = cfg.rolloff;
    pb.M = cfg.M;
    pb.I = cfg.I;
    pb.tx_taps = design_rrc(cfg.rolloff, cfg.tx_span, cfg.M);

    double raw_energy = 0.0;
    const double ctr_tx = (cfg.tx_span - 1) / 2.0;
    for (int n = 0; n < cfg.tx_span; ++n) {
        const double v = rrc_value((n - ctr_tx) / cfg.M, cfg.rolloff);
        raw_energy += v * v;
    }
    pb.tx_scale = 1.0 / std::sqrt(raw_energy);

    // Raw mf taps: same analytic pulse on the Ts1 grid.
    const int sps1 = cfg.M * cfg.I;
    std::vector<double> mf_raw(cfg.mf_len);
    const double ctr_mf = (cfg.mf_len - 1) / 2.0;
    for (int n = 0; n < cfg.mf_len; ++n)
        mf_raw[n] = rrc_value((n - ctr_mf) / sps1, cfg.rolloff);

    // Fold all gains into mf: the demodulator halves the signal, so scale the
    // raw cascade peak to exactly 2.
    double peak = 0.0;
    const int nu = (cfg.tx_span - 1) * cfg.I + 1;
    std::vector<double> casc(nu + cfg.mf_len - 1, 0.0);
    for (int it = 0; it < cfg.tx_span; ++it)
        for (int im = 0; im < cfg.mf_len; ++im)
            casc[it * cfg.I + im] += pb.tx_taps[it] * mf_raw[im];
    for (double v : casc) peak = std::max(peak, v);
    if (!(peak > 0.0)) throw NumericError("PulseBank: degenerate cascade");

    pb.mf_taps = std::move(mf_raw);
    for (double& v : pb.mf_taps) v *= 2.0 / peak;

    // T-spaced cascade taps at the half-symbol offset define the quadrature
    // ISI coefficients (Lp-side reference uses these exactly).
    const std::vector<double> chain = pb.cascade();
    int ipk = 0;
    for (int n = 1; n < static_cast<int>(chain.size()); ++n)
        if (chain[n] > chain[ipk]) ipk = n;
    pb.h.resize(2 * cfg.L_isi);
    for (int j = 0; j < 2 * cfg.L_isi; ++j) {
        const int idx = ipk + (j - cfg.L_isi) * sps1 + sps1 / 2;
        pb.h[j] = (idx >= 0 && idx < static_cast<int>(chain.size())) ? chain[idx] : 0.0;
    }
    return pb;
}

double effective_offset(double delta_f_hz, double fc_hz, double fs_hz,
                        double delta_ppm, int sign) {
    if (!(fs_hz > 0.0)) throw ConfigError("effective_offset: fs must be positive");
    const double w3 = 2.0 * kPi *
                      (delta_f_hz - sign * (fc_hz + delta_f_hz) * 2.0 * delta_ppm * 1e-6) /
                      fs_hz;
    if (std::abs(w3) > 0.15 * kPi + 1e-12)
        throw ConfigError("effective_offset: |omega3| exceeds 0.15*pi (aliasing)");
    return w3;
}

} // namespace bm
