#include "tx.hpp"

#include "errors.hpp"

#include <cmath>

namespace bm {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<uint8_t> random_payload(const ModemConfig& cfg, uint64_t frame_index) {
    RngStream rng = RngStream::derive(cfg.seed, frame_index, StreamPurpose::data);
    std::vector<uint8_t> bits(cfg.info_bits());
    for (auto& b : bits) b = static_cast<uint8_t>(rng.bit());
    return bits;
}

Burst assemble_burst(const std::vector<uint8_t>& payload, const ModemConfig& cfg,
                     const KnownSymbols& preamble, const KnownSymbols& postamble,
                     const Interleaver& pi) {
    if (static_cast<int>(payload.size()) != cfg.info_bits())
        throw ConfigError("assemble_burst: payload length must equal Ld - 4 bits");
    if (static_cast<int>(preamble.si.size()) != cfg.Lp ||
        static_cast<int>(postamble.si.size()) != cfg.Lo)
        throw ConfigError("assemble_burst: preamble/postamble length mismatch");

    const TurboCodeword cw = turbo_encode(payload, pi);
    const int L = cfg.Lp + cfg.Ld + cfg.Lo;
    Burst b;
    b.payload = payload;
    b.sym_i.resize(L);
    b.sym_q.resize(L);
    for (int k = 0; k < cfg.Lp; ++k) {
        b.sym_i[k] = preamble.si[k];
        b.sym_q[k] = preamble.sq[k];
    }
    const int n_info = cfg.info_bits();
    auto to_sym = [](uint8_t bit) { return static_cast<int8_t>(1 - 2 * (bit & 1)); };
    for (int k = 0; k < n_info; ++k) {
        b.sym_i[cfg.Lp + k] = to_sym(cw.sys[k]);
        b.sym_q[cfg.Lp + k] = to_sym((k % 2 == 1) ? cw.parity1[k] : cw.parity2[k]);
    }
    for (int j = 0; j < 4; ++j) {
        b.sym_i[cfg.Lp + n_info + j] = to_sym(cw.tail_sys[j]);
        b.sym_q[cfg.Lp + n_info + j] = to_sym(cw.tail_parity1[j]);
    }
    for (int k = 0; k < cfg.Lo; ++k) {
        b.sym_i[cfg.Lp + cfg.Ld + k] = postamble.si[k];
        b.sym_q[cfg.Lp + cfg.Ld + k] = postamble.sq[k];
    }
    return b;
}

ShapeResult shape_oqpsk(const Burst& burst, double alpha, double epsilon,
                        const PulseBank& pulses, const ModemConfig& cfg) {
    const int M = cfg.M;
    const double ts = 1.0 / M;
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("shape_oqpsk: alpha must be in [0, T)");
    if (std::abs(epsilon) >= ts) throw ConfigError("shape_oqpsk: |epsilon| must be << Ts");

    const int L = static_cast<int>(burst.sym_i.size());
    const int span = static_cast<int>(pulses.tx_taps.size());
    const int center = (span - 1) / 2;
    const int n_out = L * M + span;

    // Impulse trains on the output grid; quadrature delayed by T/2 = M/2.
    std::vector<double> imp_i(n_out, 0.0), imp_q(n_out, 0.0);
    for (int k = 0; k < L; ++k) {
        imp_i[k * M] = burst.sym_i[k];
        if (k * M + M / 2 < n_out) imp_q[k * M + M / 2] = burst.sym_q[k];
    }

    ShapeResult out;
    out.baseband.samples.resize(n_out);
    out.baseband.period = ts + epsilon;
    out.baseband.grid = SampleGrid::ts_prime;

    std::vector<double> taps(span);
    double d = 0.0;   // accumulated drift n*eps, renormalized into (-Ts, Ts)
    int shift = 0;    // whole samples absorbed by renormalization
    bool taps_valid = false;
    for (int n = 0; n < n_out; ++n) {
        if (!taps_valid || epsilon != 0.0) {
            for (int i = 0; i < span; ++i)
                taps[i] = rrc_value((i - center) * ts + d - alpha, pulses.rolloff) * pulses.tx_scale;
            taps_valid = true;
        }
        const int v = n + shift;
        double acc_i = 0.0, acc_q = 0.0;
        const int i_lo = std::max(0, v - (n_out - 1));
        const int i_hi = std::min(span - 1, v);
        for (int i = i_lo; i <= i_hi; ++i) {
            acc_i += taps[i] * imp_i[v - i];
            acc_q += taps[i] * imp_q[v - i];
        }
        out.baseband.samples[n] = cplx(acc_i, acc_q);
        d += epsilon;
        if (d >= ts) {
            d -= ts;
            ++shift;
            ++out.renorm_count;
            out.renorm_at.push_back(n);
        } else if (d <= -ts) {
            d += ts;
            --shift;
            ++out.renorm_count;
            out.renorm_at.push_back(n);
        }
    }
    return out;
}

RealBuffer modulate_passband(const IqBuffer& baseband, double omega3, double theta0) {
    if (std::abs(omega3) > 0.15 * kPi + 1e-12)
        throw ConfigError("modulate_passband: |omega3| exceeds 0.15*pi (aliasing)");
    RealBuffer out;
    out.samples.resize(baseband.samples.size());
    out.period = baseband.period;
    out.grid = baseband.grid;
    for (size_t n = 0; n < baseband.samples.size(); ++n) {
        const double phase = (kPi / 2.0 + omega3) * static_cast<double>(n) + theta0;
        out.samples[n] = baseband.samples[n].real() * std::cos(phase) -
                         baseband.samples[n].imag() * std::sin(phase);
    }
    return out;
}

void add_awgn(RealBuffer& samples, double n0, RngStream& rng) {
    if (n0 < 0.0) throw ConfigError("add_awgn: N0 must be >= 0");
    if (n0 == 0.0) return;
    const double sigma = std::sqrt(n0 / 2.0);
    for (double& v : samples.samples) v += sigma * rng.gauss();
}

} // namespace bm
