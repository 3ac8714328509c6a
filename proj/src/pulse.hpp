#ifndef BURSTMODEM_PULSE_HPP
#define BURSTMODEM_PULSE_HPP

#include "config.hpp"

#include <vector>

namespace bm {

// Closed-form root-raised-cosine value at time t (units of T). The removable
// singularities at t = 0 and |t| = 1/(4*rolloff) use the analytic limits so
// results are identical across platforms. Unnormalized.
double rrc_value(double t, double rolloff);

// Causal symmetric RRC FIR: span_samples taps at samples_per_symbol per T,
// peak at the center tap, unit L2 norm.
std::vector<double> design_rrc(double rolloff, int span_samples, int samples_per_symbol);

// Transmit/matched filter pair plus the T-spaced raised-cosine ISI
// coefficients h of the cascade. Gains are folded into mf_taps so that the
// whole chain (tx pulse -> carrier -> demodulation -> upsampled matched
// filter) has unit amplitude at the symbol instants.
struct PulseBank {
    std::vector<double> tx_taps; // tx_span taps at Ts, unit energy
    std::vector<double> mf_taps; // mf_len taps at Ts1, carries the x2 demod gain
    std::vector<double> h;       // 2*L_isi cascade taps at (j - L_isi)T + T/2
    double tx_scale = 1.0;       // rrc_value() multiplier matching tx_taps
    double rolloff = 0.4;
    int M = 4;
    int I = 4;

    // Group delay of tx filter + matched filter in Ts1 samples.
    int chain_delay_ts1() const {
        return (static_cast<int>(tx_taps.size()) - 1) / 2 * I +
               (static_cast<int>(mf_taps.size()) - 1) / 2;
    }

    // Full-chain pulse (demod gain included), Ts1-spaced; peak value 1 at
    // chain_delay_ts1(). Used by tests and the beta reference design.
    std::vector<double> cascade() const;

    static PulseBank design(const ModemConfig& cfg);
};

// omega3 per Eq.-12 style bookkeeping: maps a physical frequency offset plus
// a clock ppm error into the effective offset in rad/sample at rate fs.
// Throws when the result would alias (|omega3| > 0.15*pi).
double effective_offset(double delta_f_hz, double fc_hz, double fs_hz,
                        double delta_ppm, int sign);

} // namespace bm

#endif
