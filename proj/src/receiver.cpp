#include "receiver.hpp"

#include "rxfront.hpp"

#include <cmath>

namespace bm {

namespace {
constexpr double kTwoPi = 6.28318530717958647692528676656;

// Input samples needed so the MF output covers the detection window plus one
// full preamble of symbol-spaced taps.
size_t pass_input_limit(const BetaSequence& beta, const ModemConfig& cfg) {
    const int mi = cfg.samples_per_symbol_mf();
    const int need_out = kDetectWindow + static_cast<int>(beta.beta_i.size()) * mi + mi;
    return static_cast<size_t>(need_out / cfg.I + cfg.mf_len / cfg.I + 4);
}
} // namespace

AcquireOutput acquire(const RealBuffer& r, const BetaSequence& beta, const PulseBank& pulses,
                      const ModemConfig& cfg) {
    const size_t lim = pass_input_limit(beta, cfg);

    // Pass 1: demodulate at pi/2, detect frame, coarse offset.
    IqBuffer x1 = upsample_matched_filter(demodulate(r, 0.0, 0.0, lim), pulses.mf_taps, cfg.I);
    const DiffCorrResult d1 = differential_correlate(x1, beta, cfg);

    // Pass 2: repeat on the stored samples demodulated by the coarse estimate.
    IqBuffer x2 =
        upsample_matched_filter(demodulate(r, d1.omega_hat, 0.0, lim), pulses.mf_taps, cfg.I);
    const DiffCorrResult d2 = differential_correlate(x2, beta, cfg);

    // ML fine search for the residual.
    const MlResult ml = ml_fine_frequency(x2, d2.n_peak, beta, cfg);

    // Pass 3: final demodulation over the whole frame, correlation method.
    AcquireOutput out;
    out.x3 = upsample_matched_filter(demodulate(r, d1.omega_hat + ml.omegaf_hat), pulses.mf_taps,
                                     cfg.I);
    const CorrFrameResult c3 = correlate_frame(out.x3, beta, cfg);

    SyncReport& s = out.sync;
    s.n1 = d1.n_peak;
    s.n2 = d2.n_peak;
    s.n3 = c3.n3;
    s.omega3_hat = d1.omega_hat;
    s.omega_pass2 = d1.omega_hat + d2.omega_hat;
    s.omega_ml1 = d1.omega_hat + ml.omega_step1;
    s.omegaf_hat = ml.omegaf_hat;
    s.theta0_hat = c3.theta0_hat;
    s.ml_boundary = ml.boundary;
    s.ratio = d1.ratio;
    s.detected = d1.ratio > cfg.detect_threshold;
    s.a_hat = estimate_amplitude(out.x3, s.n3, s.theta0_hat, beta, cfg);
    s.sigma2_hat = estimate_noise_variance(out.x3, s.n3, s.theta0_hat, s.a_hat, beta, cfg);
    return out;
}

AcquireOutput genie_acquire(const RealBuffer& r, const FrameTruth& truth,
                            const BetaSequence& beta, const PulseBank& pulses,
                            const ModemConfig& cfg) {
    (void)beta;
    AcquireOutput out;
    out.x3 = upsample_matched_filter(demodulate(r, truth.omega3), pulses.mf_taps, cfg.I);
    SyncReport& s = out.sync;
    s.n1 = s.n2 = s.n3 = static_cast<int>(std::lround(truth.t0_ts1p));
    s.omega3_hat = truth.omega3;
    s.omega_pass2 = truth.omega3;
    s.omega_ml1 = truth.omega3;
    s.omegaf_hat = 0.0;
    s.theta0_hat = std::fmod(truth.theta0, kTwoPi);
    if (s.theta0_hat < 0.0) s.theta0_hat += kTwoPi;
    s.a_hat = 1.0;
    s.sigma2_hat = std::max(cfg.N0, 1e-6);
    s.ratio = 0.0;
    s.detected = true;
    return out;
}

} // namespace bm
