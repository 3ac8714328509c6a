#ifndef BURSTMODEM_ACQ_HPP
#define BURSTMODEM_ACQ_HPP

#include "buffers.hpp"
#include "config.hpp"
#include "reference.hpp"

#include <vector>

namespace bm {

// Candidate window for all frame-start searches; also the span of the
// time-average in the detection ratio.
constexpr int kDetectWindow = 2048;

// Everything acquisition learns from the preamble.
struct SyncReport {
    int n1 = -1;              // first frame-start estimate (Ts1' index)
    int n2 = -1;              // second estimate
    int n3 = -1;              // final estimate
    double omega3_hat = 0.0;  // coarse offset, rad/sample at Ts'
    double omega_pass2 = 0.0; // second differential estimate (diagnostic)
    double omega_ml1 = 0.0;   // absolute estimate after ML step 1 (diagnostic)
    double omegaf_hat = 0.0;  // ML fine offset (residual after omega3_hat)
    double theta0_hat = 0.0;  // carrier phase in [0, 2pi)
    double a_hat = 0.0;       // symbol amplitude
    double sigma2_hat = 0.0;  // per-rail noise variance
    double ratio = 0.0;       // detection ratio R_i of the first pass
    bool ml_boundary = false; // ML argmax landed on a grid edge
    bool detected = false;    // ratio exceeded the threshold
};

struct DiffCorrResult {
    int n_peak = 0;
    double omega_hat = 0.0;
    double ratio = 0.0;
};

// Differential correlation (first/second pass): strip the reference, multiply
// consecutive symbol-spaced samples, pick the |sum|^2 peak over the window.
DiffCorrResult differential_correlate(const IqBuffer& x, const BetaSequence& beta,
                                      const ModemConfig& cfg);

struct MlResult {
    double omegaf_hat = 0.0; // step-2 winner
    double omega_step1 = 0.0;
    bool boundary = false;
};

// Two-step ML grid search for the residual frequency offset left in x2.
// Step 1: B1 bins over +-half_width using L1 symbols; step 2: B2 bins over
// +-8*(2*half_width/B1) about the step-1 winner using the whole preamble.
// Direct summation; no FFT.
MlResult ml_fine_frequency(const IqBuffer& x2, int n2, const BetaSequence& beta,
                           const ModemConfig& cfg);

struct CorrFrameResult {
    int n3 = 0;
    double theta0_hat = 0.0;
    cplx y3_peak{0.0, 0.0};
};

// Third-pass correlation: normalized reference strip, coherent sum.
CorrFrameResult correlate_frame(const IqBuffer& x3, const BetaSequence& beta,
                                const ModemConfig& cfg);

double estimate_amplitude(const IqBuffer& x3, int n3, double theta0_hat,
                          const BetaSequence& beta, const ModemConfig& cfg);

double estimate_noise_variance(const IqBuffer& x3, int n3, double theta0_hat, double a_hat,
                               const BetaSequence& beta, const ModemConfig& cfg);

} // namespace bm

#endif
