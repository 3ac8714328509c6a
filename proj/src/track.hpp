#ifndef BURSTMODEM_TRACK_HPP
#define BURSTMODEM_TRACK_HPP

#include "acq.hpp"
#include "buffers.hpp"
#include "config.hpp"
#include "pulse.hpp"
#include "reference.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace bm {

// First-order data-aided phase loop: z_avg <- rho*z_avg + (1-rho)*z,
// theta_hat = arg(z_avg) in [0, 2pi).
struct PhaseLoop {
    cplx z_avg{0.0, 0.0};
    double rho_c = 0.98;

    double update(cplx z);
    double theta() const;
};

// Five-cell early/late array around the in-phase sampling instant.
struct TimingArray {
    // Near a drift crossover the two competing averages are equal to within
    // the per-symbol ISI dither, so a bare argmax ping-pongs for tens of
    // symbols per crossing. A challenger must beat the middle cell by this
    // relative margin (about 6x the observed dither, a third of the
    // one-sample gap) before a shift is declared.
    static constexpr double kShiftHysteresis = 2e-3;

    std::array<double, 5> cells{}; // offsets -2..+2 in Ts1' samples
    double rho_t = 0.995;

    void accumulate(const std::array<double, 5>& u);
    // argmax over the inner three cells only; ties go to the earliest.
    int pick_shift() const;
    // c = +1: left-shift, vacate +2; c = -1: right-shift, vacate -2.
    void shift(int c);
};

struct DetectedFrame {
    std::vector<double> soft_i; // de-rotated, signum removed, scaled by 1/A_hat
    std::vector<double> soft_q;
    std::vector<int8_t> hard_i;
    std::vector<int8_t> hard_q;
    std::vector<int32_t> instant_trace; // in-phase sampling index per symbol
    std::vector<double> theta_trace;    // theta_hat used per symbol
    std::vector<int8_t> shift_trace;    // c per symbol
    int shift_count = 0;
    bool truncated = false;
};

// Decision-directed tracking and detection over the data portion. Phase
// updates lag detection by L_isi symbols; the reference beta_hat uses a
// pipeline of tentative hard decisions (L_isi - 1 future quadrature symbols).
DetectedFrame run_tracking(const IqBuffer& x3, const SyncReport& sync, const BetaSequence& beta,
                           const PulseBank& pulses, const ModemConfig& cfg);

} // namespace bm

#endif
