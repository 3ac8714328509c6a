#ifndef BURSTMODEM_RECEIVER_HPP
#define BURSTMODEM_RECEIVER_HPP

#include "acq.hpp"
#include "buffers.hpp"
#include "config.hpp"
#include "pulse.hpp"
#include "reference.hpp"
#include "tx.hpp"

namespace bm {

struct AcquireOutput {
    SyncReport sync;
    IqBuffer x3; // matched-filter output after the final demodulation
};

// The four acquisition passes over a stored frame: differential correlation
// (coarse), repeat after coarse demod, two-step ML fine search, then the
// correlation pass with phase/amplitude/noise estimation.
AcquireOutput acquire(const RealBuffer& r, const BetaSequence& beta, const PulseBank& pulses,
                      const ModemConfig& cfg);

// Perfect-synchronization baseline: ground truth supplies t0, omega3, theta0,
// A = 1 and sigma^2 = N0; only the final demod + matched filter run.
AcquireOutput genie_acquire(const RealBuffer& r, const FrameTruth& truth,
                            const BetaSequence& beta, const PulseBank& pulses,
                            const ModemConfig& cfg);

} // namespace bm

#endif
