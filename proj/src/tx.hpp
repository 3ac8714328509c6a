#ifndef BURSTMODEM_TX_HPP
#define BURSTMODEM_TX_HPP

#include "buffers.hpp"
#include "config.hpp"
#include "pulse.hpp"
#include "reference.hpp"
#include "rng.hpp"
#include "turbo.hpp"

#include <cstdint>
#include <vector>

namespace bm {

// One frame of L = Lp + Ld + Lo QPSK symbols plus the payload bits it
// carries (for BER accounting only).
struct Burst {
    std::vector<int8_t> sym_i;
    std::vector<int8_t> sym_q;
    std::vector<uint8_t> payload;
};

// [preamble | turbo-coded data | postamble]. Data symbol k carries the
// systematic bit on I and the alternating punctured parity on Q (c1 odd,
// c2 even); the last four data symbols carry the encoder-1 tail.
Burst assemble_burst(const std::vector<uint8_t>& payload, const ModemConfig& cfg,
                     const KnownSymbols& preamble, const KnownSymbols& postamble,
                     const Interleaver& pi);

std::vector<uint8_t> random_payload(const ModemConfig& cfg, uint64_t frame_index);

struct ShapeResult {
    IqBuffer baseband;    // complex samples at Ts' (period units of T)
    int renorm_count = 0; // times the accumulated drift crossed +-Ts
    std::vector<int> renorm_at; // output sample indices of those events
};

// Offset-QPSK pulse shaping with time-varying taps p(iTs + n*eps - alpha).
// The quadrature rail is delayed T/2 = M/2 input samples. Accumulated drift
// is renormalized by one sample whenever |n*eps| crosses Ts.
ShapeResult shape_oqpsk(const Burst& burst, double alpha, double epsilon,
                        const PulseBank& pulses, const ModemConfig& cfg);

// r(n) = Re{ s(n) * e^{j[(pi/2 + omega3) n + theta0]} }.
RealBuffer modulate_passband(const IqBuffer& baseband, double omega3, double theta0);

// Adds white Gaussian samples of variance N0/2.
void add_awgn(RealBuffer& samples, double n0, RngStream& rng);

// Ground truth recorded by the transmitter side for the harness only; the
// receiver never reads it.
struct FrameTruth {
    double t0_ts1p = 0.0; // first-symbol instant at the MF output, Ts1' units
    double omega3 = 0.0;
    double theta0 = 0.0;
    double alpha = 0.0;
    double epsilon = 0.0;
    int renorm_count = 0;
    std::vector<uint8_t> payload;
};

} // namespace bm

#endif
