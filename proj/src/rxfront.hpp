#ifndef BURSTMODEM_RXFRONT_HPP
#define BURSTMODEM_RXFRONT_HPP

#include "buffers.hpp"

#include <vector>

namespace bm {

// y[n] = r[n] * e^{-j[(pi/2 + omega_lo) n + theta_lo]}. The double-frequency
// image is left for the matched filter. max_samples limits how much of the
// stored frame is processed (0 = all).
IqBuffer demodulate(const RealBuffer& r, double omega_lo, double theta_lo = 0.0,
                    size_t max_samples = 0);

// Zero-insert by I then filter with mf_taps (taps live on the nominal Ts1
// grid). Output index n corresponds to input time n*Ts1' measured from the
// first received sample. Polyphase implementation.
IqBuffer upsample_matched_filter(const IqBuffer& y, const std::vector<double>& mf_taps, int I);

// Literal zero-insert + direct convolution. Slow; kept as the behavioral
// reference for equivalence tests.
IqBuffer upsample_matched_filter_reference(const IqBuffer& y, const std::vector<double>& mf_taps,
                                           int I);

} // namespace bm

#endif
