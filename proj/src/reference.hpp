#ifndef BURSTMODEM_REFERENCE_HPP
#define BURSTMODEM_REFERENCE_HPP

#include "buffers.hpp"
#include "config.hpp"

#include <cstdint>
#include <vector>

namespace bm {

// Seeded QPSK sequence shared by transmitter and receiver (+-1 per rail).
struct KnownSymbols {
    std::vector<int8_t> si;
    std::vector<int8_t> sq;
};

KnownSymbols make_preamble(const ModemConfig& cfg);
KnownSymbols make_postamble(const ModemConfig& cfg);

// Precomputed ISI-corrupted pilot references.
//   beta_i[k] = S_{k,I} + j*gamma_{k,Q}   (at the in-phase instants kT)
//   beta_q[k] = gamma_{k,I} + j*S_{k,Q}   (at kT + T/2)
// for 0 <= k <= Lp - L_isi. Symbols outside the burst contribute zero.
struct BetaSequence {
    std::vector<cplx> beta_i;
    std::vector<cplx> beta_q;
    KnownSymbols preamble;
    int L_isi = 3;
};

// gamma_{k,Q} = sum_j S_{k+L_isi-1-j,Q} * h[j]; out-of-range symbols are 0.
double quadrature_isi(const std::vector<int8_t>& sq, int k, const std::vector<double>& h, int L_isi);

// gamma_{k,I}: in-phase ISI seen at the quadrature instant kT + T/2.
double inphase_isi(const std::vector<int8_t>& si, int k, const std::vector<double>& h, int L_isi);

BetaSequence build_beta(const KnownSymbols& preamble, const std::vector<double>& h, int L_isi);

} // namespace bm

#endif
