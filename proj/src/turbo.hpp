#ifndef BURSTMODEM_TURBO_HPP
#define BURSTMODEM_TURBO_HPP

#include <array>
#include <cstdint>
#include <vector>

namespace bm {

// 16-state recursive systematic convolutional trellis for
// G(D) = [1, (1+D^2+D^3+D^4)/(1+D+D^4)]. Bit b in {0,1} maps to the symbol
// 1-2b, so "input +1" means bit 0.
struct TurboTrellis {
    static constexpr int kStates = 16;
    uint8_t next[kStates][2];     // next[state][bit]
    uint8_t parity[kStates][2];   // parity bit emitted on that transition
    uint8_t prev_state[kStates][2]; // the two predecessors of each state
    uint8_t prev_bit[kStates][2];   // input bit driving predecessor -> state
    uint8_t term_bit[kStates];      // feedback-cancelling input (drives w_k = 0)

    uint8_t rho_plus(int n) const { return next[n][0]; }  // input symbol +1
    uint8_t rho_minus(int n) const { return next[n][1]; } // input symbol -1

    static const TurboTrellis& instance();
};

// Parity stream of one RSC encoder started in state 0. With terminate set,
// four feedback-driven tail bits drive the register back to state 0; the tail
// systematic/parity bits are returned separately.
struct RscCodeword {
    std::vector<uint8_t> parity;
    std::vector<uint8_t> tail_bits;
    std::vector<uint8_t> tail_parity;
    int final_state = 0;
};
RscCodeword rsc_encode(const std::vector<uint8_t>& bits, bool terminate);

// Seeded uniform random permutation. Decoder-2 stage m handles the
// decoder-1 position perm[m]; inv is the inverse map.
struct Interleaver {
    std::vector<int32_t> perm;
    std::vector<int32_t> inv;
};
Interleaver make_interleaver(int length, uint64_t seed);

// Rate-1/2 punctured parallel concatenation: per info bit the systematic bit
// plus one parity bit (c1 at odd positions, c2 at even). Encoder 1 is
// terminated; its tail rides on four extra symbols, unpunctured.
struct TurboCodeword {
    std::vector<uint8_t> sys;
    std::vector<uint8_t> parity1; // pre-puncture, valid at odd i on the air
    std::vector<uint8_t> parity2; // valid at even i on the air
    std::vector<uint8_t> tail_sys;
    std::vector<uint8_t> tail_parity1;
};
TurboCodeword turbo_encode(const std::vector<uint8_t>& bits, const Interleaver& pi);

// Demultiplexed soft observations for the decoder. r_par1/r_par2 are read
// only at the positions the puncturing transmitted. sigma2 is floored at
// 1e-6 to keep the exp() metrics finite.
struct SoftFrame {
    std::vector<double> r_sys;
    std::vector<double> r_par1;
    std::vector<double> r_par2;
    std::vector<double> r_sys_tail;
    std::vector<double> r_par1_tail;
    double sigma2 = 1.0;

    static constexpr double kSigma2Floor = 1e-6;
    int length() const { return static_cast<int>(r_sys.size()); }
};

// One constituent-decoder problem: the MAP recursions run on `stages` trellis
// steps with optional parity observations and per-stage priors.
struct BcjrProblem {
    std::vector<double> r_sys;
    std::vector<double> r_par;
    std::vector<uint8_t> par_present;
    std::vector<double> prior_plus;  // empty -> uniform
    std::vector<double> stage_scale; // positive per-stage metric scale; the
                                     // normalized recursions are invariant to it
    double sigma2 = 1.0;
    bool terminated = false;

    int stages() const { return static_cast<int>(r_sys.size()); }
    double scale_at(int i) const { return stage_scale.empty() ? 1.0 : stage_scale[i]; }
};

using StateVec = std::array<double, TurboTrellis::kStates>;

// Forward/backward sums of products, normalized to sum 1 at every stage.
// alpha has stages()+1 rows (row 0 is the uniform start), beta likewise
// (row stages() is the boundary).
std::vector<StateVec> bcjr_forward(const BcjrProblem& p);
std::vector<StateVec> bcjr_backward(const BcjrProblem& p);

// Extrinsic probabilities F_{k+} (parity metric only, no systematic, no
// prior), normalized against F_{k-}.
std::vector<double> bcjr_extrinsic(const BcjrProblem& p,
                                   const std::vector<StateVec>& alpha,
                                   const std::vector<StateVec>& beta);

// Final a-posteriori P(bit_k = +1): extrinsic x prior x systematic metric.
std::vector<double> bcjr_app(const BcjrProblem& p,
                             const std::vector<double>& extrinsic_plus);

struct TurboDecodeResult {
    std::vector<uint8_t> bits;       // hard decisions, info bits only
    std::vector<double> app_plus;    // final P(bit = +1 | r)
    std::vector<std::vector<uint8_t>> bits_per_iteration;
};
TurboDecodeResult turbo_decode(const SoftFrame& frame, const Interleaver& pi, int iterations);

} // namespace bm

#endif
