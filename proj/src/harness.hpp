#ifndef BURSTMODEM_HARNESS_HPP
#define BURSTMODEM_HARNESS_HPP

#include "config.hpp"
#include "pulse.hpp"
#include "receiver.hpp"
#include "reference.hpp"
#include "track.hpp"
#include "turbo.hpp"
#include "tx.hpp"

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace bm {

enum class SyncMode { acquired, genie };

struct FrameRunSpec {
    SyncMode mode = SyncMode::acquired;
    bool acq_only = false;          // stop after acquisition (estimator stats)
    bool force_ideal_timing = false; // delta = 0, alpha = 0 for this run
    std::string dump_dir;            // when set, write frame_<idx>.f32
};

struct FrameResult {
    FrameTruth truth;
    SyncReport sync;
    bool acq_failed = false;
    bool truncated = false;
    int shift_count = 0;
    int payload_bits = 0;
    int bit_errors = 0;
    int predecoder_symbol_errors = 0; // hard I/Q decisions vs transmitted
    int predecoder_symbols = 0;
    bool frame_error = false;
};

// Immutable per-configuration state shared by all frames/threads.
class Modem {
  public:
    explicit Modem(const ModemConfig& cfg);

    const ModemConfig& config() const { return cfg_; }
    const PulseBank& pulses() const { return pulses_; }
    const BetaSequence& beta() const { return beta_; }
    const Interleaver& interleaver() const { return pi_; }

    // Transmit side only; returns the passband frame plus ground truth.
    RealBuffer make_frame(uint64_t frame_index, const FrameRunSpec& spec, FrameTruth& truth) const;

    // Full chain for one frame. Acquisition or tracking failures are counted,
    // never thrown.
    FrameResult run_frame(uint64_t frame_index, const FrameRunSpec& spec) const;

    // Per-symbol tracking trace for one frame (symbol_index, theta_hat,
    // c_shift, sampling_index_mod_MI).
    void write_frame_trace(uint64_t frame_index, const FrameRunSpec& spec, std::ostream& os) const;

  private:
    ModemConfig cfg_;
    PulseBank pulses_;
    KnownSymbols preamble_;
    KnownSymbols postamble_;
    Interleaver pi_;
    BetaSequence beta_;

    FrameResult run_frame_impl(uint64_t frame_index, const FrameRunSpec& spec,
                               DetectedFrame* detected_out) const;
};

struct ExperimentSpec {
    std::string kind; // ber_sweep | estimator_stats | frame_detect | codec_test
    std::vector<double> snr_db;
    uint64_t frames = 100;
    int threads = 1;
    std::string dump_dir;
};

// Runs the experiment and writes CSV (schema comment + header + rows).
void run_experiment(const ModemConfig& cfg, const ExperimentSpec& spec, std::ostream& csv);

// Deterministic frame-parallel map: fn(i) runs on a pool, results land in
// index order regardless of scheduling.
void parallel_frames(uint64_t count, int threads, const std::function<void(uint64_t)>& fn);

double n0_from_ebn0_db(double snr_db);

} // namespace bm

#endif
