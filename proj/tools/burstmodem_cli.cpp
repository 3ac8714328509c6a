// Command-line front end. Talks to the modem exclusively through the C API.

#include <burstmodem.h>

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

struct Common {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    unsigned long long frames = 100;
    std::vector<double> snr;
    std::string seed;
    std::string out_path = "-";
    std::string dump_dir;
    int threads = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_snr) {
    cmd->add_option("--config", c.config_path, "configuration file (key = value lines)");
    cmd->add_option("--frames", c.frames, "number of frames");
    if (with_snr)
        cmd->add_option("--snr", c.snr, "Eb/N0 list in dB")->delimiter(',');
    cmd->add_option("--seed", c.seed, "master RNG seed");
    cmd->add_option("--out", c.out_path, "output CSV path ('-' = stdout)");
    cmd->add_option("--dump-iq", c.dump_dir, "dump passband frames to this directory");
    cmd->add_option("--threads", c.threads, "worker threads");

    // Every config key doubles as a --key override.
    static std::vector<const char*> keys;
    if (keys.empty()) {
        keys.resize(bm_config_keys(nullptr, 0));
        bm_config_keys(keys.data(), static_cast<int>(keys.size()));
    }
    for (const char* k : keys) {
        if (std::string(k) == "seed") continue; // already registered
        cmd->add_option_function<std::string>(
            std::string("--") + k,
            [&c, k](const std::string& v) { c.overrides.emplace_back(k, v); },
            std::string("override config key ") + k);
    }
}

int exit_code_for(int rc) {
    if (rc == BM_OK) return 0;
    if (rc == BM_ERR_NUMERIC) return 3;
    return 2;
}

int apply_config(bm_config* cfg, const Common& c) {
    int rc = BM_OK;
    if (!c.config_path.empty()) rc = bm_config_load_file(cfg, c.config_path.c_str());
    if (rc == BM_OK && !c.seed.empty()) rc = bm_config_set(cfg, "seed", c.seed.c_str());
    for (const auto& [k, v] : c.overrides) {
        if (rc != BM_OK) break;
        rc = bm_config_set(cfg, k.c_str(), v.c_str());
    }
    if (rc == BM_OK) rc = bm_config_validate(cfg);
    if (rc != BM_OK) std::fprintf(stderr, "error: %s\n", bm_last_error());
    return rc;
}

int run_experiment_cmd(const char* kind, const Common& c) {
    bm_config* cfg = bm_config_create();
    int rc = apply_config(cfg, c);
    if (rc == BM_OK) {
        std::vector<double> snr = c.snr.empty() ? std::vector<double>{1.0} : c.snr;
        rc = bm_run_experiment(cfg, kind, snr.data(), static_cast<int>(snr.size()), c.frames,
                               c.threads, c.out_path.c_str(),
                               c.dump_dir.empty() ? nullptr : c.dump_dir.c_str());
        if (rc != BM_OK) std::fprintf(stderr, "error: %s\n", bm_last_error());
    }
    bm_config_free(cfg);
    return exit_code_for(rc);
}

int run_simulate(const Common& c, unsigned long long frame_index, bool genie,
                 const std::string& trace_path) {
    bm_config* cfg = bm_config_create();
    int rc = apply_config(cfg, c);
    if (rc == BM_OK && !c.snr.empty()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", std::pow(10.0, -c.snr.front() / 10.0));
        rc = bm_config_set(cfg, "N0", buf);
    }
    if (rc == BM_OK) {
        unsigned flags = genie ? BM_FRAME_GENIE : 0u;
        bm_frame_report rep{};
        rc = bm_run_frame(cfg, frame_index, flags, &rep);
        if (rc == BM_OK) {
            std::printf("frame %llu\n", frame_index);
            std::printf("  truth: t0=%.3f  omega3=%.6g  theta0=%.6f  alpha=%.6f\n", rep.t0_true,
                        rep.omega3_true, rep.theta0_true, rep.alpha_true);
            std::printf("  acq:   n1=%lld n2=%lld n3=%lld  detected=%d  R=%.1f\n", rep.n1, rep.n2,
                        rep.n3, rep.detected, rep.ratio);
            std::printf("  freq:  coarse=%.6g  pass2=%.6g  ml=%.6g  total=%.6g\n", rep.omega3_hat,
                        rep.omega_pass2, rep.omegaf_hat, rep.omega3_hat + rep.omegaf_hat);
            std::printf("  est:   theta0_hat=%.6f  A_hat=%.6f  sigma2_hat=%.6g\n", rep.theta0_hat,
                        rep.a_hat, rep.sigma2_hat);
            std::printf("  track: shifts=%d  truncated=%d\n", rep.timing_shifts, rep.truncated);
            std::printf("  data:  payload=%lld bits, errors=%lld, pre-decoder symbol errors=%lld/%lld\n",
                        rep.payload_bits, rep.bit_errors, rep.predecoder_symbol_errors,
                        rep.predecoder_symbols);
            std::printf("  frame_error=%d acq_failed=%d\n", rep.frame_error, rep.acq_failed);
            if (!trace_path.empty()) {
                rc = bm_write_frame_trace(cfg, frame_index, trace_path.c_str());
                if (rc == BM_OK) std::printf("  trace written to %s\n", trace_path.c_str());
            }
        }
        if (rc != BM_OK) std::fprintf(stderr, "error: %s\n", bm_last_error());
    }
    bm_config_free(cfg);
    return exit_code_for(rc);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"burst-mode turbo-coded offset-QPSK modem simulator"};
    app.require_subcommand(1);

    Common sim_c, ber_c, est_c, det_c, codec_c;
    unsigned long long sim_frame = 0;
    bool sim_genie = false;
    std::string sim_trace;

    CLI::App* sim = app.add_subcommand("simulate", "run one frame and print a verbose report");
    add_common(sim, sim_c, true);
    sim->add_option("--frame", sim_frame, "frame index");
    sim->add_flag("--genie", sim_genie, "perfect-synchronization baseline");
    sim->add_option("--trace", sim_trace, "write per-symbol tracking trace CSV here");

    CLI::App* ber = app.add_subcommand("ber-sweep", "BER/FER vs Eb/N0 with a genie baseline");
    add_common(ber, ber_c, true);
    CLI::App* est = app.add_subcommand("estimator-stats",
                                       "per-pass timing/frequency/amplitude estimator statistics");
    add_common(est, est_c, true);
    CLI::App* det = app.add_subcommand("frame-detect", "detection-ratio statistics");
    add_common(det, det_c, true);
    CLI::App* codec = app.add_subcommand("codec-test", "turbo codec BER per iteration");
    add_common(codec, codec_c, true);

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) return run_simulate(sim_c, sim_frame, sim_genie, sim_trace);
    if (ber->parsed()) return run_experiment_cmd("ber_sweep", ber_c);
    if (est->parsed()) return run_experiment_cmd("estimator_stats", est_c);
    if (det->parsed()) return run_experiment_cmd("frame_detect", det_c);
    if (codec->parsed()) return run_experiment_cmd("codec_test", codec_c);
    return 2;
}
