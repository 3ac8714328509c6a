#include "burstmodem.h"

#include "config.hpp"
#include "errors.hpp"
#include "harness.hpp"

#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace bm;

struct bm_config {
    ModemConfig cfg;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
    g_last_error = what ? what : "";
    return code;
}

template <typename F>
int guarded(F&& fn) {
    try {
        fn();
        return BM_OK;
    } catch (const ConfigError& e) {
        return fail(BM_ERR_CONFIG, e.what());
    } catch (const IoError& e) {
        return fail(BM_ERR_IO, e.what());
    } catch (const NumericError& e) {
        return fail(BM_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(BM_ERR_NUMERIC, e.what());
    }
}

} // namespace

extern "C" {

bm_config* bm_config_create(void) { return new (std::nothrow) bm_config{}; }

void bm_config_free(bm_config* cfg) { delete cfg; }

int bm_config_load_file(bm_config* cfg, const char* path) {
    if (!cfg || !path) return fail(BM_ERR_INVALID, "null argument");
    return guarded([&] { cfg->cfg.load_file(path); });
}

int bm_config_set(bm_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return fail(BM_ERR_INVALID, "null argument");
    return guarded([&] { cfg->cfg.set(key, value); });
}

int bm_config_get(const bm_config* cfg, const char* key, char* out, size_t out_size) {
    if (!cfg || !key || !out || out_size == 0) return fail(BM_ERR_INVALID, "null argument");
    return guarded([&] {
        const std::string v = cfg->cfg.get(key);
        if (v.size() + 1 > out_size) throw IoError("bm_config_get: buffer too small");
        std::memcpy(out, v.c_str(), v.size() + 1);
    });
}

int bm_config_validate(const bm_config* cfg) {
    if (!cfg) return fail(BM_ERR_INVALID, "null argument");
    return guarded([&] { cfg->cfg.validate(); });
}

int bm_config_keys(const char** out, int capacity) {
    const auto& keys = ModemConfig::keys();
    if (out) {
        const int n = std::min<int>(capacity, static_cast<int>(keys.size()));
        for (int i = 0; i < n; ++i) out[i] = keys[i].c_str();
    }
    return static_cast<int>(keys.size());
}

int bm_run_frame(const bm_config* cfg, unsigned long long frame_index, unsigned flags,
                 bm_frame_report* out) {
    if (!cfg || !out) return fail(BM_ERR_INVALID, "null argument");
    return guarded([&] {
        const Modem modem(cfg->cfg);
        FrameRunSpec spec;
        if (flags & BM_FRAME_GENIE) spec.mode = SyncMode::genie;
        if (flags & BM_FRAME_ACQ_ONLY) spec.acq_only = true;
        if (flags & BM_FRAME_IDEAL_TIMING) spec.force_ideal_timing = true;
        const FrameResult r = modem.run_frame(frame_index, spec);
        bm_frame_report rep{};
        rep.t0_true = r.truth.t0_ts1p;
        rep.omega3_true = r.truth.omega3;
        rep.theta0_true = r.truth.theta0;
        rep.alpha_true = r.truth.alpha;
        rep.n1 = r.sync.n1;
        rep.n2 = r.sync.n2;
        rep.n3 = r.sync.n3;
        rep.omega3_hat = r.sync.omega3_hat;
        rep.omega_pass2 = r.sync.omega_pass2;
        rep.omegaf_hat = r.sync.omegaf_hat;
        rep.theta0_hat = r.sync.theta0_hat;
        rep.a_hat = r.sync.a_hat;
        rep.sigma2_hat = r.sync.sigma2_hat;
        rep.ratio = r.sync.ratio;
        rep.detected = r.sync.detected ? 1 : 0;
        rep.acq_failed = r.acq_failed ? 1 : 0;
        rep.truncated = r.truncated ? 1 : 0;
        rep.timing_shifts = r.shift_count;
        rep.payload_bits = r.payload_bits;
        rep.bit_errors = r.bit_errors;
        rep.predecoder_symbol_errors = r.predecoder_symbol_errors;
        rep.predecoder_symbols = r.predecoder_symbols;
        rep.frame_error = r.frame_error ? 1 : 0;
        *out = rep;
    });
}

int bm_run_experiment(const bm_config* cfg, const char* kind, const double* snr_db, int n_snr,
                      unsigned long long frames, int threads, const char* out_csv_path,
                      const char* dump_dir) {
    if (!cfg || !kind || !snr_db || n_snr < 1) return fail(BM_ERR_INVALID, "null argument");
    return guarded([&] {
        ExperimentSpec spec;
        spec.kind = kind;
        spec.snr_db.assign(snr_db, snr_db + n_snr);
        spec.frames = frames;
        spec.threads = threads < 1 ? 1 : threads;
        if (dump_dir) spec.dump_dir = dump_dir;
        if (!out_csv_path || std::strcmp(out_csv_path, "-") == 0) {
            run_experiment(cfg->cfg, spec, std::cout);
        } else {
            std::ofstream os(out_csv_path);
            if (!os) throw IoError(std::string("cannot open '") + out_csv_path + "'");
            run_experiment(cfg->cfg, spec, os);
        }
    });
}

int bm_write_frame_trace(const bm_config* cfg, unsigned long long frame_index,
                         const char* csv_path) {
    if (!cfg || !csv_path) return fail(BM_ERR_INVALID, "null argument");
    return guarded([&] {
        const Modem modem(cfg->cfg);
        std::ofstream os(csv_path);
        if (!os) throw IoError(std::string("cannot open '") + csv_path + "'");
        modem.write_frame_trace(frame_index, FrameRunSpec{}, os);
    });
}

const char* bm_last_error(void) { return g_last_error.c_str(); }

unsigned bm_abi_version(void) { return 1; }

} // extern "C"
