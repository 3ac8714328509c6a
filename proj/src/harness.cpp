#include "harness.hpp"

#include "errors.hpp"
#include "rxfront.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <mutex>
#include <fstream>
#include <thread>

namespace bm {

namespace {
constexpr double kTwoPi = 6.28318530717958647692528676656;

void dump_passband(const RealBuffer& r, const std::string& dir, uint64_t idx) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/frame_" + std::to_string(idx) + ".f32";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("dump: cannot open '" + path + "'");
    for (double v : r.samples) {
        const float f = static_cast<float>(v);
        out.write(reinterpret_cast<const char*>(&f), sizeof(f)); // little-endian host
    }
}

struct Welford {
    double sum = 0.0, sum2 = 0.0, maxabs = 0.0;
    uint64_t n = 0;
    void add(double v) {
        sum += v;
        sum2 += v * v;
        maxabs = std::max(maxabs, std::abs(v));
        ++n;
    }
    double mean() const { return n ? sum / n : 0.0; }
    double mean_sq() const { return n ? sum2 / n : 0.0; }
    double rms() const { return std::sqrt(mean_sq()); }
};

} // namespace

double n0_from_ebn0_db(double snr_db) {
    // Eb/N0 = 10 log10(|S_k|^2 / (2 N0)) with |S_k|^2 = 2
    return std::pow(10.0, -snr_db / 10.0);
}

void parallel_frames(uint64_t count, int threads, const std::function<void(uint64_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<uint64_t> next{0};
    std::vector<std::thread> pool;
    const int n_workers = std::min<uint64_t>(threads, count);
    pool.reserve(n_workers);
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex err_mu;
    for (int w = 0; w < n_workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const uint64_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!failed.exchange(true)) first_error = e.what();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failed) throw NumericError("parallel_frames: worker failed: " + first_error);
}

Modem::Modem(const ModemConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    pulses_ = PulseBank::design(cfg_);
    preamble_ = make_preamble(cfg_);
    postamble_ = make_postamble(cfg_);
    pi_ = make_interleaver(cfg_.info_bits(), cfg_.interleaver_seed);
    beta_ = build_beta(preamble_, pulses_.h, cfg_.L_isi);
}

RealBuffer Modem::make_frame(uint64_t frame_index, const FrameRunSpec& spec,
                             FrameTruth& truth) const {
    const ModemConfig& c = cfg_;
    RngStream rng_par = RngStream::derive(c.seed, frame_index, StreamPurpose::alpha);
    const double alpha =
        spec.force_ideal_timing ? 0.0 : (c.alpha_random ? rng_par.uniform01() : c.alpha);
    const double theta0 = c.theta0_random ? rng_par.uniform01() * kTwoPi : c.theta0;
    const double delta = spec.force_ideal_timing ? 0.0 : c.delta_ppm;
    const double ts = 1.0 / c.M;
    const double epsilon = -c.delta_sign * 2.0 * delta * 1e-6 * ts;

    const std::vector<uint8_t> payload = random_payload(c, frame_index);
    const Burst burst = assemble_burst(payload, c, preamble_, postamble_, pi_);
    ShapeResult shaped = shape_oqpsk(burst, alpha, epsilon, pulses_, c);

    // Noise-only guards around the burst; the carrier phase reference is the
    // start of the captured buffer.
    IqBuffer padded;
    padded.period = shaped.baseband.period;
    padded.grid = shaped.baseband.grid;
    padded.samples.assign(c.noise_prefix, cplx(0.0, 0.0));
    padded.samples.insert(padded.samples.end(), shaped.baseband.samples.begin(),
                          shaped.baseband.samples.end());
    padded.samples.insert(padded.samples.end(), c.noise_suffix, cplx(0.0, 0.0));

    RealBuffer r = modulate_passband(padded, c.omega3, theta0);
    RngStream rng_noise = RngStream::derive(c.seed, frame_index, StreamPurpose::noise);
    add_awgn(r, c.N0, rng_noise);

    const double ts_prime = ts + epsilon;
    const int center = (c.tx_span - 1) / 2;
    truth.t0_ts1p = c.noise_prefix * c.I + c.I * (alpha + center * ts) / ts_prime +
                    (c.mf_len - 1) / 2.0;
    truth.omega3 = c.omega3;
    truth.theta0 = theta0;
    truth.alpha = alpha;
    truth.epsilon = epsilon;
    truth.renorm_count = shaped.renorm_count;
    truth.payload = payload;
    return r;
}

FrameResult Modem::run_frame(uint64_t frame_index, const FrameRunSpec& spec) const {
    return run_frame_impl(frame_index, spec, nullptr);
}

FrameResult Modem::run_frame_impl(uint64_t frame_index, const FrameRunSpec& spec,
                                  DetectedFrame* detected_out) const {
    FrameResult res;
    const RealBuffer r = make_frame(frame_index, spec, res.truth);
    if (!spec.dump_dir.empty()) dump_passband(r, spec.dump_dir, frame_index);

    AcquireOutput acq;
    try {
        acq = (spec.mode == SyncMode::genie) ? genie_acquire(r, res.truth, beta_, pulses_, cfg_)
                                             : acquire(r, beta_, pulses_, cfg_);
    } catch (const std::exception&) {
        res.acq_failed = true;
        res.frame_error = true;
        return res;
    }
    res.sync = acq.sync;
    if (spec.acq_only) return res;

    const DetectedFrame det = run_tracking(acq.x3, acq.sync, beta_, pulses_, cfg_);
    res.truncated = det.truncated;
    res.shift_count = det.shift_count;
    if (detected_out) *detected_out = det;
    if (det.truncated) {
        res.frame_error = true;
        return res;
    }

    // Pre-decoder symbol accounting against the transmitted burst.
    {
        const Burst burst = assemble_burst(res.truth.payload, cfg_, preamble_, postamble_, pi_);
        const int ld = cfg_.Ld;
        for (int k = 0; k < ld; ++k) {
            res.predecoder_symbols += 2;
            if (det.hard_i[k] != burst.sym_i[cfg_.Lp + k]) ++res.predecoder_symbol_errors;
            if (det.hard_q[k] != burst.sym_q[cfg_.Lp + k]) ++res.predecoder_symbol_errors;
        }
    }

    const int n_info = cfg_.info_bits();
    SoftFrame frame;
    frame.sigma2 = std::max(acq.sync.sigma2_hat, SoftFrame::kSigma2Floor);
    frame.r_sys.assign(det.soft_i.begin(), det.soft_i.begin() + n_info);
    frame.r_par1.assign(n_info, 0.0);
    frame.r_par2.assign(n_info, 0.0);
    for (int k = 0; k < n_info; ++k) {
        if (k % 2 == 1)
            frame.r_par1[k] = det.soft_q[k];
        else
            frame.r_par2[k] = det.soft_q[k];
    }
    frame.r_sys_tail.assign(det.soft_i.begin() + n_info, det.soft_i.begin() + n_info + 4);
    frame.r_par1_tail.assign(det.soft_q.begin() + n_info, det.soft_q.begin() + n_info + 4);

    res.payload_bits = n_info;
    try {
        const TurboDecodeResult dec = turbo_decode(frame, pi_, cfg_.iterations);
        for (int k = 0; k < n_info; ++k)
            if (dec.bits[k] != res.truth.payload[k]) ++res.bit_errors;
    } catch (const std::exception&) {
        res.bit_errors = n_info; // counted, never propagated
    }
    res.frame_error = res.bit_errors > 0;
    return res;
}

void Modem::write_frame_trace(uint64_t frame_index, const FrameRunSpec& spec,
                              std::ostream& os) const {
    DetectedFrame det;
    FrameRunSpec s = spec;
    s.acq_only = false;
    run_frame_impl(frame_index, s, &det);
    const int mi = cfg_.samples_per_symbol_mf();
    os << "# schema=1\n";
    os << "symbol_index,theta_hat,c_shift,sampling_index_mod_MI\n";
    for (size_t k = 0; k < det.theta_trace.size(); ++k) {
        os << k << ',' << det.theta_trace[k] << ',' << static_cast<int>(det.shift_trace[k]) << ','
           << det.instant_trace[k] % mi << '\n';
    }
}

namespace {

struct BerRow {
    uint64_t bits = 0, errs = 0, frames = 0, frame_errs = 0;
    uint64_t genie_bits = 0, genie_errs = 0, genie_frame_errs = 0;
    Welford t3, w_ml, amp, nvar, ratio;
    double r_min = 0.0;
    double runtime_s = 0.0;
};

void write_ber_csv(std::ostream& os, const ModemConfig& cfg, double snr,
                   const BerRow& row) {
    os << cfg.Lp << ',' << snr << ',' << row.frames << ','
       << (row.bits ? static_cast<double>(row.errs) / row.bits : 0.0) << ','
       << (row.frames ? static_cast<double>(row.frame_errs) / row.frames : 0.0) << ','
       << (row.genie_bits ? static_cast<double>(row.genie_errs) / row.genie_bits : 0.0) << ','
       << (row.frames ? static_cast<double>(row.genie_frame_errs) / row.frames : 0.0) << ','
       << row.t3.mean_sq() << ',' << row.w_ml.rms() << ',' << row.w_ml.maxabs << ','
       << row.amp.rms() << ',' << row.nvar.rms() << ',' << row.ratio.mean() << ','
       << row.r_min << ',' << row.runtime_s << '\n';
}

void ber_sweep(const ModemConfig& base, const ExperimentSpec& spec, std::ostream& os) {
    os << "# schema=1\n";
    os << "lp,snr_db,frames,ber,fer,genie_ber,genie_fer,timing_var_norm,freq_rms_rad,"
          "freq_max_rad,amp_rms,noisevar_rms_norm,r_avg,r_min,runtime_s\n";
    for (double snr : spec.snr_db) {
        ModemConfig cfg = base;
        cfg.N0 = n0_from_ebn0_db(snr);
        const Modem modem(cfg);
        const auto start = std::chrono::steady_clock::now();
        std::vector<FrameResult> synced(spec.frames), genie(spec.frames);
        parallel_frames(spec.frames, spec.threads, [&](uint64_t i) {
            FrameRunSpec fs;
            fs.dump_dir = spec.dump_dir;
            synced[i] = modem.run_frame(i, fs);
            FrameRunSpec gs;
            gs.mode = SyncMode::genie;
            genie[i] = modem.run_frame(i, gs);
        });
        BerRow row;
        row.frames = spec.frames;
        row.r_min = std::numeric_limits<double>::infinity();
        const double mi = cfg.samples_per_symbol_mf();
        for (uint64_t i = 0; i < spec.frames; ++i) {
            const FrameResult& fr = synced[i];
            row.bits += fr.payload_bits;
            row.errs += fr.bit_errors;
            row.frame_errs += fr.frame_error ? 1 : 0;
            row.genie_bits += genie[i].payload_bits;
            row.genie_errs += genie[i].bit_errors;
            row.genie_frame_errs += genie[i].frame_error ? 1 : 0;
            if (!fr.acq_failed) {
                row.t3.add((fr.sync.n3 - fr.truth.t0_ts1p) / mi);
                row.w_ml.add(fr.truth.omega3 - (fr.sync.omega3_hat + fr.sync.omegaf_hat));
                row.amp.add(fr.sync.a_hat - 1.0);
                row.nvar.add((fr.sync.sigma2_hat - cfg.N0) / std::max(cfg.N0, 1e-300));
                row.ratio.add(fr.sync.ratio);
                row.r_min = std::min(row.r_min, fr.sync.ratio);
            }
        }
        if (!std::isfinite(row.r_min)) row.r_min = 0.0;
        row.runtime_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_ber_csv(os, cfg, snr, row);
    }
}

void estimator_stats(const ModemConfig& base, const ExperimentSpec& spec, std::ostream& os) {
    os << "# schema=1\n";
    os << "lp,snr_db,pass,timing_var_norm,timing_max_samples,freq_rms_rad,freq_max_rad,"
          "amp_rms,noisevar_rms_norm,frames\n";
    for (double snr : spec.snr_db) {
        ModemConfig cfg = base;
        cfg.N0 = n0_from_ebn0_db(snr);
        const Modem modem(cfg);
        std::vector<FrameResult> rs(spec.frames);
        parallel_frames(spec.frames, spec.threads, [&](uint64_t i) {
            FrameRunSpec fs;
            fs.acq_only = true;
            fs.force_ideal_timing = true; // timing-error metrics need delta = alpha = 0
            fs.dump_dir = spec.dump_dir;
            rs[i] = modem.run_frame(i, fs);
        });
        const double mi = cfg.samples_per_symbol_mf();
        Welford t[4], w[4], amp, nvar;
        for (const FrameResult& fr : rs) {
            if (fr.acq_failed) continue;
            const double t0 = fr.truth.t0_ts1p;
            t[0].add((fr.sync.n1 - t0) / mi);
            t[1].add((fr.sync.n2 - t0) / mi);
            t[2].add((fr.sync.n3 - t0) / mi);
            t[3].add((fr.sync.n3 - t0) / mi);
            const double w3 = fr.truth.omega3;
            w[0].add(w3 - fr.sync.omega3_hat);
            w[1].add(w3 - fr.sync.omega_pass2);
            w[2].add(w3 - fr.sync.omega_ml1);
            w[3].add(w3 - (fr.sync.omega3_hat + fr.sync.omegaf_hat));
            amp.add(fr.sync.a_hat - 1.0);
            nvar.add((fr.sync.sigma2_hat - cfg.N0) / std::max(cfg.N0, 1e-300));
        }
        const char* passes[4] = {"a", "b", "c", "d"};
        for (int p = 0; p < 4; ++p) {
            os << cfg.Lp << ',' << snr << ',' << passes[p] << ',' << t[p].mean_sq() << ','
               << t[p].maxabs * mi << ',' << w[p].rms() << ',' << w[p].maxabs << ','
               << amp.rms() << ',' << nvar.rms() << ',' << spec.frames << '\n';
        }
    }
}

void frame_detect(const ModemConfig& base, const ExperimentSpec& spec, std::ostream& os) {
    os << "# schema=1\n";
    os << "lp,snr_db,frames,r_avg,r_min,detect_rate,threshold\n";
    for (double snr : spec.snr_db) {
        ModemConfig cfg = base;
        cfg.N0 = n0_from_ebn0_db(snr);
        const Modem modem(cfg);
        std::vector<FrameResult> rs(spec.frames);
        parallel_frames(spec.frames, spec.threads, [&](uint64_t i) {
            FrameRunSpec fs;
            fs.acq_only = true;
            fs.dump_dir = spec.dump_dir;
            rs[i] = modem.run_frame(i, fs);
        });
        Welford ratio;
        double r_min = std::numeric_limits<double>::infinity();
        uint64_t detected = 0;
        for (const FrameResult& fr : rs) {
            if (fr.acq_failed) continue;
            ratio.add(fr.sync.ratio);
            r_min = std::min(r_min, fr.sync.ratio);
            if (fr.sync.detected) ++detected;
        }
        if (!std::isfinite(r_min)) r_min = 0.0;
        os << cfg.Lp << ',' << snr << ',' << spec.frames << ',' << ratio.mean() << ',' << r_min
           << ',' << (spec.frames ? static_cast<double>(detected) / spec.frames : 0.0) << ','
           << cfg.detect_threshold << '\n';
    }
}

void codec_test(const ModemConfig& base, const ExperimentSpec& spec, std::ostream& os) {
    os << "# schema=1\n";
    os << "ebno_db,iteration,ber,frames\n";
    const int n_info = base.info_bits();
    const Interleaver pi = make_interleaver(n_info, base.interleaver_seed);
    for (double snr : spec.snr_db) {
        const double n0 = n0_from_ebn0_db(snr);
        std::vector<std::vector<uint64_t>> errs(spec.frames);
        parallel_frames(spec.frames, spec.threads, [&](uint64_t f) {
            RngStream rng_bits = RngStream::derive(base.seed, f, StreamPurpose::data);
            RngStream rng_noise = RngStream::derive(base.seed, f, StreamPurpose::noise);
            std::vector<uint8_t> bits(n_info);
            for (auto& b : bits) b = static_cast<uint8_t>(rng_bits.bit());
            const TurboCodeword cw = turbo_encode(bits, pi);
            const double sigma = std::sqrt(n0);
            auto tx_bit = [&](uint8_t b) { return (1.0 - 2.0 * b) + sigma * rng_noise.gauss(); };
            SoftFrame frame;
            frame.sigma2 = std::max(n0, SoftFrame::kSigma2Floor);
            frame.r_sys.resize(n_info);
            frame.r_par1.assign(n_info, 0.0);
            frame.r_par2.assign(n_info, 0.0);
            for (int k = 0; k < n_info; ++k) {
                frame.r_sys[k] = tx_bit(cw.sys[k]);
                if (k % 2 == 1)
                    frame.r_par1[k] = tx_bit(cw.parity1[k]);
                else
                    frame.r_par2[k] = tx_bit(cw.parity2[k]);
            }
            frame.r_sys_tail.resize(4);
            frame.r_par1_tail.resize(4);
            for (int j = 0; j < 4; ++j) {
                frame.r_sys_tail[j] = tx_bit(cw.tail_sys[j]);
                frame.r_par1_tail[j] = tx_bit(cw.tail_parity1[j]);
            }
            const TurboDecodeResult dec = turbo_decode(frame, pi, base.iterations);
            errs[f].resize(base.iterations, 0);
            for (int it = 0; it < base.iterations; ++it)
                for (int k = 0; k < n_info; ++k)
                    if (dec.bits_per_iteration[it][k] != bits[k]) ++errs[f][it];
        });
        for (int it = 0; it < base.iterations; ++it) {
            uint64_t total = 0;
            for (const auto& e : errs) total += e[it];
            os << snr << ',' << it + 1 << ','
               << static_cast<double>(total) / (static_cast<double>(n_info) * spec.frames) << ','
               << spec.frames << '\n';
        }
    }
}

} // namespace

void run_experiment(const ModemConfig& cfg, const ExperimentSpec& spec, std::ostream& csv) {
    if (spec.frames < 1) throw ConfigError("experiment: frame count must be >= 1");
    if (spec.snr_db.empty()) throw ConfigError("experiment: snr list must not be empty");
    if (spec.kind == "ber_sweep")
        ber_sweep(cfg, spec, csv);
    else if (spec.kind == "estimator_stats")
        estimator_stats(cfg, spec, csv);
    else if (spec.kind == "frame_detect")
        frame_detect(cfg, spec, csv);
    else if (spec.kind == "codec_test")
        codec_test(cfg, spec, csv);
    else
        throw ConfigError("experiment: unknown kind '" + spec.kind + "'");
}

} // namespace bm
