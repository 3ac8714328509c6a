#include "turbo.hpp"

#include "errors.hpp"
#include "rng.hpp"

#include <cmath>

namespace bm {

namespace {

// Register layout: state bits (w1, w2, w3, w4) = (w_{k-1} .. w_{k-4}),
// packed little-endian (w1 is bit 0). Feedback 1 + D + D^4, feedforward
// 1 + D^2 + D^3 + D^4 acting on the internal sequence w.
inline int step_state(int state, int bit, int& parity_out) {
    const int w1 = state & 1, w2 = (state >> 1) & 1, w3 = (state >> 2) & 1, w4 = (state >> 3) & 1;
    const int w0 = bit ^ w1 ^ w4;
    parity_out = w0 ^ w2 ^ w3 ^ w4;
    return (w0) | (w1 << 1) | (w2 << 2) | (w3 << 3);
}

TurboTrellis build_trellis() {
    TurboTrellis t{};
    uint8_t fill[TurboTrellis::kStates] = {0};
    for (int s = 0; s < TurboTrellis::kStates; ++s) {
        for (int b = 0; b < 2; ++b) {
            int par = 0;
            const int ns = step_state(s, b, par);
            t.next[s][b] = static_cast<uint8_t>(ns);
            t.parity[s][b] = static_cast<uint8_t>(par);
            t.prev_state[ns][fill[ns]] = static_cast<uint8_t>(s);
            t.prev_bit[ns][fill[ns]] = static_cast<uint8_t>(b);
            ++fill[ns];
        }
        const int w1 = s & 1, w4 = (s >> 3) & 1;
        t.term_bit[s] = static_cast<uint8_t>(w1 ^ w4);
    }
    return t;
}

inline double gamma_metric(double r, double symbol, double inv_2s2) {
    const double d = r - symbol;
    return std::exp(-d * d * inv_2s2);
}

} // namespace

const TurboTrellis& TurboTrellis::instance() {
    static const TurboTrellis t = build_trellis();
    return t;
}

RscCodeword rsc_encode(const std::vector<uint8_t>& bits, bool terminate) {
    const TurboTrellis& t = TurboTrellis::instance();
    RscCodeword out;
    out.parity.resize(bits.size());
    int state = 0;
    for (size_t i = 0; i < bits.size(); ++i) {
        out.parity[i] = t.parity[state][bits[i] & 1];
        state = t.next[state][bits[i] & 1];
    }
    if (terminate) {
        out.tail_bits.resize(4);
        out.tail_parity.resize(4);
        for (int i = 0; i < 4; ++i) {
            const int b = t.term_bit[state];
            out.tail_bits[i] = static_cast<uint8_t>(b);
            out.tail_parity[i] = t.parity[state][b];
            state = t.next[state][b];
        }
    }
    out.final_state = state;
    return out;
}

Interleaver make_interleaver(int length, uint64_t seed) {
    if (length < 1) throw ConfigError("interleaver: length must be >= 1");
    RngStream rng = RngStream::derive(seed, 0, StreamPurpose::interleaver);
    Interleaver pi;
    pi.perm.resize(length);
    for (int i = 0; i < length; ++i) pi.perm[i] = i;
    for (int i = length - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_u64() % static_cast<uint64_t>(i + 1));
        std::swap(pi.perm[i], pi.perm[j]);
    }
    pi.inv.resize(length);
    for (int i = 0; i < length; ++i) pi.inv[pi.perm[i]] = i;
    return pi;
}

TurboCodeword turbo_encode(const std::vector<uint8_t>& bits, const Interleaver& pi) {
    const int n = static_cast<int>(bits.size());
    if (static_cast<int>(pi.perm.size()) != n)
        throw ConfigError("turbo_encode: interleaver length mismatch");
    RscCodeword c1 = rsc_encode(bits, true);
    std::vector<uint8_t> permuted(n);
    for (int m = 0; m < n; ++m) permuted[m] = bits[pi.perm[m]];
    RscCodeword c2 = rsc_encode(permuted, false);
    TurboCodeword out;
    out.sys = bits;
    out.parity1 = std::move(c1.parity);
    out.parity2 = std::move(c2.parity);
    out.tail_sys = std::move(c1.tail_bits);
    out.tail_parity1 = std::move(c1.tail_parity);
    return out;
}

std::vector<StateVec> bcjr_forward(const BcjrProblem& p) {
    const TurboTrellis& t = TurboTrellis::instance();
    const int L = p.stages();
    const double inv_2s2 = 1.0 / (2.0 * p.sigma2);
    std::vector<StateVec> alpha(L + 1);
    alpha[0].fill(1.0 / TurboTrellis::kStates);
    for (int i = 0; i < L; ++i) {
        const double sc = p.scale_at(i);
        const double gs[2] = {sc * gamma_metric(p.r_sys[i], +1.0, inv_2s2),
                              sc * gamma_metric(p.r_sys[i], -1.0, inv_2s2)};
        double gp[2] = {1.0, 1.0};
        if (p.par_present[i]) {
            gp[0] = gamma_metric(p.r_par[i], +1.0, inv_2s2);
            gp[1] = gamma_metric(p.r_par[i], -1.0, inv_2s2);
        }
        const double prior_plus = p.prior_plus.empty() ? 0.5 : p.prior_plus[i];
        const double pr[2] = {prior_plus, 1.0 - prior_plus};
        StateVec& an = alpha[i + 1];
        an.fill(0.0);
        for (int m = 0; m < TurboTrellis::kStates; ++m) {
            const double am = alpha[i][m];
            if (am == 0.0) continue;
            for (int b = 0; b < 2; ++b) {
                const int par = t.parity[m][b];
                an[t.next[m][b]] += am * gs[b] * gp[par] * pr[b];
            }
        }
        double norm = 0.0;
        for (double v : an) norm += v;
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw NumericError("bcjr_forward: metric underflow; raise the sigma2 floor");
        for (double& v : an) v /= norm;
    }
    return alpha;
}

std::vector<StateVec> bcjr_backward(const BcjrProblem& p) {
    const TurboTrellis& t = TurboTrellis::instance();
    const int L = p.stages();
    const double inv_2s2 = 1.0 / (2.0 * p.sigma2);
    std::vector<StateVec> beta(L + 1);
    if (p.terminated) {
        beta[L].fill(0.0);
        beta[L][0] = 1.0;
    } else {
        beta[L].fill(1.0 / TurboTrellis::kStates);
    }
    for (int i = L - 1; i >= 0; --i) {
        const double sc = p.scale_at(i);
        const double gs[2] = {sc * gamma_metric(p.r_sys[i], +1.0, inv_2s2),
                              sc * gamma_metric(p.r_sys[i], -1.0, inv_2s2)};
        double gp[2] = {1.0, 1.0};
        if (p.par_present[i]) {
            gp[0] = gamma_metric(p.r_par[i], +1.0, inv_2s2);
            gp[1] = gamma_metric(p.r_par[i], -1.0, inv_2s2);
        }
        const double prior_plus = p.prior_plus.empty() ? 0.5 : p.prior_plus[i];
        const double pr[2] = {prior_plus, 1.0 - prior_plus};
        StateVec& bn = beta[i];
        bn.fill(0.0);
        for (int m = 0; m < TurboTrellis::kStates; ++m) {
            double acc = 0.0;
            for (int b = 0; b < 2; ++b) {
                const int par = t.parity[m][b];
                acc += beta[i + 1][t.next[m][b]] * gs[b] * gp[par] * pr[b];
            }
            bn[m] = acc;
        }
        double norm = 0.0;
        for (double v : bn) norm += v;
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw NumericError("bcjr_backward: metric underflow; raise the sigma2 floor");
        for (double& v : bn) v /= norm;
    }
    return beta;
}

std::vector<double> bcjr_extrinsic(const BcjrProblem& p,
                                   const std::vector<StateVec>& alpha,
                                   const std::vector<StateVec>& beta) {
    const TurboTrellis& t = TurboTrellis::instance();
    const int L = p.stages();
    const double inv_2s2 = 1.0 / (2.0 * p.sigma2);
    std::vector<double> f_plus(L);
    for (int k = 0; k < L; ++k) {
        double gp[2] = {1.0, 1.0};
        if (p.par_present[k]) {
            gp[0] = gamma_metric(p.r_par[k], +1.0, inv_2s2);
            gp[1] = gamma_metric(p.r_par[k], -1.0, inv_2s2);
        }
        double g_plus = 0.0, g_minus = 0.0;
        for (int n = 0; n < TurboTrellis::kStates; ++n) {
            const double an = alpha[k][n];
            if (an == 0.0) continue;
            g_plus += an * gp[t.parity[n][0]] * beta[k + 1][t.rho_plus(n)];
            g_minus += an * gp[t.parity[n][1]] * beta[k + 1][t.rho_minus(n)];
        }
        const double den = g_plus + g_minus;
        if (!(den > 0.0) || !std::isfinite(den))
            throw NumericError("bcjr_extrinsic: both transition metrics vanished");
        f_plus[k] = g_plus / den;
    }
    return f_plus;
}

std::vector<double> bcjr_app(const BcjrProblem& p, const std::vector<double>& extrinsic_plus) {
    const int L = p.stages();
    const double inv_2s2 = 1.0 / (2.0 * p.sigma2);
    std::vector<double> app(L);
    for (int k = 0; k < L; ++k) {
        const double prior_plus = p.prior_plus.empty() ? 0.5 : p.prior_plus[k];
        const double pp = extrinsic_plus[k] * prior_plus * gamma_metric(p.r_sys[k], +1.0, inv_2s2);
        const double pm = (1.0 - extrinsic_plus[k]) * (1.0 - prior_plus) *
                          gamma_metric(p.r_sys[k], -1.0, inv_2s2);
        const double den = pp + pm;
        if (!(den > 0.0) || !std::isfinite(den))
            throw NumericError("bcjr_app: posterior normalization failed");
        app[k] = pp / den;
    }
    return app;
}

TurboDecodeResult turbo_decode(const SoftFrame& frame, const Interleaver& pi, int iterations) {
    if (iterations < 1) throw ConfigError("turbo_decode: iterations must be >= 1");
    const int L = frame.length();
    if (static_cast<int>(pi.perm.size()) != L)
        throw ConfigError("turbo_decode: interleaver length mismatch");
    const double sigma2 = std::max(frame.sigma2, SoftFrame::kSigma2Floor);
    const int tail = static_cast<int>(frame.r_sys_tail.size());

    // Decoder 1: terminated, tail stages appended, parity at odd positions.
    BcjrProblem d1;
    d1.sigma2 = sigma2;
    d1.terminated = tail > 0;
    d1.r_sys = frame.r_sys;
    d1.r_sys.insert(d1.r_sys.end(), frame.r_sys_tail.begin(), frame.r_sys_tail.end());
    d1.r_par.assign(L + tail, 0.0);
    d1.par_present.assign(L + tail, 0);
    for (int i = 1; i < L; i += 2) {
        d1.r_par[i] = frame.r_par1[i];
        d1.par_present[i] = 1;
    }
    for (int j = 0; j < tail; ++j) {
        d1.r_par[L + j] = frame.r_par1_tail[j];
        d1.par_present[L + j] = 1;
    }

    // Decoder 2: open, parity at even positions of its own stage index.
    BcjrProblem d2;
    d2.sigma2 = sigma2;
    d2.terminated = false;
    d2.r_sys.resize(L);
    for (int m = 0; m < L; ++m) d2.r_sys[m] = frame.r_sys[pi.perm[m]];
    d2.r_par.assign(L, 0.0);
    d2.par_present.assign(L, 0);
    for (int m = 0; m < L; m += 2) {
        d2.r_par[m] = frame.r_par2[m];
        d2.par_present[m] = 1;
    }

    std::vector<double> f2_plus(L, 0.5); // decoder-2 extrinsic, deinterleaved
    TurboDecodeResult out;
    out.bits_per_iteration.reserve(iterations);

    for (int it = 0; it < iterations; ++it) {
        d1.prior_plus.assign(L + tail, 0.5);
        for (int k = 0; k < L; ++k) d1.prior_plus[k] = f2_plus[k];
        const auto a1 = bcjr_forward(d1);
        const auto b1 = bcjr_backward(d1);
        const auto f1_plus = bcjr_extrinsic(d1, a1, b1);

        d2.prior_plus.resize(L);
        for (int m = 0; m < L; ++m) d2.prior_plus[m] = f1_plus[pi.perm[m]];
        const auto a2 = bcjr_forward(d2);
        const auto b2 = bcjr_backward(d2);
        const auto f2_int = bcjr_extrinsic(d2, a2, b2);
        for (int m = 0; m < L; ++m) f2_plus[pi.perm[m]] = f2_int[m];

        d1.prior_plus.assign(L + tail, 0.5);
        for (int k = 0; k < L; ++k) d1.prior_plus[k] = f2_plus[k];
        std::vector<double> ext(f1_plus.begin(), f1_plus.begin() + L + tail);
        auto app = bcjr_app(d1, ext);
        app.resize(L);
        std::vector<uint8_t> hard(L);
        for (int k = 0; k < L; ++k) hard[k] = app[k] >= 0.5 ? 0 : 1;
        out.bits_per_iteration.push_back(hard);
        if (it == iterations - 1) {
            out.bits = std::move(hard);
            out.app_plus = std::move(app);
        }
    }
    return out;
}

} // namespace bm
