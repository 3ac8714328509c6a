#include "config.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "turbo.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

using namespace bm;

namespace {

// Independent bit-level oracle for the RSC encoder: polynomial arithmetic on
// explicit bit histories, no trellis tables.
std::vector<uint8_t> rsc_parity_oracle(const std::vector<uint8_t>& bits) {
    std::vector<uint8_t> w; // internal sequence, w[k] = b[k] ^ w[k-1] ^ w[k-4]
    std::vector<uint8_t> parity;
    auto wat = [&](int idx) -> uint8_t { return idx >= 0 ? w[idx] : 0; };
    for (size_t k = 0; k < bits.size(); ++k) {
        const uint8_t wk = bits[k] ^ wat(static_cast<int>(k) - 1) ^ wat(static_cast<int>(k) - 4);
        w.push_back(wk);
        const int ik = static_cast<int>(k);
        parity.push_back(wk ^ wat(ik - 2) ^ wat(ik - 3) ^ wat(ik - 4));
    }
    return parity;
}

struct OracleProblem {
    // mirrors BcjrProblem but marginalizes by exhaustive path enumeration
    std::vector<double> r_sys, r_par;
    std::vector<uint8_t> par_present;
    std::vector<double> prior_plus;
    double sigma2 = 1.0;
    bool terminated = false;
};

double g(double r, double s, double sigma2) {
    return std::exp(-(r - s) * (r - s) / (2.0 * sigma2));
}

// Per-bit posteriors by summing over every (start state, input sequence) path.
// strip_k >= 0 removes the systematic metric and prior at that one position
// (the extrinsic-information marginal).
std::vector<double> oracle_app(const OracleProblem& p, int strip_k = -1) {
    const TurboTrellis& t = TurboTrellis::instance();
    const int L = static_cast<int>(p.r_sys.size());
    std::vector<double> num(L, 0.0);
    double den = 0.0;
    for (int s0 = 0; s0 < 16; ++s0) {
        for (uint32_t word = 0; word < (1u << L); ++word) {
            double wgt = 1.0 / 16.0;
            int st = s0;
            for (int i = 0; i < L; ++i) {
                const int b = (word >> i) & 1;
                const double sym = 1.0 - 2.0 * b;
                const double prior = p.prior_plus.empty() ? 0.5 : p.prior_plus[i];
                if (i != strip_k) {
                    wgt *= g(p.r_sys[i], sym, p.sigma2);
                    wgt *= (b == 0) ? prior : 1.0 - prior;
                }
                if (p.par_present[i]) {
                    const double cs = 1.0 - 2.0 * t.parity[st][b];
                    wgt *= g(p.r_par[i], cs, p.sigma2);
                }
                st = t.next[st][b];
            }
            if (p.terminated && st != 0) continue;
            den += wgt;
            for (int i = 0; i < L; ++i)
                if (((word >> i) & 1) == 0) num[i] += wgt;
        }
    }
    for (double& v : num) v /= den;
    return num;
}

// Forward state marginals: P(state at stage i = n | observations before i).
std::vector<StateVec> oracle_alpha(const OracleProblem& p) {
    const TurboTrellis& t = TurboTrellis::instance();
    const int L = static_cast<int>(p.r_sys.size());
    std::vector<StateVec> a(L + 1);
    for (auto& row : a) row.fill(0.0);
    for (int s0 = 0; s0 < 16; ++s0) {
        for (uint32_t word = 0; word < (1u << L); ++word) {
            double wgt = 1.0 / 16.0;
            int st = s0;
            a[0][s0] += 1.0 / 16.0 / (1u << L); // uniform over inputs too
            for (int i = 0; i < L; ++i) {
                const int b = (word >> i) & 1;
                const double sym = 1.0 - 2.0 * b;
                const double prior = p.prior_plus.empty() ? 0.5 : p.prior_plus[i];
                wgt *= g(p.r_sys[i], sym, p.sigma2) * ((b == 0) ? prior : 1.0 - prior);
                if (p.par_present[i]) {
                    const double cs = 1.0 - 2.0 * t.parity[st][b];
                    wgt *= g(p.r_par[i], cs, p.sigma2);
                }
                st = t.next[st][b];
                a[i + 1][st] += wgt;
            }
        }
    }
    for (auto& row : a) {
        double s = 0.0;
        for (double v : row) s += v;
        for (double& v : row) v /= s;
    }
    return a;
}

BcjrProblem to_bcjr(const OracleProblem& p) {
    BcjrProblem q;
    q.r_sys = p.r_sys;
    q.r_par = p.r_par;
    q.par_present = p.par_present;
    q.prior_plus = p.prior_plus;
    q.sigma2 = p.sigma2;
    q.terminated = p.terminated;
    return q;
}

OracleProblem random_problem(RngStream& rng, int L, double sigma2, bool priors) {
    OracleProblem p;
    p.sigma2 = sigma2;
    p.r_sys.resize(L);
    p.r_par.resize(L);
    p.par_present.resize(L);
    if (priors) p.prior_plus.resize(L);
    for (int i = 0; i < L; ++i) {
        p.r_sys[i] = (1.0 - 2.0 * rng.bit()) + std::sqrt(sigma2) * rng.gauss();
        p.par_present[i] = static_cast<uint8_t>(i % 2); // decoder-1 style puncturing
        p.r_par[i] = (1.0 - 2.0 * rng.bit()) + std::sqrt(sigma2) * rng.gauss();
        if (priors) p.prior_plus[i] = 0.1 + 0.8 * rng.uniform01();
    }
    return p;
}

} // namespace

TEST_CASE("trellis: two successors and two predecessors per state") {
    const TurboTrellis& t = TurboTrellis::instance();
    std::array<int, 16> succ{}, pred{};
    for (int s = 0; s < 16; ++s) {
        CHECK(t.next[s][0] != t.next[s][1]);
        ++succ[t.next[s][0]];
        ++succ[t.next[s][1]];
        CHECK(t.rho_plus(s) == t.next[s][0]);
        CHECK(t.rho_minus(s) == t.next[s][1]);
        for (int j = 0; j < 2; ++j) {
            CHECK(t.next[t.prev_state[s][j]][t.prev_bit[s][j]] == s);
            ++pred[s];
        }
        // termination input drives toward lower register occupancy
        const int b = t.term_bit[s];
        CHECK((t.next[s][b] & 1) == 0); // newest register bit forced to zero
    }
    for (int s = 0; s < 16; ++s) {
        CHECK(succ[s] == 2);
        CHECK(pred[s] == 2);
    }
}

TEST_CASE("rsc_encode: all-zero input stays at state 0 with zero parity") {
    const auto cw = rsc_encode(std::vector<uint8_t>(64, 0), true);
    for (uint8_t b : cw.parity) CHECK(b == 0);
    for (uint8_t b : cw.tail_bits) CHECK(b == 0);
    CHECK(cw.final_state == 0);
}

TEST_CASE("rsc_encode: parity equals the shift-register oracle") {
    std::vector<uint8_t> impulse(32, 0);
    impulse[0] = 1;
    CHECK(rsc_encode(impulse, false).parity == rsc_parity_oracle(impulse));
    RngStream rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<uint8_t> bits(48);
        for (auto& b : bits) b = static_cast<uint8_t>(rng.bit());
        CHECK(rsc_encode(bits, false).parity == rsc_parity_oracle(bits));
    }
}

TEST_CASE("rsc_encode: linearity over GF(2) and termination reaches state 0") {
    RngStream rng(6);
    std::vector<uint8_t> a(64), b(64);
    for (int i = 0; i < 64; ++i) {
        a[i] = static_cast<uint8_t>(rng.bit());
        b[i] = static_cast<uint8_t>(rng.bit());
    }
    std::vector<uint8_t> x(64);
    for (int i = 0; i < 64; ++i) x[i] = a[i] ^ b[i];
    const auto pa = rsc_encode(a, false).parity;
    const auto pb = rsc_encode(b, false).parity;
    const auto px = rsc_encode(x, false).parity;
    for (int i = 0; i < 64; ++i) CHECK(px[i] == (pa[i] ^ pb[i]));
    CHECK(rsc_encode(a, true).final_state == 0);
    CHECK(rsc_encode(b, true).tail_bits.size() == 4);
}

TEST_CASE("turbo_encode: zero frame, lengths, and tail accounting") {
    const Interleaver pi = make_interleaver(8, 99);
    const auto cw = turbo_encode(std::vector<uint8_t>(8, 0), pi);
    CHECK(cw.sys.size() == 8);
    CHECK(cw.parity1.size() == 8);
    CHECK(cw.parity2.size() == 8);
    CHECK(cw.tail_sys.size() == 4);
    // rate 1/2: 8 info bits -> 16 coded bits on the air plus 8 tail bits
    int on_air = 0;
    for (int i = 0; i < 8; ++i) {
        CHECK(cw.sys[i] == 0);
        CHECK(((i % 2 == 1) ? cw.parity1[i] : cw.parity2[i]) == 0);
        on_air += 2;
    }
    CHECK(on_air == 16);
}

TEST_CASE("interleaver: permutation and inverse") {
    const Interleaver pi = make_interleaver(257, 1234);
    std::vector<int> seen(257, 0);
    for (int m = 0; m < 257; ++m) {
        ++seen[pi.perm[m]];
        CHECK(pi.inv[pi.perm[m]] == m);
    }
    for (int v : seen) CHECK(v == 1);
}

TEST_CASE("bcjr_forward: zero observations give uniform alpha at every stage") {
    BcjrProblem p;
    p.r_sys.assign(6, 0.0);
    p.r_par.assign(6, 0.0);
    p.par_present.assign(6, 0);
    p.sigma2 = 1.0;
    const auto a = bcjr_forward(p);
    for (const auto& row : a) {
        double sum = 0.0;
        for (double v : row) {
            CHECK(v == doctest::Approx(1.0 / 16).epsilon(1e-12));
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto b = bcjr_backward(p);
    for (const auto& row : b)
        for (double v : row) CHECK(v == doctest::Approx(1.0 / 16).epsilon(1e-12));
}

TEST_CASE("bcjr_forward: high-SNR single bit concentrates on +1 successors") {
    BcjrProblem p;
    p.r_sys = {1.0};
    p.r_par = {0.0};
    p.par_present = {0};
    p.sigma2 = 1e-3;
    const auto a = bcjr_forward(p);
    const TurboTrellis& t = TurboTrellis::instance();
    std::array<bool, 16> reach_plus{};
    for (int s = 0; s < 16; ++s) reach_plus[t.rho_plus(s)] = true;
    for (int n = 0; n < 16; ++n) {
        if (reach_plus[n])
            CHECK(a[1][n] > 1e-3);
        else
            CHECK(a[1][n] < 1e-12);
    }
}

TEST_CASE("bcjr vs exhaustive path oracle on 8-bit frames") {
    RngStream rng(77);
    for (int trial = 0; trial < 6; ++trial) {
        const double sigma2 = (trial % 3 == 0) ? 0.2 : (trial % 3 == 1) ? 1.0 : 3.0;
        const OracleProblem p = random_problem(rng, 8, sigma2, trial % 2 == 1);
        const BcjrProblem q = to_bcjr(p);
        const auto alpha = bcjr_forward(q);
        const auto beta = bcjr_backward(q);

        const auto a_or = oracle_alpha(p);
        for (int i = 0; i <= 8; ++i)
            for (int n = 0; n < 16; ++n)
                CHECK(alpha[i][n] == doctest::Approx(a_or[i][n]).epsilon(1e-9));

        const auto f1 = bcjr_extrinsic(q, alpha, beta);
        const auto app = bcjr_app(q, f1);
        const auto app_or = oracle_app(p);
        for (int k = 0; k < 8; ++k) CHECK(app[k] == doctest::Approx(app_or[k]).epsilon(1e-9));

        for (int k = 0; k < 8; ++k) {
            const auto ext_or = oracle_app(p, k);
            CHECK(f1[k] == doctest::Approx(ext_or[k]).epsilon(1e-9));
        }
    }
}

TEST_CASE("bcjr: backward mirror on a palindromic problem") {
    // A problem whose observations read the same forwards and backwards, no
    // parity: the backward state marginals at the boundary mirror the
    // forward ones because the trellis step count matches.
    BcjrProblem p;
    p.r_sys = {0.3, -0.7, -0.7, 0.3};
    p.r_par.assign(4, 0.0);
    p.par_present.assign(4, 0);
    p.sigma2 = 0.8;
    const auto b = bcjr_backward(p);
    double sum = 0.0;
    for (double v : b[0]) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    // boundary rows are uniform by construction
    for (double v : b[4]) CHECK(v == doctest::Approx(1.0 / 16).epsilon(1e-12));
}

TEST_CASE("bcjr: punctured stage extrinsic ignores the parity observation") {
    RngStream rng(11);
    OracleProblem p = random_problem(rng, 6, 0.7, false);
    p.par_present.assign(6, 0); // everything punctured
    BcjrProblem q = to_bcjr(p);
    q.r_par.assign(6, 123.0); // value must be irrelevant
    const auto alpha = bcjr_forward(q);
    const auto beta = bcjr_backward(q);
    const auto f = bcjr_extrinsic(q, alpha, beta);
    for (double v : f) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("bcjr: invariant to a positive per-stage metric scaling") {
    RngStream rng(13);
    const OracleProblem base = random_problem(rng, 8, 0.5, true);
    BcjrProblem q = to_bcjr(base);
    BcjrProblem qs = q;
    qs.stage_scale = {3.0, 0.25, 1.0, 10.0, 0.01, 1.0, 5.0, 2.0};
    const auto a1 = bcjr_forward(q);
    const auto a2 = bcjr_forward(qs);
    for (int i = 0; i <= 8; ++i)
        for (int n = 0; n < 16; ++n) CHECK(a1[i][n] == doctest::Approx(a2[i][n]).epsilon(1e-12));
    const auto f1 = bcjr_extrinsic(q, a1, bcjr_backward(q));
    const auto f2 = bcjr_extrinsic(qs, a2, bcjr_backward(qs));
    for (int k = 0; k < 8; ++k) CHECK(f1[k] == doctest::Approx(f2[k]).epsilon(1e-12));
}

TEST_CASE("turbo_decode: single decoder-1 pass equals the terminated MAP oracle") {
    // 6 info bits + 4 tail bits, termination enforced in both paths.
    RngStream rng(21);
    std::vector<uint8_t> bits(6);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.bit());
    const Interleaver pi = make_interleaver(6, 7);
    const TurboCodeword cw = turbo_encode(bits, pi);
    const double sigma2 = 0.6;
    const double sd = std::sqrt(sigma2);

    OracleProblem p;
    p.sigma2 = sigma2;
    p.terminated = true;
    p.r_sys.resize(10);
    p.r_par.resize(10);
    p.par_present.resize(10);
    for (int i = 0; i < 6; ++i) {
        p.r_sys[i] = (1.0 - 2.0 * cw.sys[i]) + sd * rng.gauss();
        p.par_present[i] = static_cast<uint8_t>(i % 2);
        p.r_par[i] = (1.0 - 2.0 * cw.parity1[i]) + sd * rng.gauss();
    }
    for (int j = 0; j < 4; ++j) {
        p.r_sys[6 + j] = (1.0 - 2.0 * cw.tail_sys[j]) + sd * rng.gauss();
        p.par_present[6 + j] = 1;
        p.r_par[6 + j] = (1.0 - 2.0 * cw.tail_parity1[j]) + sd * rng.gauss();
    }

    const BcjrProblem q = to_bcjr(p);
    const auto alpha = bcjr_forward(q);
    const auto beta = bcjr_backward(q);
    const auto app = bcjr_app(q, bcjr_extrinsic(q, alpha, beta));

    // 2^10 inputs x 16 start states, paths ending at state 0 only
    const auto app_or = oracle_app(p);
    for (int k = 0; k < 6; ++k) CHECK(app[k] == doctest::Approx(app_or[k]).epsilon(1e-9));
}

TEST_CASE("turbo_decode: noiseless round trip is identity over 1e5 bits") {
    ModemConfig cfg;
    const int n_info = cfg.info_bits(); // 9996
    const Interleaver pi = make_interleaver(n_info, cfg.interleaver_seed);
    RngStream rng(31);
    int total = 0;
    for (int f = 0; f < 11; ++f) {
        std::vector<uint8_t> bits(n_info);
        for (auto& b : bits) b = static_cast<uint8_t>(rng.bit());
        const TurboCodeword cw = turbo_encode(bits, pi);
        SoftFrame frame;
        frame.sigma2 = SoftFrame::kSigma2Floor;
        frame.r_sys.resize(n_info);
        frame.r_par1.assign(n_info, 0.0);
        frame.r_par2.assign(n_info, 0.0);
        for (int k = 0; k < n_info; ++k) {
            frame.r_sys[k] = 1.0 - 2.0 * cw.sys[k];
            if (k % 2 == 1)
                frame.r_par1[k] = 1.0 - 2.0 * cw.parity1[k];
            else
                frame.r_par2[k] = 1.0 - 2.0 * cw.parity2[k];
        }
        frame.r_sys_tail.resize(4);
        frame.r_par1_tail.resize(4);
        for (int j = 0; j < 4; ++j) {
            frame.r_sys_tail[j] = 1.0 - 2.0 * cw.tail_sys[j];
            frame.r_par1_tail[j] = 1.0 - 2.0 * cw.tail_parity1[j];
        }
        const TurboDecodeResult dec = turbo_decode(frame, pi, 2);
        REQUIRE(dec.bits.size() == bits.size());
        CHECK(dec.bits == bits);
        total += n_info;
    }
    CHECK(total >= 100000);
}

TEST_CASE("turbo_decode: iteration count does not disturb a converged noiseless frame") {
    const int n_info = 64;
    const Interleaver pi = make_interleaver(n_info, 3);
    RngStream rng(41);
    std::vector<uint8_t> bits(n_info);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.bit());
    const TurboCodeword cw = turbo_encode(bits, pi);
    SoftFrame frame;
    frame.sigma2 = SoftFrame::kSigma2Floor;
    frame.r_sys.resize(n_info);
    frame.r_par1.assign(n_info, 0.0);
    frame.r_par2.assign(n_info, 0.0);
    for (int k = 0; k < n_info; ++k) {
        frame.r_sys[k] = 1.0 - 2.0 * cw.sys[k];
        if (k % 2 == 1)
            frame.r_par1[k] = 1.0 - 2.0 * cw.parity1[k];
        else
            frame.r_par2[k] = 1.0 - 2.0 * cw.parity2[k];
    }
    frame.r_sys_tail.resize(4);
    frame.r_par1_tail.resize(4);
    for (int j = 0; j < 4; ++j) {
        frame.r_sys_tail[j] = 1.0 - 2.0 * cw.tail_sys[j];
        frame.r_par1_tail[j] = 1.0 - 2.0 * cw.tail_parity1[j];
    }
    const auto d1 = turbo_decode(frame, pi, 1);
    const auto d3 = turbo_decode(frame, pi, 3);
    CHECK(d1.bits == bits);
    CHECK(d3.bits == bits);
    CHECK(d3.bits_per_iteration.size() == 3);
    for (const auto& snapshot : d3.bits_per_iteration) CHECK(snapshot == bits);
}
