#include "reference.hpp"

#include "errors.hpp"
#include "rng.hpp"

namespace bm {

namespace {
KnownSymbols random_qpsk(const ModemConfig& cfg, StreamPurpose purpose, int count) {
    // Frame index 0: the sequence is fixed per configuration.
    RngStream rng = RngStream::derive(cfg.seed, 0, purpose);
    KnownSymbols out;
    out.si.resize(count);
    out.sq.resize(count);
    for (int k = 0; k < count; ++k) {
        out.si[k] = static_cast<int8_t>(1 - 2 * rng.bit());
        out.sq[k] = static_cast<int8_t>(1 - 2 * rng.bit());
    }
    return out;
}
} // namespace

KnownSymbols make_preamble(const ModemConfig& cfg) {
    return random_qpsk(cfg, StreamPurpose::preamble, cfg.Lp);
}

KnownSymbols make_postamble(const ModemConfig& cfg) {
    return random_qpsk(cfg, StreamPurpose::postamble, cfg.Lo);
}

double quadrature_isi(const std::vector<int8_t>& sq, int k, const std::vector<double>& h, int L_isi) {
    double g = 0.0;
    for (int j = 0; j < 2 * L_isi; ++j) {
        const int idx = k + L_isi - 1 - j;
        if (idx >= 0 && idx < static_cast<int>(sq.size())) g += sq[idx] * h[j];
    }
    return g;
}

double inphase_isi(const std::vector<int8_t>& si, int k, const std::vector<double>& h, int L_isi) {
    double g = 0.0;
    for (int j = 0; j < 2 * L_isi; ++j) {
        const int idx = k + L_isi - j;
        if (idx >= 0 && idx < static_cast<int>(si.size())) g += si[idx] * h[j];
    }
    return g;
}

BetaSequence build_beta(const KnownSymbols& preamble, const std::vector<double>& h, int L_isi) {
    const int lp = static_cast<int>(preamble.si.size());
    if (lp < 2 * L_isi + 1) throw ConfigError("build_beta: preamble shorter than the ISI window");
    if (static_cast<int>(h.size()) != 2 * L_isi) throw ConfigError("build_beta: h must have 2*L_isi taps");
    BetaSequence b;
    b.L_isi = L_isi;
    b.preamble = preamble;
    const int n = lp - L_isi + 1;
    b.beta_i.resize(n);
    b.beta_q.resize(n);
    for (int k = 0; k < n; ++k) {
        b.beta_i[k] = cplx(preamble.si[k], quadrature_isi(preamble.sq, k, h, L_isi));
        b.beta_q[k] = cplx(inphase_isi(preamble.si, k, h, L_isi), preamble.sq[k]);
    }
    return b;
}

} // namespace bm
