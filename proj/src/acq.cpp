#include "acq.hpp"

#include "errors.hpp"

#include <cmath>

namespace bm {

namespace {

constexpr double kTwoPi = 6.28318530717958647692528676656;

void check_window(const IqBuffer& x, int span_needed, const char* who) {
    if (x.samples.empty()) throw ConfigError(std::string(who) + ": empty input");
    const int usable = static_cast<int>(x.samples.size()) - span_needed;
    if (usable < kDetectWindow)
        throw ConfigError(std::string(who) + ": window shorter than " +
                          std::to_string(kDetectWindow) + " candidates");
}

} // namespace

DiffCorrResult differential_correlate(const IqBuffer& x, const BetaSequence& beta,
                                      const ModemConfig& cfg) {
    const int mi = cfg.samples_per_symbol_mf();
    const int lb = static_cast<int>(beta.beta_i.size());
    check_window(x, (lb - 1) * mi, "differential_correlate");

    // Eq.-style sum: y1(n) = sum_i mu*(n+i*MI, i) mu(n+(i+1)*MI, i+1)
    std::vector<double> mag2(kDetectWindow);
    cplx y_at_peak(0.0, 0.0);
    int n_peak = 0;
    double best = -1.0;
    double avg = 0.0;
    for (int n = 0; n < kDetectWindow; ++n) {
        cplx acc(0.0, 0.0);
        cplx mu_prev = x.samples[n] * std::conj(beta.beta_i[0]);
        for (int i = 0; i + 1 < lb; ++i) {
            const cplx mu_next = x.samples[n + (i + 1) * mi] * std::conj(beta.beta_i[i + 1]);
            acc += std::conj(mu_prev) * mu_next;
            mu_prev = mu_next;
        }
        const double m2 = std::norm(acc);
        mag2[n] = m2;
        avg += m2;
        if (m2 > best) {
            best = m2;
            n_peak = n;
            y_at_peak = acc;
        }
    }
    avg /= kDetectWindow;

    DiffCorrResult out;
    out.n_peak = n_peak;
    out.omega_hat = std::arg(y_at_peak) / cfg.M;
    out.ratio = (avg > 0.0) ? best / avg : 0.0;
    return out;
}

MlResult ml_fine_frequency(const IqBuffer& x2, int n2, const BetaSequence& beta,
                           const ModemConfig& cfg) {
    const int mi = cfg.samples_per_symbol_mf();
    const int lb = static_cast<int>(beta.beta_i.size());
    if (n2 < 0 || n2 + (lb - 1) * mi >= static_cast<int>(x2.samples.size()))
        throw ConfigError("ml_fine_frequency: n2 out of range");
    if (cfg.L1 > lb) throw ConfigError("ml_fine_frequency: L1 exceeds the reference length");

    // Reference-stripped symbol-spaced samples.
    std::vector<cplx> v(lb);
    for (int k = 0; k < lb; ++k)
        v[k] = x2.samples[n2 + k * mi] * std::conj(beta.beta_i[k]);

    auto metric = [&](double w, int count) {
        cplx acc(0.0, 0.0);
        const double step = -w * cfg.M;
        for (int k = 0; k < count; ++k)
            acc += v[k] * cplx(std::cos(step * k), std::sin(step * k));
        return std::abs(acc);
    };

    MlResult out;
    const double step1 = 2.0 * cfg.half_width / cfg.B1;
    double best = -1.0;
    int best_i = 0;
    for (int i = 0; i <= cfg.B1; ++i) {
        const double w = -cfg.half_width + i * step1;
        const double m = metric(w, cfg.L1);
        if (m > best) {
            best = m;
            best_i = i;
        }
    }
    out.omega_step1 = -cfg.half_width + best_i * step1;
    if (best_i == 0 || best_i == cfg.B1) out.boundary = true;

    const double hw2 = 8.0 * step1;
    const double step2 = 2.0 * hw2 / cfg.B2;
    best = -1.0;
    int best_j = 0;
    for (int j = 0; j <= cfg.B2; ++j) {
        const double w = out.omega_step1 - hw2 + j * step2;
        const double m = metric(w, lb);
        if (m > best) {
            best = m;
            best_j = j;
        }
    }
    out.omegaf_hat = out.omega_step1 - hw2 + best_j * step2;
    if (best_j == 0 || best_j == cfg.B2) out.boundary = true;
    return out;
}

CorrFrameResult correlate_frame(const IqBuffer& x3, const BetaSequence& beta,
                                const ModemConfig& cfg) {
    const int mi = cfg.samples_per_symbol_mf();
    const int lb = static_cast<int>(beta.beta_i.size());
    check_window(x3, (lb - 1) * mi, "correlate_frame");

    std::vector<cplx> ref(lb);
    for (int k = 0; k < lb; ++k) ref[k] = std::conj(beta.beta_i[k]) / std::norm(beta.beta_i[k]);

    CorrFrameResult out;
    double best = -1.0;
    for (int n = 0; n < kDetectWindow; ++n) {
        cplx acc(0.0, 0.0);
        for (int k = 0; k < lb; ++k) acc += x3.samples[n + k * mi] * ref[k];
        const double m2 = std::norm(acc);
        if (m2 > best) {
            best = m2;
            out.n3 = n;
            out.y3_peak = acc;
        }
    }
    double th = std::arg(out.y3_peak);
    if (th < 0.0) th += kTwoPi;
    out.theta0_hat = th;
    return out;
}

double estimate_amplitude(const IqBuffer& x3, int n3, double theta0_hat,
                          const BetaSequence& beta, const ModemConfig& cfg) {
    const int mi = cfg.samples_per_symbol_mf();
    const int lb = static_cast<int>(beta.beta_i.size());
    cplx acc(0.0, 0.0);
    for (int k = 0; k < lb; ++k)
        acc += x3.samples[n3 + k * mi] * std::conj(beta.beta_i[k]) / std::norm(beta.beta_i[k]);
    return (acc * cplx(std::cos(theta0_hat), -std::sin(theta0_hat))).real() / lb;
}

double estimate_noise_variance(const IqBuffer& x3, int n3, double theta0_hat, double a_hat,
                               const BetaSequence& beta, const ModemConfig& cfg) {
    const int mi = cfg.samples_per_symbol_mf();
    const int lb = static_cast<int>(beta.beta_i.size());
    const cplx rot(std::cos(theta0_hat), -std::sin(theta0_hat));
    double acc = 0.0;
    for (int k = 0; k < lb; ++k) {
        const double di = (x3.samples[n3 + k * mi] * rot).real() * beta.preamble.si[k] - a_hat;
        const double dq =
            (x3.samples[n3 + k * mi + mi / 2] * rot).imag() * beta.preamble.sq[k] - a_hat;
        acc += di * di + dq * dq;
    }
    return acc / (2.0 * lb);
}

} // namespace bm
