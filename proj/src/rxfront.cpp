#include "rxfront.hpp"

#include "errors.hpp"

#include <cmath>

namespace bm {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

IqBuffer demodulate(const RealBuffer& r, double omega_lo, double theta_lo, size_t max_samples) {
    const size_t n_in = r.samples.size();
    const size_t n = (max_samples == 0) ? n_in : std::min(max_samples, n_in);
    IqBuffer out;
    out.samples.resize(n);
    out.period = r.period;
    out.grid = r.grid;
    const double w = kPi / 2.0 + omega_lo;
    for (size_t i = 0; i < n; ++i) {
        const double phase = w * static_cast<double>(i) + theta_lo;
        out.samples[i] = r.samples[i] * cplx(std::cos(phase), -std::sin(phase));
    }
    return out;
}

IqBuffer upsample_matched_filter(const IqBuffer& y, const std::vector<double>& mf_taps, int I) {
    if (I < 1) throw ConfigError("upsample_matched_filter: I must be >= 1");
    const int n_in = static_cast<int>(y.samples.size());
    const int n_mf = static_cast<int>(mf_taps.size());
    IqBuffer out;
    out.period = y.period / I;
    out.grid = (y.grid == SampleGrid::ts_prime) ? SampleGrid::ts1_prime : SampleGrid::ts1;
    if (n_in == 0) return out;
    const int n_out = (n_in - 1) * I + n_mf;
    out.samples.assign(n_out, cplx(0.0, 0.0));
    // out[n] = sum_k mf[n - k*I] * y[k]
    for (int n = 0; n < n_out; ++n) {
        const int k_min = std::max(0, (n - n_mf + 1 + I - 1) / I);
        const int k_max = std::min(n_in - 1, n / I);
        cplx acc(0.0, 0.0);
        for (int k = k_min; k <= k_max; ++k) acc += mf_taps[n - k * I] * y.samples[k];
        out.samples[n] = acc;
    }
    return out;
}

IqBuffer upsample_matched_filter_reference(const IqBuffer& y, const std::vector<double>& mf_taps,
                                           int I) {
    if (I < 1) throw ConfigError("upsample_matched_filter: I must be >= 1");
    const int n_in = static_cast<int>(y.samples.size());
    const int n_mf = static_cast<int>(mf_taps.size());
    IqBuffer out;
    out.period = y.period / I;
    out.grid = (y.grid == SampleGrid::ts_prime) ? SampleGrid::ts1_prime : SampleGrid::ts1;
    if (n_in == 0) return out;
    std::vector<cplx> up((n_in - 1) * I + 1, cplx(0.0, 0.0));
    for (int k = 0; k < n_in; ++k) up[k * I] = y.samples[k];
    const int n_out = static_cast<int>(up.size()) + n_mf - 1;
    out.samples.assign(n_out, cplx(0.0, 0.0));
    for (int n = 0; n < n_out; ++n) {
        cplx acc(0.0, 0.0);
        const int m_lo = std::max(0, n - static_cast<int>(up.size()) + 1);
        const int m_hi = std::min(n_mf - 1, n);
        for (int m = m_lo; m <= m_hi; ++m) acc += mf_taps[m] * up[n - m];
        out.samples[n] = acc;
    }
    return out;
}

} // namespace bm
