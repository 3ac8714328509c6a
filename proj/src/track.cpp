#include "track.hpp"

#include "errors.hpp"

#include <cmath>

namespace bm {

namespace {
constexpr double kTwoPi = 6.28318530717958647692528676656;

double arg_2pi(cplx z) {
    double a = std::arg(z);
    if (a < 0.0) a += kTwoPi;
    return a;
}
} // namespace

double PhaseLoop::update(cplx z) {
    z_avg = rho_c * z_avg + (1.0 - rho_c) * z;
    return theta();
}

double PhaseLoop::theta() const { return arg_2pi(z_avg); }

void TimingArray::accumulate(const std::array<double, 5>& u) {
    for (int j = 0; j < 5; ++j) cells[j] = rho_t * cells[j] + (1.0 - rho_t) * u[j];
}

int TimingArray::pick_shift() const {
    int c = 0;
    double best = cells[2] + kShiftHysteresis * std::abs(cells[2]);
    if (cells[1] > best) {
        best = cells[1];
        c = -1;
    }
    if (cells[3] > best) c = 1;
    return c;
}

void TimingArray::shift(int c) {
    if (c == 1) {
        for (int j = 0; j < 4; ++j) cells[j] = cells[j + 1];
        cells[4] = 0.0;
    } else if (c == -1) {
        for (int j = 4; j > 0; --j) cells[j] = cells[j - 1];
        cells[0] = 0.0;
    }
}

DetectedFrame run_tracking(const IqBuffer& x3, const SyncReport& sync, const BetaSequence& beta,
                           const PulseBank& pulses, const ModemConfig& cfg) {
    const int mi = cfg.samples_per_symbol_mf();
    const int lisi = cfg.L_isi;
    const int lp = cfg.Lp;
    const int ld = cfg.Ld;
    const int n3 = sync.n3;
    const int len = static_cast<int>(x3.samples.size());
    const double inv_a = (sync.a_hat != 0.0) ? 1.0 / sync.a_hat : 1.0;

    DetectedFrame out;
    out.soft_i.reserve(ld);
    out.soft_q.reserve(ld);
    out.hard_i.reserve(ld);
    out.hard_q.reserve(ld);
    out.instant_trace.reserve(ld);
    out.theta_trace.reserve(ld);
    out.shift_trace.reserve(ld);

    // Known + decided symbols by absolute index; the data part fills in as
    // decisions are made.
    std::vector<int8_t> abs_i(lp + ld, 0), abs_q(lp + ld, 0);
    for (int k = 0; k < lp; ++k) {
        abs_i[k] = beta.preamble.si[k];
        abs_q[k] = beta.preamble.sq[k];
    }

    // Phase acquisition over the preamble (known beta), one theta out.
    PhaseLoop loop;
    loop.rho_c = cfg.rho_c;
    const int lb = static_cast<int>(beta.beta_i.size());
    for (int l = 0; l < lb; ++l) {
        const int idx = n3 + l * mi;
        if (idx >= len) {
            out.truncated = true;
            return out;
        }
        const cplx z = x3.samples[idx] * std::conj(beta.beta_i[l]) / std::norm(beta.beta_i[l]);
        loop.update(z);
    }

    // theta[i] = theta_hat((i - L_isi)T); index 0 is the preamble-end value.
    std::vector<double> theta(ld + 1, loop.theta());

    // Timing acquisition: averages only, no shifts, known symbols, acq phase.
    TimingArray array;
    array.rho_t = cfg.rho_t;
    const cplx rot0(std::cos(sync.theta0_hat), -std::sin(sync.theta0_hat));
    for (int l = 0; l < lp; ++l) {
        const int idx = n3 + l * mi;
        if (idx + 2 >= len || idx < 2) {
            out.truncated = true;
            return out;
        }
        std::array<double, 5> u;
        for (int j = -2; j <= 2; ++j)
            u[j + 2] = (x3.samples[idx + j] * rot0).real() * beta.preamble.si[l];
        array.accumulate(u);
    }

    // In-phase instants of the last few symbols feed the lagging phase loop.
    std::vector<int32_t> inst_of(ld, 0);

    int n_i = n3 + lp * mi;
    for (int i = 0; i < ld; ++i) {
        if (n_i < 2 || n_i + mi / 2 >= len || n_i + 2 >= len) {
            out.truncated = true;
            break;
        }
        inst_of[i] = n_i;
        const double th_u = theta[i];
        const cplx rot(std::cos(th_u), -std::sin(th_u));

        const double soft_i = (x3.samples[n_i] * rot).real();
        const double soft_q = (x3.samples[n_i + mi / 2] * rot).imag();
        const int8_t hard_i = soft_i >= 0.0 ? 1 : -1;
        const int8_t hard_q = soft_q >= 0.0 ? 1 : -1;
        abs_i[lp + i] = hard_i;
        abs_q[lp + i] = hard_q;
        out.soft_i.push_back(soft_i * inv_a);
        out.soft_q.push_back(soft_q * inv_a);
        out.hard_i.push_back(hard_i);
        out.hard_q.push_back(hard_q);

        std::array<double, 5> u;
        for (int j = -2; j <= 2; ++j)
            u[j + 2] = (x3.samples[n_i + j] * rot).real() * hard_i;
        array.accumulate(u);
        const int c = array.pick_shift();
        array.shift(c);
        if (c != 0) ++out.shift_count;

        out.instant_trace.push_back(n_i);
        out.theta_trace.push_back(th_u);
        out.shift_trace.push_back(static_cast<int8_t>(c));

        // Lagged phase update: needs quadrature decisions through index i.
        const int l = i - (lisi - 1);
        if (l >= -(lisi - 1)) {
            const int a = lp + l;
            const int idx = (l < 0) ? n3 + a * mi : inst_of[l];
            if (idx >= len) {
                out.truncated = true;
                break;
            }
            const double gamma = quadrature_isi(abs_q, a, pulses.h, lisi);
            const cplx beta_hat(static_cast<double>(abs_i[a]), gamma);
            const cplx z = x3.samples[idx] * std::conj(beta_hat) / std::norm(beta_hat);
            theta[i + 1] = loop.update(z);
        }

        n_i += mi + c;
    }
    return out;
}

} // namespace bm
