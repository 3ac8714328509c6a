#ifndef BURSTMODEM_RNG_HPP
#define BURSTMODEM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace bm {

// Purpose tag for deriving independent substreams from one master seed.
enum class StreamPurpose : uint64_t {
    data = 1,
    noise = 2,
    alpha = 3,
    preamble = 4,
    postamble = 5,
    interleaver = 6,
};

// Deterministic seeded stream. Substreams are keyed on
// (master seed, frame index, purpose) so frame-level parallelism cannot
// change any sequence. Gaussian variates use an explicit Box-Muller
// transform; std::normal_distribution is not bit-reproducible across
// standard libraries.
class RngStream {
  public:
    explicit RngStream(uint64_t key) : eng_(key) {}

    static RngStream derive(uint64_t seed, uint64_t frame, StreamPurpose purpose) {
        uint64_t k = splitmix(seed ^ 0x9e3779b97f4a7c15ull);
        k = splitmix(k ^ frame);
        k = splitmix(k ^ static_cast<uint64_t>(purpose));
        return RngStream(k);
    }

    uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // One fair bit.
    int bit() { return static_cast<int>(eng_() >> 63); }

    // Standard normal via Box-Muller; caches the second variate.
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    static uint64_t splitmix(uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace bm

#endif
