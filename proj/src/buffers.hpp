#ifndef BURSTMODEM_BUFFERS_HPP
#define BURSTMODEM_BUFFERS_HPP

#include <complex>
#include <vector>

namespace bm {

using cplx = std::complex<double>;

// Which nominal/actual grid a sample sequence lives on. All periods are in
// units of the symbol duration T.
enum class SampleGrid { ts, ts_prime, ts1, ts1_prime };

struct RealBuffer {
    std::vector<double> samples;
    double period = 0.0;
    SampleGrid grid = SampleGrid::ts;
};

struct IqBuffer {
    std::vector<cplx> samples;
    double period = 0.0;
    SampleGrid grid = SampleGrid::ts;
};

} // namespace bm

#endif
