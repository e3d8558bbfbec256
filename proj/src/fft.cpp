#include "pcl/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

#include "pcl/errors.hpp"

namespace pcl::fft {

namespace {

std::mutex plan_mutex;  // fftw planner is not thread-safe

std::vector<cplx> run(const std::vector<cplx>& in, int sign) {
    const int n = static_cast<int>(in.size());
    if (n == 0) return {};
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * in.size()));
    if (!buf) throw CapacityError("fft: allocation failed");
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
    }
    std::memcpy(buf, in.data(), sizeof(fftw_complex) * in.size());
    fftw_execute(plan);
    std::vector<cplx> out(in.size());
    std::memcpy(static_cast<void*>(out.data()), buf, sizeof(fftw_complex) * in.size());
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    return out;
}

}  // namespace

std::vector<cplx> forward(const std::vector<cplx>& x) { return run(x, FFTW_FORWARD); }

std::vector<cplx> inverse(const std::vector<cplx>& X) {
    auto x = run(X, FFTW_BACKWARD);
    const double s = 1.0 / static_cast<double>(X.size());
    for (auto& v : x) v *= s;
    return x;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace pcl::fft
