// FFTW-backed transforms. Plans are created with FFTW_ESTIMATE so the chosen
// algorithm depends only on the transform size, keeping runs deterministic.
// Each thread owns its plans and staging buffers; plan creation itself is
// serialized (FFTW planner is not thread-safe).

#include "solab/fourier.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace solab {

namespace {

std::mutex planner_mutex;

struct PlanEntry {
    fftw_complex* buf = nullptr;
    fftw_plan plan = nullptr;
    std::size_t n = 0;

    PlanEntry(const Grid& g, int sign) {
        n = g.size();
        buf = fftw_alloc_complex(n);
        int shape[kMaxDim];
        for (int d = 0; d < g.dim; ++d) shape[d] = g.points;
        std::lock_guard<std::mutex> lock(planner_mutex);
        plan = fftw_plan_dft(g.dim, shape, buf, buf, sign, FFTW_ESTIMATE);
    }
    ~PlanEntry() {
        if (plan) {
            std::lock_guard<std::mutex> lock(planner_mutex);
            fftw_destroy_plan(plan);
        }
        if (buf) fftw_free(buf);
    }
    PlanEntry(const PlanEntry&) = delete;
    PlanEntry& operator=(const PlanEntry&) = delete;
};

using PlanKey = std::pair<std::pair<int, int>, int>;  // ((dim, points), sign)

PlanEntry& plan_for(const Grid& g, int sign) {
    thread_local std::map<PlanKey, std::unique_ptr<PlanEntry>> cache;
    PlanKey key{{g.dim, g.points}, sign};
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<PlanEntry>(g, sign)).first;
    return *it->second;
}

void execute(const Grid& g, std::vector<std::complex<double>>& data, int sign) {
    // std::complex<double> is layout-compatible with double[2] by the standard
    PlanEntry& e = plan_for(g, sign);
    std::memcpy(static_cast<void*>(e.buf), static_cast<const void*>(data.data()),
                e.n * sizeof(fftw_complex));
    fftw_execute(e.plan);
    std::memcpy(static_cast<void*>(data.data()), static_cast<const void*>(e.buf),
                e.n * sizeof(fftw_complex));
}

}  // namespace

void fft_forward(const Grid& g, std::vector<std::complex<double>>& data) {
    execute(g, data, FFTW_FORWARD);
}

void fft_backward(const Grid& g, std::vector<std::complex<double>>& data) {
    execute(g, data, FFTW_BACKWARD);
}

}  // namespace solab
