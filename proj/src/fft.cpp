#include "rcsw/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace rcsw::fft {
namespace {

// Plans are cached per shape and created with FFTW_UNALIGNED so that
// fftw_execute_dft may run on any buffer. FFTW_ESTIMATE keeps planning
// deterministic and cheap; throughput here is dominated by the transform
// sizes, not plan quality.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int n, int howmany, int stride, int dist, int sign) {
        const Key key{n, howmany, stride, dist, sign};
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        // A throwaway buffer fixes the plan's memory layout; execution uses
        // fftw_execute_dft with the caller's arrays.
        std::vector<std::complex<double>> scratch(
            static_cast<std::size_t>(n) * howmany);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_many_dft(1, &n, howmany, p, nullptr, stride,
                                            dist, p, nullptr, stride, dist, sign,
                                            FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    using Key = std::tuple<int, int, int, int, int>;
    std::mutex mutex_;
    std::map<Key, fftw_plan> plans_;
};

void execute(fftw_plan plan, std::complex<double>* data) {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, p, p);
}

}  // namespace

void forward_columns(Eigen::MatrixXcd& m) {
    const int rows = static_cast<int>(m.rows());
    const int cols = static_cast<int>(m.cols());
    if (rows == 0 || cols == 0) return;
    fftw_plan plan =
        PlanCache::instance().get(rows, cols, 1, rows, FFTW_FORWARD);
    execute(plan, m.data());
}

void backward_columns(Eigen::MatrixXcd& m) {
    const int rows = static_cast<int>(m.rows());
    const int cols = static_cast<int>(m.cols());
    if (rows == 0 || cols == 0) return;
    fftw_plan plan =
        PlanCache::instance().get(rows, cols, 1, rows, FFTW_BACKWARD);
    execute(plan, m.data());
}

void backward_rows(Eigen::MatrixXcd& m) {
    const int rows = static_cast<int>(m.rows());
    const int cols = static_cast<int>(m.cols());
    if (rows == 0 || cols == 0) return;
    fftw_plan plan =
        PlanCache::instance().get(cols, rows, rows, 1, FFTW_BACKWARD);
    execute(plan, m.data());
}

void backward(Eigen::VectorXcd& v) {
    const int n = static_cast<int>(v.size());
    if (n == 0) return;
    fftw_plan plan = PlanCache::instance().get(n, 1, 1, n, FFTW_BACKWARD);
    execute(plan, v.data());
}

void forward(Eigen::VectorXcd& v) {
    const int n = static_cast<int>(v.size());
    if (n == 0) return;
    fftw_plan plan = PlanCache::instance().get(n, 1, 1, n, FFTW_FORWARD);
    execute(plan, v.data());
}

void inverse(Eigen::VectorXcd& v) {
    const int n = static_cast<int>(v.size());
    if (n == 0) return;
    fftw_plan plan = PlanCache::instance().get(n, 1, 1, n, FFTW_BACKWARD);
    execute(plan, v.data());
    v /= static_cast<double>(n);
}

}  // namespace rcsw::fft
