#include "bns/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace bns {

namespace {

struct PlanKey {
    int n;
    long N;
    int sign;
    bool operator<(const PlanKey& o) const {
        if (n != o.n) return n < o.n;
        if (N != o.N) return N < o.N;
        return sign < o.sign;
    }
};

std::mutex g_plan_mutex;
std::map<PlanKey, fftw_plan> g_plans;

fftw_plan get_plan(int n, long N, int sign) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    PlanKey key{n, N, sign};
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;

    int dims[3] = {static_cast<int>(N), static_cast<int>(N), static_cast<int>(N)};
    long total = ipow(N, n);
    // Plan on a scratch buffer; FFTW_UNALIGNED lets the plan run on any array.
    std::vector<cplx> scratch(total);
    fftw_plan plan = fftw_plan_dft(
        n, dims, reinterpret_cast<fftw_complex*>(scratch.data()),
        reinterpret_cast<fftw_complex*>(scratch.data()),
        sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) fail_numeric("fftw plan creation failed");
    g_plans.emplace(key, plan);
    return plan;
}

}  // namespace

void fft_inplace(int n, long N, cplx* data, int sign) {
    require(n >= 1 && n <= 3, "fft: dimension must be 1, 2 or 3");
    require(is_pow2(N), "fft: N must be a power of two");
    if (N == 1) return;
    fftw_plan plan = get_plan(n, N, sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
}

}  // namespace bns
