#pragma once

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bns/grid_field.hpp"
#include "bns/rng.hpp"

namespace bns::test {

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline GridField random_grid(int n, long N, std::uint64_t seed) {
    Rng rng(seed);
    GridField f(n, N, 1);
    for (double& v : f.data) v = rng.normal();
    return f;
}

/// Random field with admissible spectrum (content up to kmax).
inline SpectralField random_admissible(int n, long N, std::uint64_t seed, long kmax = 0) {
    if (kmax == 0) kmax = default_kmax(N);
    GridField g = random_grid(n, N, seed);
    SpectralField F = forward_transform(g);
    F.k_max = kmax;
    F.truncate_to_kmax();
    F.k_max = default_kmax(N);
    return F;
}

/// Brute-force spectral convolution truncated to k_max (the product oracle).
inline SpectralField convolution_oracle(const SpectralField& F, const SpectralField& G) {
    SpectralField out(F.n, F.N, 1);
    int n = F.n;
    long K = out.k_max;
    std::array<long, 3> k{0, 0, 0}, kp{0, 0, 0}, diff{0, 0, 0};
    std::function<void(int)> outer = [&](int d) {
        if (d == n) {
            cplx sum(0.0, 0.0);
            std::function<void(int)> inner = [&](int dd) {
                if (dd == n) {
                    bool ok = true;
                    for (int i = 0; i < n; ++i) {
                        diff[i] = k[i] - kp[i];
                        if (std::labs(diff[i]) > F.N / 2) ok = false;
                    }
                    if (ok) sum += F.mode(0, kp) * G.mode(0, diff);
                    return;
                }
                for (kp[dd] = -K; kp[dd] <= K; ++kp[dd]) inner(dd + 1);
            };
            inner(0);
            out.mode(0, k) = sum;
            return;
        }
        for (k[d] = -K; k[d] <= K; ++k[d]) outer(d + 1);
    };
    outer(0);
    return out;
}

}  // namespace bns::test
