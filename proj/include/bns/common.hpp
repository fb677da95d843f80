#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bns {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Thrown on contract violations (bad arguments, malformed files, shape mismatches).
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown on numerical failures (NaN, non-contraction, lost symmetry).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[noreturn]] inline void fail_invalid(const std::string& msg) { throw invalid_input(msg); }
[[noreturn]] inline void fail_numeric(const std::string& msg) { throw numeric_error(msg); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail_invalid(msg);
}

inline bool is_pow2(long v) { return v > 0 && (v & (v - 1)) == 0; }

inline int ilog2(long v) {
    int j = 0;
    while ((1L << j) < v) ++j;
    if ((1L << j) != v) fail_invalid("ilog2: not a power of two");
    return j;
}

/// Integer power 2^j as double (j may be negative).
inline double pow2d(int j) { return std::ldexp(1.0, j); }

/// 2^{j*a} for real exponent weight a.
inline double pow2d(double x) { return std::exp2(x); }

template <typename T>
inline T sq(T v) { return v * v; }

/// Multi-index helpers for row-major N^n lattices.
struct LatticeIter {
    int n;
    long N;
    std::array<long, 3> idx{0, 0, 0};
    bool done = false;

    LatticeIter(int n_, long N_) : n(n_), N(N_) { done = (N <= 0); }
    void next() {
        for (int d = n - 1; d >= 0; --d) {
            if (++idx[d] < N) return;
            idx[d] = 0;
        }
        done = true;
    }
};

inline long flat_index(int n, long N, const std::array<long, 3>& idx) {
    long f = 0;
    for (int d = 0; d < n; ++d) f = f * N + idx[d];
    return f;
}

inline long ipow(long base, int exp) {
    long r = 1;
    while (exp-- > 0) r *= base;
    return r;
}

}  // namespace bns
