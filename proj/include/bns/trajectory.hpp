#pragma once

#include "bns/grid_field.hpp"

namespace bns {

/// Binary time ring [2^{-2 j_t}, 2^{2-2 j_t}) indexed by j_t.
struct TimeRing {
    static double lo(int j_t) { return pow2d(-2 * j_t); }
    static double hi(int j_t) { return pow2d(2 - 2 * j_t); }
    /// Ring containing t > 0.
    static int index(double t);
    /// Geometric sample times for rings j_t in [j_lo, j_hi], S per ring, ascending.
    static std::vector<double> sample_times(int j_lo, int j_hi, int S);
};

struct TimeSample {
    double t;
    SpectralField F;
};

/// A time-sampled family of spectral fields, organized by binary time rings.
/// An optional t = 0 anchor carries the initial datum so that values below
/// the first stored ring can be interpolated.
struct Trajectory {
    int n = 0;
    long N = 0;
    int c = 1;
    bool has_anchor = false;
    SpectralField anchor;               ///< value at t = 0 when has_anchor
    std::vector<TimeSample> samples;    ///< strictly increasing times > 0

    bool empty() const { return samples.empty(); }
    double t_min() const { return samples.front().t; }
    double t_max() const { return samples.back().t; }
    int ring_lo() const { return TimeRing::index(t_max()); }
    int ring_hi() const { return TimeRing::index(t_min()); }

    void push(double t, SpectralField F);
    void set_anchor(SpectralField F0);
    void validate() const;

    /// Rings that have at least one stored sample, ascending in j_t.
    std::vector<int> rings() const;
    /// Indices of samples inside ring j_t.
    std::vector<size_t> ring_samples(int j_t) const;

    /// Value at time t in (0, t_max]: stored samples are returned exactly;
    /// in between, spectral coefficients are interpolated geometrically in t
    /// (modulus geometric, phase linear), which is exact for heat decay.
    SpectralField interpolate(double t) const;

    double max_l2() const;
    double max_divergence_rel() const;
};

/// Pointwise geometric interpolation between two fields at t0 < t < t1.
SpectralField interpolate_geometric(const SpectralField& F0, double t0,
                                    const SpectralField& F1, double t1, double t);

}  // namespace bns
