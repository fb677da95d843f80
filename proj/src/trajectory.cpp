#include "bns/trajectory.hpp"

#include <algorithm>

namespace bns {

int TimeRing::index(double t) {
    require(t > 0.0 && std::isfinite(t), "ring index needs t > 0");
    int j = static_cast<int>(std::ceil(-0.5 * std::log2(t) - 1e-12));
    while (t < lo(j)) ++j;
    while (t >= hi(j)) --j;
    return j;
}

std::vector<double> TimeRing::sample_times(int j_lo, int j_hi, int S) {
    require(j_lo <= j_hi, "ring range reversed");
    require(S >= 1, "need at least one sample per ring");
    std::vector<double> times;
    double rho = std::pow(4.0, 1.0 / S);
    for (int j = j_hi; j >= j_lo; --j) {
        double a = lo(j);
        for (int i = 0; i < S; ++i) times.push_back(a * std::pow(rho, i));
    }
    return times;
}

void Trajectory::push(double t, SpectralField F) {
    if (samples.empty() && !has_anchor) {
        n = F.n;
        N = F.N;
        c = F.c;
    }
    require(F.n == n && F.N == N && F.c == c, "trajectory: field shape mismatch");
    require(t > 0.0, "trajectory: sample times must be positive (use the anchor for t = 0)");
    require(samples.empty() || t > samples.back().t, "trajectory: times must increase");
    samples.push_back({t, std::move(F)});
}

void Trajectory::set_anchor(SpectralField F0) {
    if (samples.empty() && !has_anchor) {
        n = F0.n;
        N = F0.N;
        c = F0.c;
    }
    require(F0.n == n && F0.N == N && F0.c == c, "trajectory: anchor shape mismatch");
    anchor = std::move(F0);
    has_anchor = true;
}

void Trajectory::validate() const {
    require(!samples.empty(), "empty trajectory");
    for (size_t i = 0; i < samples.size(); ++i) {
        require(samples[i].t > 0.0, "trajectory: non-positive time");
        if (i) require(samples[i].t > samples[i - 1].t, "trajectory: times not increasing");
    }
    for (const auto& s : samples) {
        int j = TimeRing::index(s.t);
        require(s.t >= TimeRing::lo(j) && s.t < TimeRing::hi(j), "trajectory: ring bookkeeping broken");
    }
}

std::vector<int> Trajectory::rings() const {
    std::vector<int> out;
    for (const auto& s : samples) {
        int j = TimeRing::index(s.t);
        if (out.empty() || out.back() != j) {
            if (std::find(out.begin(), out.end(), j) == out.end()) out.push_back(j);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<size_t> Trajectory::ring_samples(int j_t) const {
    std::vector<size_t> idx;
    for (size_t i = 0; i < samples.size(); ++i)
        if (TimeRing::index(samples[i].t) == j_t) idx.push_back(i);
    return idx;
}

SpectralField interpolate_geometric(const SpectralField& F0, double t0,
                                    const SpectralField& F1, double t1, double t) {
    require(t0 < t1 && t >= t0 && t <= t1, "interpolate: time outside bracket");
    double theta = (t - t0) / (t1 - t0);
    SpectralField out = F1;
    for (size_t i = 0; i < out.data.size(); ++i) {
        cplx a = F0.data[i], b = F1.data[i];
        double ma = std::abs(a), mb = std::abs(b);
        if (ma < 1e-300 || mb < 1e-300) {
            out.data[i] = a + theta * (b - a);
            continue;
        }
        double mag = std::exp((1.0 - theta) * std::log(ma) + theta * std::log(mb));
        double dphi = std::arg(b * std::conj(a));
        out.data[i] = std::polar(mag, std::arg(a) + theta * dphi);
    }
    return out;
}

SpectralField Trajectory::interpolate(double t) const {
    require(!samples.empty(), "interpolate on empty trajectory");
    require(t > 0.0, "interpolate: t must be positive");
    require(t <= t_max() * (1.0 + 1e-12), "interpolate: t beyond trajectory coverage");
    if (t >= t_max()) return samples.back().F;

    // Binary search for the right bracket among stored samples.
    size_t hi = 0;
    {
        size_t lo = 0, up = samples.size() - 1;
        while (lo < up) {
            size_t mid = (lo + up) / 2;
            if (samples[mid].t < t) lo = mid + 1; else up = mid;
        }
        hi = lo;
    }
    if (samples[hi].t == t) return samples[hi].F;
    if (hi == 0) {
        require(has_anchor, "interpolate: t below first sample and no anchor");
        return interpolate_geometric(anchor, 0.0, samples[0].F, samples[0].t, t);
    }
    return interpolate_geometric(samples[hi - 1].F, samples[hi - 1].t, samples[hi].F,
                                 samples[hi].t, t);
}

double Trajectory::max_l2() const {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, s.F.l2());
    return m;
}

double Trajectory::max_divergence_rel() const {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, s.F.divergence_rel());
    return m;
}

}  // namespace bns
