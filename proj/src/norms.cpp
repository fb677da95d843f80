#include "bns/norms.hpp"

#include <algorithm>

namespace bns {

void SpaceParams::validate(int n, bool solver_preset) const {
    require(p > 1.0 && std::isfinite(p), "SpaceParams: p must lie in (1, inf)");
    require(q >= 1.0, "SpaceParams: q must lie in [1, inf]");
    require(r >= 1.0, "SpaceParams: r must lie in [1, inf]");
    require(m > 0.0, "SpaceParams: m must be positive");
    require(mprime >= 0.0, "SpaceParams: m' must be non-negative");
    if (critical && s) require(std::abs(*s - (n / p - 1.0)) < 1e-12, "SpaceParams: critical flag contradicts s");
    if (solver_preset) {
        require(m > 1.0, "solver preset needs m > 1");
        require(mprime < 0.5, "solver preset needs m' < 1/2");
        if (std::isinf(q)) require(mprime > 0.0, "solver preset with q = inf needs m' > 0");
    }
}

BandProfile band_profile(const WaveletCoeffs& c, int j) {
    require(j >= 0 && j <= c.j_max, "band_profile: band out of range");
    BandProfile b;
    b.n = c.n;
    b.j = j;
    long M = c.band_size(j);
    b.values.assign(M, 0.0);
    double scale = pow2d(0.5 * c.n * j);
    for (long k = 0; k < M; ++k) {
        double s = 0.0;
        for (int e = 1; e <= (1 << c.n) - 1; ++e) s += std::abs(c.d(j, e, k));
        b.values[k] = scale * s;
    }
    std::sort(b.values.begin(), b.values.end(), std::greater<double>());
    return b;
}

BandProfile band_profile(const std::vector<WaveletCoeffs>& comps, int j) {
    require(!comps.empty(), "band_profile: no components");
    BandProfile b;
    b.n = comps[0].n;
    b.j = j;
    long M = comps[0].band_size(j);
    b.values.assign(M, 0.0);
    double scale = pow2d(0.5 * b.n * j);
    for (long k = 0; k < M; ++k) {
        double s = 0.0;
        for (const auto& c : comps)
            for (int e = 1; e <= (1 << c.n) - 1; ++e) s += std::abs(c.d(j, e, k));
        b.values[k] = scale * s;
    }
    std::sort(b.values.begin(), b.values.end(), std::greater<double>());
    return b;
}

double weak_lp_sup(const std::vector<double>& sorted_desc, double atom_volume, double p) {
    double best = 0.0;
    for (size_t rank = 1; rank <= sorted_desc.size(); ++rank) {
        double v = sorted_desc[rank - 1];
        if (v <= 0.0) break;
        best = std::max(best, v * std::pow(static_cast<double>(rank) * atom_volume, 1.0 / p));
    }
    return best;
}

double weak_lorentz_norm(const BandProfile& b, double p, double r) {
    require(p > 0.0 && std::isfinite(p), "weak_lorentz_norm: bad p");
    if (b.values.empty()) return 0.0;
    double vol = b.cube_volume();
    if (std::isinf(r)) return weak_lp_sup(b.values, vol, p);

    // Dyadic-level sum of Lemma 2.2(ii) over the achieved value range:
    // sum_u 2^{ur} |{f_j > 2^u}|^{r/p}. Below the smallest positive value the
    // superlevel measure is constant, so the remaining levels form an exact
    // geometric series.
    double vmax = b.values.front();
    if (vmax <= 0.0) return 0.0;
    size_t positive = 0;
    double vmin = vmax;
    for (double v : b.values) {
        if (v > 0.0) {
            ++positive;
            vmin = v;
        }
    }
    int u_hi = static_cast<int>(std::floor(std::log2(vmax)));
    if (pow2d(u_hi) >= vmax) --u_hi;     // need |{f > 2^u}| > 0 at the top level
    int u_lo = static_cast<int>(std::floor(std::log2(vmin)));
    if (pow2d(u_lo) >= vmin) --u_lo;

    double sum = 0.0;
    size_t rank = 0;
    for (int u = u_hi; u >= u_lo; --u) {
        double lam = pow2d(u);
        while (rank < b.values.size() && b.values[rank] > lam) ++rank;
        sum += std::pow(2.0, static_cast<double>(u) * r) *
               std::pow(static_cast<double>(rank) * vol, r / p);
    }
    // Tail: for u < u_lo every positive value exceeds 2^u.
    double meas = std::pow(static_cast<double>(positive) * vol, r / p);
    sum += meas * std::pow(2.0, static_cast<double>(u_lo - 1) * r) / (1.0 - std::pow(2.0, -r));
    return std::pow(sum, 1.0 / r);
}

namespace {

double lq_combine(const std::vector<double>& terms, double q) {
    if (std::isinf(q)) {
        double m = 0.0;
        for (double t : terms) m = std::max(m, t);
        return m;
    }
    double s = 0.0;
    for (double t : terms) s += std::pow(t, q);
    return std::pow(s, 1.0 / q);
}

}  // namespace

double besov_norm(const WaveletCoeffs& c, const SpaceParams& P) {
    return besov_norm(std::vector<WaveletCoeffs>{c}, P);
}

double besov_norm(const std::vector<WaveletCoeffs>& comps, const SpaceParams& P) {
    require(!comps.empty(), "besov_norm: no components");
    int n = comps[0].n;
    P.validate(n);
    double s = P.smoothness(n);
    std::vector<double> terms;
    for (int j = 0; j <= comps[0].j_max; ++j) {
        double mass = 0.0;
        for (const auto& c : comps) {
            long M = c.band_size(j);
            for (int e = 1; e <= (1 << n) - 1; ++e)
                for (long k = 0; k < M; ++k) mass += std::pow(std::abs(c.d(j, e, k)), P.p);
        }
        terms.push_back(pow2d(j * (s + 0.5 * n - n / P.p)) * std::pow(mass, 1.0 / P.p));
    }
    return lq_combine(terms, P.q);
}

double besov_lorentz_band(const WaveletCoeffs& c, const SpaceParams& P, int j) {
    double s = P.smoothness(c.n);
    return pow2d(j * s) * weak_lorentz_norm(band_profile(c, j), P.p, P.r);
}

double besov_lorentz_norm(const WaveletCoeffs& c, const SpaceParams& P, int j_lo, int j_hi) {
    return besov_lorentz_norm(std::vector<WaveletCoeffs>{c}, P, j_lo, j_hi);
}

double besov_lorentz_norm(const std::vector<WaveletCoeffs>& comps, const SpaceParams& P,
                          int j_lo, int j_hi) {
    require(!comps.empty(), "besov_lorentz_norm: no components");
    int n = comps[0].n;
    P.validate(n);
    if (j_hi < 0) j_hi = comps[0].j_max;
    double s = P.smoothness(n);
    std::vector<double> terms;
    for (int j = j_lo; j <= j_hi; ++j)
        terms.push_back(pow2d(j * s) * weak_lorentz_norm(band_profile(comps, j), P.p, P.r));
    return lq_combine(terms, P.q);
}

double triebel_lizorkin_lorentz_norm(const WaveletCoeffs& c, const SpaceParams& P) {
    P.validate(c.n);
    require(std::isfinite(P.q) && std::isfinite(P.r) && P.q > 1.0 && P.r > 1.0,
            "triebel_lizorkin_lorentz_norm: p, q, r must lie in (1, inf)");
    double s = P.smoothness(c.n);

    // Square-function values g(x)^q = sum_j 2^{jsq} f_j(x)^q on the finest
    // dyadic cells; each cell inherits one cube value per band.
    int n = c.n;
    long Mfine = 1L << c.j_max;
    long cells = ipow(Mfine, n);
    std::vector<double> g(cells, 0.0);
    for (int j = 0; j <= c.j_max; ++j) {
        long M = 1L << j;
        double scale = pow2d(0.5 * n * j);
        double w = pow2d(j * s);
        for (LatticeIter it(n, Mfine); !it.done; it.next()) {
            std::array<long, 3> kc{0, 0, 0};
            for (int d = 0; d < n; ++d) kc[d] = it.idx[d] >> (c.j_max - j);
            double v = 0.0;
            for (int e = 1; e <= (1 << n) - 1; ++e)
                v += std::abs(c.d(j, e, flat_index(n, M, kc)));
            double fj = scale * v;
            g[flat_index(n, Mfine, it.idx)] += std::pow(w * fj, P.q);
        }
    }
    for (double& v : g) v = std::pow(v, 1.0 / P.q);
    std::sort(g.begin(), g.end(), std::greater<double>());

    BandProfile flat;
    flat.n = n;
    flat.j = c.j_max;
    flat.values = std::move(g);
    return weak_lorentz_norm(flat, P.p, P.r);
}

GridField hl_maximal(const GridField& f) {
    require(f.c == 1, "hl_maximal: scalar field expected");
    int n = f.n;
    long N = f.N;
    int J = ilog2(N);

    // Cube averages per dyadic level, built by repeated 2^n-child reduction.
    std::vector<std::vector<double>> avg(J + 1);
    avg[J].resize(f.points());
    for (long i = 0; i < f.points(); ++i) avg[J][i] = std::abs(f.data[i]);
    for (int l = J - 1; l >= 0; --l) {
        long M = 1L << l;
        avg[l].assign(ipow(M, n), 0.0);
        long Mc = 2 * M;
        for (LatticeIter it(n, Mc); !it.done; it.next()) {
            std::array<long, 3> par{0, 0, 0};
            for (int d = 0; d < n; ++d) par[d] = it.idx[d] >> 1;
            avg[l][flat_index(n, M, par)] += avg[l + 1][flat_index(n, Mc, it.idx)];
        }
        double inv = 1.0 / static_cast<double>(1 << n);
        for (double& v : avg[l]) v *= inv;
    }

    GridField out(f.n, f.N, 1);
    for (LatticeIter it(n, N); !it.done; it.next()) {
        double best = 0.0;
        for (int l = 0; l <= J; ++l) {
            std::array<long, 3> cube{0, 0, 0};
            for (int d = 0; d < n; ++d) cube[d] = it.idx[d] >> (J - l);
            best = std::max(best, avg[l][flat_index(n, 1L << l, cube)]);
        }
        out.data[flat_index(n, N, it.idx)] = best;
    }
    return out;
}

double weak_lp_grid(const GridField& f, double p) {
    require(f.c == 1, "weak_lp_grid: scalar field expected");
    std::vector<double> v(f.data.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = std::abs(f.data[i]);
    std::sort(v.begin(), v.end(), std::greater<double>());
    return weak_lp_sup(v, 1.0 / static_cast<double>(f.points()), p);
}

double cross_scale_sum(const WaveletCoeffs& c, int j, int jp,
                       const std::array<long, 3>& k, double N_decay) {
    require(N_decay > 2.0 * c.n + 1.0, "cross_scale_sum: N_decay must exceed 2n + 1");
    require(jp >= 0 && jp <= c.j_max, "cross_scale_sum: source band out of range");
    int n = c.n;
    long Mp = 1L << jp;
    long Mj = 1L << j;
    double amp = pow2d(0.5 * n * jp);

    double total = 0.0;
    for (LatticeIter it(n, Mp); !it.done; it.next()) {
        double coeff = 0.0;
        long kf = flat_index(n, Mp, it.idx);
        for (int e = 1; e <= (1 << n) - 1; ++e) coeff += std::abs(c.d(jp, e, kf));
        if (coeff == 0.0) continue;

        double dist2 = 0.0;
        if (j >= jp) {
            // |k' - 2^{j'-j} k| on the 2^{j'} lattice
            double ratio = static_cast<double>(Mp) / static_cast<double>(Mj);
            for (int d = 0; d < n; ++d) {
                double diff = static_cast<double>(it.idx[d]) - ratio * static_cast<double>(k[d]);
                diff -= static_cast<double>(Mp) * std::round(diff / static_cast<double>(Mp));
                dist2 += diff * diff;
            }
        } else {
            // |k - 2^{j-j'} k'| on the 2^{j} lattice
            double ratio = static_cast<double>(Mj) / static_cast<double>(Mp);
            for (int d = 0; d < n; ++d) {
                double diff = static_cast<double>(k[d]) - ratio * static_cast<double>(it.idx[d]);
                diff -= static_cast<double>(Mj) * std::round(diff / static_cast<double>(Mj));
                dist2 += diff * diff;
            }
        }
        total += amp * coeff * std::pow(1.0 + std::sqrt(dist2), -N_decay);
    }
    return total;
}

MicrolocalReport microlocal_norm_report(const Trajectory& T, const WaveletSystem& W,
                                        const SpaceParams& P) {
    T.validate();
    P.validate(W.n);
    require(T.n == W.n && T.N == W.N, "microlocal_norm: trajectory does not match the system");

    int n = W.n;
    double s_crit = static_cast<double>(n) / P.p - 1.0;

    // Per-sample band profiles (unsorted cube values, components eps-summed).
    struct SampleProfiles {
        int ring;
        std::vector<std::vector<double>> cube;  // [j][kflat]
    };
    std::vector<SampleProfiles> profs(T.samples.size());
    for (size_t i = 0; i < T.samples.size(); ++i) {
        profs[i].ring = TimeRing::index(T.samples[i].t);
        profs[i].cube.resize(W.j_max + 1);
        auto comps = analyze_components(T.samples[i].F, W);
        for (int j = 0; j <= W.j_max; ++j) {
            long M = comps[0].band_size(j);
            profs[i].cube[j].assign(M, 0.0);
            double scale = pow2d(0.5 * n * j);
            for (long k = 0; k < M; ++k) {
                double v = 0.0;
                for (const auto& c : comps)
                    for (int e = 1; e <= (1 << n) - 1; ++e) v += std::abs(c.d(j, e, k));
                profs[i].cube[j][k] = scale * v;
            }
        }
    }

    MicrolocalReport rep;
    std::vector<int> rings;
    for (const auto& p : profs)
        if (std::find(rings.begin(), rings.end(), p.ring) == rings.end()) rings.push_back(p.ring);
    std::sort(rings.begin(), rings.end());
    require(!rings.empty(), "microlocal_norm: trajectory covers no ring");

    double overall = 0.0;
    double global_sup_hi = 0.0, global_sup_lo = 0.0;  // the q = inf branches
    for (int j_t : rings) {
        double sum_hi = 0.0, sum_lo = 0.0;  // j >= j_t and j < j_t branches
        double sup_hi = 0.0, sup_lo = 0.0;
        for (int j = 0; j <= W.j_max; ++j) {
            // f_{j,j_t}: per-cube sup over the ring's time samples.
            long M = ipow(1L << j, n);
            std::vector<double> fjt(M, 0.0);
            for (const auto& p : profs) {
                if (p.ring != j_t) continue;
                for (long k = 0; k < M; ++k) fjt[k] = std::max(fjt[k], p.cube[j][k]);
            }
            std::sort(fjt.begin(), fjt.end(), std::greater<double>());
            double weak = weak_lp_sup(fjt, pow2d(-n * j), P.p);
            double expo = (j >= j_t) ? P.m : P.mprime;
            double weight = pow2d(2.0 * (j - j_t) * expo) * pow2d(j * s_crit);
            double a = weight * weak;
            rep.terms.push_back({j, j_t, weak, weight, a});
            if (j >= j_t) {
                sum_hi += std::isinf(P.q) ? 0.0 : std::pow(a, P.q);
                sup_hi = std::max(sup_hi, a);
            } else {
                sum_lo += std::isinf(P.q) ? 0.0 : std::pow(a, P.q);
                sup_lo = std::max(sup_lo, a);
            }
        }
        double ring_value = std::isinf(P.q) ? (sup_hi + sup_lo)
                                            : std::pow(sum_hi + sum_lo, 1.0 / P.q);
        rep.per_ring.push_back({j_t, ring_value});
        global_sup_hi = std::max(global_sup_hi, sup_hi);
        global_sup_lo = std::max(global_sup_lo, sup_lo);
        overall = std::max(overall, ring_value);
    }
    // q = inf adds the two global sups, q < inf takes the sup of ring sums.
    rep.norm = std::isinf(P.q) ? (global_sup_hi + global_sup_lo) : overall;
    return rep;
}

double microlocal_norm(const Trajectory& T, const WaveletSystem& W, const SpaceParams& P) {
    return microlocal_norm_report(T, W, P).norm;
}

std::vector<DecayRow> decay_profile(const Trajectory& T, const WaveletSystem& W,
                                    const SpaceParams& P) {
    T.validate();
    int n = W.n;
    std::vector<DecayRow> rows;
    for (const auto& smp : T.samples) {
        int j_t = TimeRing::index(smp.t);
        std::vector<DecayRow> here(W.j_max + 1);
        for (int j = 0; j <= W.j_max; ++j) here[j] = {j, j_t, smp.t, 0.0, 0.0, 0.0};
        for (int comp = 0; comp < smp.F.c; ++comp) {
            SpectralField Fc = component(smp.F, comp);
            WaveletCoeffs c = analyze(Fc, W);
            for (int j = 0; j <= W.j_max; ++j) {
                double raw = 0.0;
                long M = c.band_size(j);
                for (int e = 1; e <= (1 << n) - 1; ++e)
                    for (long k = 0; k < M; ++k) raw = std::max(raw, std::abs(c.d(j, e, k)));
                double t22j = smp.t * pow2d(2 * j);
                double expo = t22j >= 1.0 ? P.m : P.mprime;
                here[j].detail_raw = std::max(here[j].detail_raw, raw);
                here[j].detail_weighted = std::max(
                    here[j].detail_weighted,
                    std::pow(t22j, expo) * pow2d((0.5 * n - 1.0) * j) * raw);

                auto sc = scaling_coeffs(Fc, W, j);
                double ssup = 0.0;
                for (double v : sc) ssup = std::max(ssup, std::abs(v));
                here[j].scaling_sup = std::max(here[j].scaling_sup, pow2d(0.5 * n * j) * ssup);
            }
        }
        rows.insert(rows.end(), here.begin(), here.end());
    }
    return rows;
}

}  // namespace bns
