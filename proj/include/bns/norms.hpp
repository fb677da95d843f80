#pragma once

#include <limits>
#include <optional>

#include "bns/trajectory.hpp"
#include "bns/wavelet.hpp"

namespace bns {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Exponent tuple (p, q, r, s, m, m') governing every norm. q and r may be
/// infinity. An unset s resolves to the critical value n/p - 1.
struct SpaceParams {
    double p = 2.0;
    double q = 2.0;
    double r = kInf;
    std::optional<double> s;
    double m = 1.25;
    double mprime = 0.25;
    bool critical = false;  ///< forces s = n/p - 1

    double smoothness(int n) const {
        if (critical || !s) return static_cast<double>(n) / p - 1.0;
        return *s;
    }
    void validate(int n, bool solver_preset = false) const;
};

/// Cube values a_{j,k} = 2^{nj/2} sum_eps |f^eps_{j,k}| on cubes of volume
/// 2^{-nj}, sorted descending. Piecewise-constant representation of f_j.
struct BandProfile {
    int n = 0;
    int j = 0;
    std::vector<double> values;  ///< sorted descending, size 2^{nj}

    double cube_volume() const { return pow2d(-n * j); }
};

BandProfile band_profile(const WaveletCoeffs& c, int j);
/// Vector fields: components enter the eps-sum alongside the patterns.
BandProfile band_profile(const std::vector<WaveletCoeffs>& comps, int j);

/// Weak-Lorentz quasinorm of a band profile.
/// r = inf: exact sup_lambda lambda |{f_j > lambda}|^{1/p} by order statistics.
/// r < inf: dyadic-level sum over achieved values with the exact geometric
/// tail below the smallest positive value, returned to the power 1/r.
double weak_lorentz_norm(const BandProfile& b, double p, double r);

/// Exact weak-L^p sup over a sorted-descending value multiset with uniform
/// atom volume (shared by band profiles and grid samples).
double weak_lp_sup(const std::vector<double>& sorted_desc, double atom_volume, double p);

/// Besov norm from wavelet coefficients, Lemma-2.2(i) form
/// (sum_j 2^{jq(s+n/2-n/p)} (sum_{eps,k} |f|^p)^{q/p})^{1/q}.
double besov_norm(const WaveletCoeffs& c, const SpaceParams& P);
double besov_norm(const std::vector<WaveletCoeffs>& comps, const SpaceParams& P);

/// Besov-Lorentz norm: l^q over j of 2^{js} weak_lorentz_norm(band j, p, r).
/// Optional band range restriction [j_lo, j_hi] for boundary-band exclusion.
double besov_lorentz_norm(const WaveletCoeffs& c, const SpaceParams& P,
                          int j_lo = 0, int j_hi = -1);
double besov_lorentz_norm(const std::vector<WaveletCoeffs>& comps, const SpaceParams& P,
                          int j_lo = 0, int j_hi = -1);
/// Single-band contribution 2^{js} weak_lorentz_norm(band j).
double besov_lorentz_band(const WaveletCoeffs& c, const SpaceParams& P, int j);

/// Triebel-Lizorkin-Lorentz norm, dyadic-level evaluation of Lemma 2.2(iii)
/// on the piecewise-constant square function, to the power 1/r.
double triebel_lizorkin_lorentz_norm(const WaveletCoeffs& c, const SpaceParams& P);

/// Dyadic Hardy-Littlewood maximal function: per sample, the largest average
/// of |f| over the dyadic cubes (side 2^-l, l = 0..J) containing it.
GridField hl_maximal(const GridField& f);

/// sup_lambda lambda |{|f| > lambda}|^{1/p} of a scalar grid field.
double weak_lp_grid(const GridField& f, double p);

/// Lemma 2.6 cross-scale sum g^k_{j,j'} with decay exponent N_decay;
/// translate distances are periodized on the band lattice.
double cross_scale_sum(const WaveletCoeffs& c, int j, int jp,
                       const std::array<long, 3>& k, double N_decay);

/// One A-term of Definition 3.2 and its ingredients, for reports.
struct MicrolocalTerm {
    int j;
    int j_t;
    double weak;    ///< weak-L^p sup of f_{j,j_t}
    double weight;  ///< 2^{2(j-j_t)m or m'} 2^{j(n/p-1)}
    double a;       ///< weight * weak
};

struct MicrolocalReport {
    double norm = 0.0;
    std::vector<MicrolocalTerm> terms;
    std::vector<std::pair<int, double>> per_ring;  ///< (j_t, combined value)
};

/// Microlocal maximum norm of Definition 3.2 over the trajectory's sampled
/// rings: per ring j_t build f_{j,j_t} as the per-cube max over ring samples,
/// weight the exact weak sup, combine with l^q over j (sup + sup for q = inf)
/// and sup over j_t; returns the 1/q-th root for q < inf.
MicrolocalReport microlocal_norm_report(const Trajectory& T, const WaveletSystem& W,
                                        const SpaceParams& P);
double microlocal_norm(const Trajectory& T, const WaveletSystem& W, const SpaceParams& P);

/// One row of the decay table: the weighted detail sup of the B_{m,m'}
/// membership test and the scaling-coefficient sup of the trace bound.
struct DecayRow {
    int j;
    int j_t;
    double t;
    double detail_weighted;  ///< sup_{eps,k} (t 2^{2j})^{m or m'} 2^{(n/2-1)j} |f^eps_{j,k}(t)|
    double detail_raw;       ///< sup_{eps,k} |f^eps_{j,k}(t)|
    double scaling_sup;      ///< sup_k 2^{nj/2} |f^0_{j,k}(t)|
};

std::vector<DecayRow> decay_profile(const Trajectory& T, const WaveletSystem& W,
                                    const SpaceParams& P);

}  // namespace bns
