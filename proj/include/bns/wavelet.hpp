#pragma once

#include "bns/grid_field.hpp"

namespace bns {

/// Transition profile for the Fourier window. Both satisfy
/// nu(x) + nu(1-x) = 1, which the window identities below require.
enum class Profile {
    SmoothExp,  ///< C-infinity bump e^{-1/x}/(e^{-1/x} + e^{-1/(1-x)})
    Poly,       ///< x^4 (35 - 84x + 70x^2 - 20x^3)
};

Profile profile_from_string(const std::string& name);
std::string profile_name(Profile p);

/// Window values at integer frequency kappa (xi = 2 pi kappa scaled by 2^-level).
double window_scaling(Profile p, int level, long kappa);        ///< phi0_hat(2 pi kappa / 2^level)
double window_wavelet_mod(Profile p, int band, long kappa);     ///< phi(2 pi kappa / 2^band)
cplx window_wavelet(Profile p, int band, long kappa);           ///< phi1_hat: e^{-i pi kappa/2^band} phi(...)

double phi0_hat(Profile p, double xi);
double phi_hat(Profile p, double xi);

/// Discrete Meyer system on the torus. Detail bands run over
/// j in [0, j_max] with j_max = J - 1; the top band closes the ladder so
/// that the partition of unity holds on the whole admissible spectrum
/// |k| <= floor(N/3). Bands j <= J - 2 are fully representable on the
/// N-grid; the top band's beyond-Nyquist tail never meets admissible data.
struct WaveletSystem {
    int n = 0;
    int J = 0;
    int j_max = 0;
    long N = 0;
    long k_max = 0;
    Profile profile = Profile::SmoothExp;

    // Per-axis window tables indexed by kappa + N/2, kappa in [-N/2, N/2].
    std::vector<std::vector<double>> w0;  ///< scaling windows, levels 0..J
    std::vector<std::vector<double>> w1;  ///< wavelet window moduli, bands 0..j_max

    double scaling(int level, long kappa) const;
    double wavelet_mod(int band, long kappa) const;
    cplx wavelet(int band, long kappa) const;  ///< includes the half-shift phase
};

/// Builds the window tables and self-checks the window identities
/// (values in [0, 1], plateau/support, phi^2(xi) + phi^2(2 pi - xi) = 1).
WaveletSystem build_system(int n, int J, Profile profile = Profile::SmoothExp);

/// Coefficients f^eps_{j,k} for eps in {0,1}^n \ {0}, j in [0, j_max],
/// k in {0..2^j-1}^n, plus the base-scale part f^0_{0,0} (the mean).
struct WaveletCoeffs {
    int n = 0;
    int J = 0;
    int j_max = 0;
    double scaling0 = 0.0;
    std::vector<std::vector<double>> detail;  ///< [j][(eps-1)*2^{nj} + flat(k)]

    WaveletCoeffs() = default;
    WaveletCoeffs(int n_, int J_, int j_max_);

    long band_size(int j) const { return ipow(1L << j, n); }
    long eps_count() const { return (1L << n) - 1; }
    double& d(int j, int eps, long kflat) { return detail[j][(eps - 1) * band_size(j) + kflat]; }
    double d(int j, int eps, long kflat) const { return detail[j][(eps - 1) * band_size(j) + kflat]; }
    double sumsq() const;  ///< includes the base-scale part
};

/// Exact inner products <f, phi^eps_{j,k}> computed spectrally.
/// Input must be admissible and scalar (c == 1).
WaveletCoeffs analyze(const SpectralField& F, const WaveletSystem& W);
WaveletCoeffs analyze(const GridField& f, const WaveletSystem& W);
std::vector<WaveletCoeffs> analyze_components(const SpectralField& F, const WaveletSystem& W);

/// f = sum f^eps_{j,k} phi^eps_{j,k} (admissible part).
SpectralField synthesize(const WaveletCoeffs& c, const WaveletSystem& W);

/// Dyadic index shift: band j moves to j + i with coefficients scaled by
/// 2^{i(1-n/2)} and translates embedded k -> k. This is the lattice
/// realization of f -> theta f(theta x), theta = 2^i; bands shifted past
/// j_max are dropped (callers exclude boundary bands when comparing).
WaveletCoeffs index_shift(const WaveletCoeffs& c, int i);

enum class BandProjection { P, Qeps, Q };

/// Littlewood-Paley projections: P_j (scaling level j, clamped to [0, J]),
/// Q_j^eps (one detail pattern), Q_j (all patterns). Scalar fields.
SpectralField project_band(const SpectralField& F, const WaveletSystem& W,
                           BandProjection kind, int j, int eps = 0);

/// Scaling coefficients f^0_{l,k} at an arbitrary level l in [0, J].
std::vector<double> scaling_coeffs(const SpectralField& F, const WaveletSystem& W, int level);

/// True torus inner product <phi^eps_{j,k}, phi^eps'_{j',k'}>, summed over
/// the full window support (beyond-Nyquist modes included analytically).
double wavelet_inner_product(const WaveletSystem& W, int eps, int j, const std::array<long, 3>& k,
                             int epsp, int jp, const std::array<long, 3>& kp);

enum class SupportRing {
    PLow,           ///< P_{j-2}u: |k_i| <= 2^j/6
    QBand,          ///< Q_j^eps: |k_i| <= (2/3)2^j (eps_i=0); 2^j/3 <= |k_i| <= (4/3)2^j (eps_i=1)
    Product,        ///< P_{j-2}u Q_j^eps v: |k_i| <= (5/6)2^j; 2^j/6 <= |k_i| <= (3/2)2^j
    CoupleProduct,  ///< Q_j u Q_j v: |k_i| <= (8/3)2^j
};

/// Energy sum |F(k)|^2 over modes strictly outside the stated ring.
double support_ring_energy(const SpectralField& F, int j, SupportRing kind, int eps = 0);

}  // namespace bns
