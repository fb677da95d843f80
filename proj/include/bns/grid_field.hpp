#pragma once

#include <functional>

#include "bns/common.hpp"

namespace bns {

/// Real samples on the lattice (i_1,...,i_n)/N of the unit torus [0,1)^n,
/// row-major per component, components outermost.
struct GridField {
    int n = 0;   ///< spatial dimension (1, 2 or 3)
    long N = 0;  ///< samples per axis, power of two >= 16
    int c = 1;   ///< components (1 for scalars, n for velocity)
    std::vector<double> data;

    GridField() = default;
    GridField(int n_, long N_, int c_);

    long points() const { return ipow(N, n); }
    double& at(int comp, long flat) { return data[comp * points() + flat]; }
    double at(int comp, long flat) const { return data[comp * points() + flat]; }

    bool finite() const;
    double l2() const;  ///< sqrt(N^{-n} sum |f|^2) over all components
};

/// Complex coefficients u_hat(k) for integer frequencies k, |k_l| <= N/2,
/// stored in FFT index order (index i maps to k = i <= N/2 ? i : i - N).
/// Fields kept admissible have u_hat(k) = 0 whenever any |k_l| > k_max.
struct SpectralField {
    int n = 0;
    long N = 0;
    int c = 1;
    long k_max = 0;  ///< dealias bound, default floor(N/3)
    std::vector<cplx> data;

    SpectralField() = default;
    SpectralField(int n_, long N_, int c_);

    long points() const { return ipow(N, n); }
    cplx& at(int comp, long flat) { return data[comp * points() + flat]; }
    cplx at(int comp, long flat) const { return data[comp * points() + flat]; }

    /// FFT index -> signed frequency.
    long freq(long idx) const { return idx <= N / 2 ? idx : idx - N; }
    /// Signed frequency -> FFT index.
    long idx_of(long k) const { return k >= 0 ? k : k + N; }

    cplx& mode(int comp, const std::array<long, 3>& k);
    cplx mode(int comp, const std::array<long, 3>& k) const;

    double l2() const;  ///< sqrt(sum |u_hat|^2), equals the grid L2 norm
    bool admissible(double tol = 0.0) const;
    void truncate_to_kmax();

    /// max_k |sum_l 2 pi k_l u_hat_l(k)| / max_k |u_hat(k)|; requires c == n.
    double divergence_rel() const;

    /// Largest relative deviation from u_hat(-k) = conj(u_hat(k)).
    double hermitian_defect() const;
};

long default_kmax(long N);

// -- transforms -------------------------------------------------------------

/// Fourier coefficients with the normalization sum |u_hat|^2 = N^{-n} sum |f|^2.
SpectralField forward_transform(const GridField& f);

/// Inverse transform; rejects inputs whose Hermitian defect exceeds 1e-9.
GridField inverse_transform(const SpectralField& F);

// -- multipliers ------------------------------------------------------------

using Symbol = std::function<cplx(const std::array<long, 3>& k)>;

/// Pointwise multiplication by sigma(k); rejects non-finite symbol values
/// on the admissible spectrum.
SpectralField apply_multiplier(const SpectralField& F, const Symbol& sigma);

/// Riesz transform R_i: symbol -i (2 pi k_i)/|2 pi k|, zero at k = 0.
SpectralField riesz_transform(const SpectralField& F, int axis);

/// Leray projector delta_{l,l'} - k_l k_{l'}/|k|^2 (identity at k = 0);
/// output is divergence-free and the map is idempotent. Requires c == n.
SpectralField leray_project(const SpectralField& u);

/// Heat multiplier e^{-t |2 pi k|^2}.
SpectralField heat_multiplier(const SpectralField& F, double t);

// -- products ---------------------------------------------------------------

/// Pointwise product computed alias-free on a zero-padded 2N grid and
/// truncated to k_max. Inputs must share (n, N) and be admissible.
GridField dealiased_product(const GridField& f, const GridField& g);

/// Same, spectral in/out (single component each).
SpectralField dealiased_product_spec(const SpectralField& F, const SpectralField& G,
                                     int comp_f = 0, int comp_g = 0);

// -- arithmetic helpers -----------------------------------------------------

SpectralField zeros_like(const SpectralField& F);
void axpy(SpectralField& y, double a, const SpectralField& x);  ///< y += a x
SpectralField operator-(const SpectralField& a, const SpectralField& b);
double l2_dist(const SpectralField& a, const SpectralField& b);

/// Extract one component as a scalar spectral field (shares k_max).
SpectralField component(const SpectralField& F, int comp);

}  // namespace bns
