#pragma once

#include "bns/flows.hpp"

namespace bns {

struct SolverConfig {
    int n = 2;
    int J = 6;                 ///< grid is N = 2^J per axis
    int ring_lo = 1;           ///< horizon [2^{-2 ring_hi}, 2^{2-2 ring_lo})
    int ring_hi = 4;
    int samples_per_ring = 4;  ///< stored trajectory samples per ring
    int quad_samples = 8;      ///< Duhamel quadrature nodes per ring
    double tol = 1e-10;        ///< stop when both successive-difference norms drop below
    int max_iter = 30;
    SpaceParams space;

    long N() const { return 1L << J; }
    void validate() const;
};

struct IterationRow {
    int tau;
    double micro_norm;   ///< microlocal norm of u^(tau)
    double l2_max;       ///< max over stored times of the grid L2 norm
    double diff_micro;   ///< ||u^(tau) - u^(tau-1)|| microlocal (0 at tau = 0)
    double diff_l2;      ///< same in max-L2
    double residual;     ///< mild-equation residual of u^(tau)
    double wall_ms;      ///< not part of deterministic output
};

struct IterationReport {
    std::vector<IterationRow> rows;
    bool converged = false;
    bool non_contraction = false;
    double contraction_ratio = 0.0;  ///< max ratio diff_{tau+1}/diff_tau observed
};

struct PicardResult {
    Trajectory u;
    IterationReport report;
};

/// Picard iteration u^{tau+1} = e^{t Delta} f - B(u^tau, u^tau) on the full
/// ring-sampled trajectory. Rejects non-divergence-free data; reports
/// non-contraction when the successive difference grows twice in a row.
PicardResult picard_solve(const SpectralField& f, const SolverConfig& cfg);

/// max over stored times of ||u(t) - e^{t Delta} f + B(u,u)(t)||_L2 / max(||f||, 1e-30).
double mild_residual(const Trajectory& u, const SpectralField& f, const QuadOptions& opt = {});

/// Classical pseudo-spectral RK4 time stepper for Eq. (1.1) with Leray
/// projection each stage; fills the same ring sample times. dt = 0 picks
/// 0.25 min(1/(4 pi^2 K^2), dx/umax); larger requested steps are rejected.
Trajectory rk4_reference(const SpectralField& f, const SolverConfig& cfg, double dt = 0.0);

/// Kinetic energy (1/2) sum |u_hat|^2.
double kinetic_energy(const SpectralField& F);

/// 2D Taylor-Green datum (sin 2pi x1 cos 2pi x2, -cos 2pi x1 sin 2pi x2).
SpectralField taylor_green_field(long N);

/// Exact Taylor-Green solution at time t.
SpectralField taylor_green_exact(long N, double t);

/// Mean-free divergence-free random field with spectrum inside |k_i| <= kmax;
/// the draw order is resolution-independent, so a seed denotes the same
/// function at every N that resolves kmax.
SpectralField random_divfree_field(int n, long N, std::uint64_t seed, long kmax,
                                   double amplitude = 1.0);

/// Mean-free random scalar field with the same embedding property.
SpectralField random_scalar_field(int n, long N, std::uint64_t seed, long kmax,
                                  double amplitude = 1.0);

struct ScanPoint {
    double eps;
    double ratio;
    bool converged;
};

struct SmallnessScan {
    double eps0 = 0.0;                ///< largest contracting amplitude found
    bool upper_bounded = false;       ///< true when a failing amplitude bracketed it
    std::vector<ScanPoint> curve;
};

/// Bisection over amplitude for the largest eps with contraction ratio < 1.
SmallnessScan smallness_scan(const SpectralField& direction, const SolverConfig& cfg,
                             double eps_hi = 4.0, int bisection_steps = 8);

struct ScaleCheckRow {
    double theta;
    double data_norm_base;   ///< critical Besov-Lorentz norm of f
    double data_norm_scaled; ///< same for f_theta, matching band ranges
    double data_deviation;   ///< relative deviation, boundary bands excluded
    double sol_norm_base;    ///< microlocal norm of the solution from f
    double sol_norm_scaled;  ///< microlocal norm of the rescaled solution
    double sol_deviation;
};

/// Critical-scaling family f_theta(x) = theta f(theta x) for dyadic theta;
/// checks data-norm invariance and reports solution-norm deviation.
std::vector<ScaleCheckRow> scale_family_check(const SpectralField& f,
                                              const std::vector<double>& thetas,
                                              const SolverConfig& cfg);

/// Spectral realization of f_theta(x) = theta f(theta x), theta = 2^i, i >= 0.
SpectralField dyadic_rescale(const SpectralField& f, int i);

}  // namespace bns
