#pragma once

#include "bns/norms.hpp"
#include "bns/trajectory.hpp"
#include "bns/wavelet.hpp"

namespace bns {

/// e^{t Delta} f at the given times (t = 0 becomes the anchor).
Trajectory heat_flow(const SpectralField& f, const std::vector<double>& times);

/// Duhamel kernels: A_l = e^{(t-s)Delta} d_l and
/// A_{l,l',l''} = e^{(t-s)Delta} d_l d_l' d_l'' (-Delta)^{-1} (zero at k = 0).
enum class DuhamelKind { Grad, TripleRiesz };

SpectralField duhamel_apply(const SpectralField& g, double t, double s, DuhamelKind kind,
                            const std::array<int, 3>& axes);

/// Quadrature rules for the ring-structured Duhamel integrals.
/// ExpFit approximates the integrand geometrically per segment and
/// integrates the heat factor exactly (exact for heat-type integrands);
/// Trapezoid is the literal composite trapezoid on the sampled values.
enum class QuadRule { ExpFit, Trapezoid };

struct QuadOptions {
    int samples_per_ring = 8;
    int virtual_rings = 8;  ///< binary subdivisions of the head [0, ring_lo]
    QuadRule rule = QuadRule::ExpFit;
};

/// Quadrature nodes covering (0, t] by binary rings (geometric nodes per
/// ring, rings below coverage subdivided, plus the s = 0 head node).
std::vector<double> duhamel_nodes(double t, const QuadOptions& opt);

/// integral_0^t w(s) e^{-(t-s) a} ds for sampled scalar values w(s_i);
/// a >= 0. Nodes must be ascending with nodes.front() == 0.
double ring_quadrature_scalar(const std::vector<double>& nodes,
                              const std::vector<double>& values, double t, double a,
                              QuadRule rule);

/// integral_0^t G(s) e^{-(t-s)|2 pi k|^2} ds per mode, G sampled at the nodes.
SpectralField duhamel_integrate(const std::vector<double>& nodes,
                                const std::vector<SpectralField>& values, double t,
                                QuadRule rule);

/// Spec-level ring quadrature: integral_0^t of the trajectory's field values
/// (no heat weight), sampled per ring via trajectory interpolation.
SpectralField ring_quadrature(const Trajectory& integrand, double t, const QuadOptions& opt);

// -- Bony decomposition ------------------------------------------------------

/// The four parts of Eq. (decompose):
///   couple        sum_j Q_j u Q_j v,
///   near_diagonal sum_{0<|j-j'|<=2} Q_j u Q_{j'} v,
///   low_high      sum_j P_{j-2} u Q_j v   (carries the mean x mean product),
///   high_low      sum_j Q_j u P_{j-2} v.
/// The parts sum to dealiased_product(u, v).
struct BonyParts {
    GridField couple;
    GridField near_diagonal;
    GridField low_high;
    GridField high_low;
};

BonyParts bony_decompose(const GridField& u, const GridField& v, const WaveletSystem& W);

/// Paraproduct part sum_j P_{j-2}u Q_j v of a product, spectral, scalar.
SpectralField paraproduct_part(const SpectralField& u, const SpectralField& v,
                               const WaveletSystem& W, bool include_mean_mean);
/// Couple part sum_j Q_j u Q_j v.
SpectralField couple_part(const SpectralField& u, const SpectralField& v,
                          const WaveletSystem& W);

// -- flows -------------------------------------------------------------------

/// P_l(u,v) or P_{l,l',l''}(u,v): Duhamel integral of the paraproduct part
/// of two scalar trajectories. axes[0] = l (1-based); axes[1..2] used by
/// TripleRiesz.
SpectralField paraproduct_flow(const Trajectory& u, const Trajectory& v, double t,
                               DuhamelKind kind, const std::array<int, 3>& axes,
                               const WaveletSystem& W, const QuadOptions& opt = {});

/// C_l(u,v) or C_{l,l',l''}(u,v): same with the couple part sum_j Q_j u Q_j v.
SpectralField couple_flow(const Trajectory& u, const Trajectory& v, double t,
                          DuhamelKind kind, const std::array<int, 3>& axes,
                          const WaveletSystem& W, const QuadOptions& opt = {});

/// B(u,v)(t) = integral_0^t e^{(t-s)Delta} P nabla.(u tensor v) ds for vector
/// trajectories (c == n); output is divergence-free.
SpectralField bilinear_B(const Trajectory& u, const Trajectory& v, double t,
                         const QuadOptions& opt = {});

/// B(u,v) evaluated at many target times, sharing integrand evaluations at
/// common quadrature nodes (the Picard inner loop).
std::vector<SpectralField> bilinear_B_at_times(const Trajectory& u, const Trajectory& v,
                                               const std::vector<double>& times,
                                               const QuadOptions& opt = {});

/// Scalar Duhamel flow of a plain product: integral_0^t A_kind(u v) ds.
SpectralField product_flow(const Trajectory& u, const Trajectory& v, double t,
                           DuhamelKind kind, const std::array<int, 3>& axes,
                           const QuadOptions& opt = {});

// -- Lemma 3.1 decay check -----------------------------------------------------

/// Fit of |f^eps_{j,k}(t)| <= C e^{-c_tilde t 2^{2j}} (neighbor sum) for
/// t 2^{2j} >= 1, and the undamped bound below. Produced from a heat-flow
/// trajectory.
struct DecayFit {
    double c_tilde = 0.0;       ///< fitted decay rate in t 2^{2j} units
    double C_damped = 0.0;      ///< constant of the damped branch
    double C_undamped = 0.0;    ///< sup ratio for t 2^{2j} <= 1
    long damped_points = 0;
    bool pass = false;          ///< c_tilde > 0 and constants finite
};

DecayFit coeff_decay_check(const Trajectory& T, const WaveletSystem& W, double N_decay = 0.0);

}  // namespace bns
