#include "bns/solver.hpp"

#include <algorithm>
#include <chrono>

#include "bns/rng.hpp"

namespace bns {

void SolverConfig::validate() const {
    require(n >= 1 && n <= 3, "solver: dimension must be 1, 2 or 3");
    require(J >= 4, "solver: J must be at least 4");
    require(ring_lo <= ring_hi, "solver: ring range reversed");
    require(ring_lo >= 1, "solver: t_min must be positive and ring-aligned (ring_lo >= 1)");
    require(samples_per_ring >= 1 && quad_samples >= 2, "solver: bad sampling counts");
    require(tol > 0.0, "solver: tolerance must be positive");
    require(max_iter >= 1, "solver: max_iter must be positive");
    space.validate(n, /*solver_preset=*/true);
}

namespace {

double micro_diff(const Trajectory& a, const Trajectory& b, const WaveletSystem& W,
                  const SpaceParams& P) {
    Trajectory d;
    if (a.has_anchor) d.set_anchor(a.anchor - b.anchor);
    for (size_t i = 0; i < a.samples.size(); ++i)
        d.push(a.samples[i].t, a.samples[i].F - b.samples[i].F);
    return microlocal_norm(d, W, P);
}

double l2_diff(const Trajectory& a, const Trajectory& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.samples.size(); ++i)
        m = std::max(m, l2_dist(a.samples[i].F, b.samples[i].F));
    return m;
}

}  // namespace

PicardResult picard_solve(const SpectralField& f, const SolverConfig& cfg) {
    cfg.validate();
    require(f.n == cfg.n && f.N == cfg.N(), "picard_solve: datum does not match the config");
    require(f.c == f.n, "picard_solve: vector datum expected (c == n)");
    double div = f.divergence_rel();
    if (div > 1e-8) fail_invalid("picard_solve: datum is not divergence-free (div " +
                                 std::to_string(div) + ")");

    WaveletSystem W = build_system(cfg.n, cfg.J);
    QuadOptions qopt;
    qopt.samples_per_ring = cfg.quad_samples;

    std::vector<double> times =
        TimeRing::sample_times(cfg.ring_lo, cfg.ring_hi, cfg.samples_per_ring);
    Trajectory u0 = heat_flow(f, times);

    PicardResult res;
    res.u = u0;
    double fl2 = std::max(f.l2(), 1e-30);

    double prev_diff_micro = kInf;
    int grow_streak = 0;
    using clock = std::chrono::steady_clock;

    for (int tau = 0; tau <= cfg.max_iter; ++tau) {
        auto tick = clock::now();
        // u^{tau+1}(t_i) = u^0(t_i) - B(u^tau, u^tau)(t_i)
        std::vector<SpectralField> Bu = bilinear_B_at_times(res.u, res.u, times, qopt);
        Trajectory next;
        next.set_anchor(f);
        for (size_t i = 0; i < times.size(); ++i) {
            SpectralField g = u0.samples[i].F;
            axpy(g, -1.0, Bu[i]);
            next.push(times[i], std::move(g));
        }

        double diff_micro = micro_diff(next, res.u, W, cfg.space);
        double diff_l2 = l2_diff(next, res.u);
        // Residual of the current iterate comes free: u - u0 + B(u,u) = u - next.
        double residual = diff_l2 / fl2;
        double mnorm = microlocal_norm(res.u, W, cfg.space);
        double wall =
            std::chrono::duration<double, std::milli>(clock::now() - tick).count();
        res.report.rows.push_back({tau, mnorm, res.u.max_l2(), diff_micro, diff_l2, residual, wall});

        if (!std::isfinite(diff_micro) || !std::isfinite(diff_l2))
            fail_numeric("picard_solve: iteration produced non-finite norms");

        if (prev_diff_micro > 0.0 && std::isfinite(prev_diff_micro)) {
            double ratio = diff_micro / prev_diff_micro;
            res.report.contraction_ratio = std::max(res.report.contraction_ratio, ratio);
            grow_streak = diff_micro > prev_diff_micro ? grow_streak + 1 : 0;
            if (grow_streak >= 2) {
                res.report.non_contraction = true;
                res.u = next;
                return res;
            }
        }
        prev_diff_micro = diff_micro;
        res.u = next;
        if (diff_micro < cfg.tol && diff_l2 < cfg.tol) {
            res.report.converged = true;
            return res;
        }
    }
    return res;
}

double mild_residual(const Trajectory& u, const SpectralField& f, const QuadOptions& opt) {
    u.validate();
    std::vector<double> times;
    for (const auto& s : u.samples) times.push_back(s.t);
    std::vector<SpectralField> Bu = bilinear_B_at_times(u, u, times, opt);
    double fl2 = std::max(f.l2(), 1e-30);
    double worst = 0.0;
    for (size_t i = 0; i < times.size(); ++i) {
        SpectralField expect = heat_multiplier(f, times[i]);
        axpy(expect, -1.0, Bu[i]);
        worst = std::max(worst, l2_dist(u.samples[i].F, expect) / fl2);
    }
    return worst;
}

double kinetic_energy(const SpectralField& F) {
    double s = 0.0;
    for (const cplx& z : F.data) s += std::norm(z);
    return 0.5 * s;
}

namespace {

SpectralField ns_rhs(const SpectralField& u) {
    // du/dt = -P nabla.(u tensor u) + Laplacian u, spectral, dealiased.
    SpectralField adv(u.n, u.N, u.c);
    long P = u.points();
    for (int i = 0; i < u.n; ++i) {
        for (int l = 0; l < u.n; ++l) {
            SpectralField prod = dealiased_product_spec(u, u, l, i);
            for (LatticeIter it(u.n, u.N); !it.done; it.next()) {
                long flat = flat_index(u.n, u.N, it.idx);
                double kl = static_cast<double>(prod.freq(it.idx[l]));
                adv.data[i * P + flat] += prod.data[flat] * cplx(0.0, kTwoPi * kl);
            }
        }
    }
    adv = leray_project(adv);
    SpectralField rhs = zeros_like(u);
    for (LatticeIter it(u.n, u.N); !it.done; it.next()) {
        long flat = flat_index(u.n, u.N, it.idx);
        double ksq = 0.0;
        for (int d = 0; d < u.n; ++d) ksq += sq(kTwoPi * u.freq(it.idx[d]));
        for (int comp = 0; comp < u.c; ++comp)
            rhs.data[comp * P + flat] = -adv.data[comp * P + flat] - ksq * u.data[comp * P + flat];
    }
    return rhs;
}

double max_grid_speed(const SpectralField& u) {
    GridField g = inverse_transform(u);
    double m = 0.0;
    long P = g.points();
    for (long i = 0; i < P; ++i) {
        double s = 0.0;
        for (int comp = 0; comp < g.c; ++comp) s += sq(g.data[comp * P + i]);
        m = std::max(m, std::sqrt(s));
    }
    return m;
}

SpectralField rk4_step(const SpectralField& u, double dt) {
    SpectralField k1 = ns_rhs(u);
    SpectralField u2 = u;
    axpy(u2, 0.5 * dt, k1);
    u2 = leray_project(u2);
    SpectralField k2 = ns_rhs(u2);
    SpectralField u3 = u;
    axpy(u3, 0.5 * dt, k2);
    u3 = leray_project(u3);
    SpectralField k3 = ns_rhs(u3);
    SpectralField u4 = u;
    axpy(u4, dt, k3);
    u4 = leray_project(u4);
    SpectralField k4 = ns_rhs(u4);

    SpectralField out = u;
    axpy(out, dt / 6.0, k1);
    axpy(out, dt / 3.0, k2);
    axpy(out, dt / 3.0, k3);
    axpy(out, dt / 6.0, k4);
    return leray_project(out);
}

}  // namespace

Trajectory rk4_reference(const SpectralField& f, const SolverConfig& cfg, double dt) {
    cfg.validate();
    require(f.n == cfg.n && f.N == cfg.N(), "rk4_reference: datum does not match the config");
    require(f.divergence_rel() <= 1e-8, "rk4_reference: datum is not divergence-free");

    double K = static_cast<double>(f.k_max);
    double dt_diff = 1.0 / (4.0 * kPi * kPi * K * K);
    double umax = max_grid_speed(f);
    double dt_adv = umax > 1e-12 ? (1.0 / static_cast<double>(f.N)) / umax : kInf;
    double dt_cfl = 0.25 * std::min(dt_diff, dt_adv);
    if (dt == 0.0) dt = dt_cfl;
    require(dt <= dt_cfl * (1.0 + 1e-12), "rk4_reference: requested step violates the CFL bound");

    std::vector<double> times =
        TimeRing::sample_times(cfg.ring_lo, cfg.ring_hi, cfg.samples_per_ring);

    Trajectory T;
    T.set_anchor(f);
    SpectralField u = f;
    double t_now = 0.0;
    for (double target : times) {
        double span = target - t_now;
        long steps = std::max(1L, static_cast<long>(std::ceil(span / dt)));
        double h = span / static_cast<double>(steps);
        for (long s = 0; s < steps; ++s) u = rk4_step(u, h);
        t_now = target;
        if (u.divergence_rel() > 1e-9)
            fail_numeric("rk4_reference: divergence-free invariant lost");
        T.push(target, u);
    }
    return T;
}

SpectralField taylor_green_field(long N) {
    SpectralField F(2, N, 2);
    // sin 2pi x1 cos 2pi x2 = (e1 - e-1)(e2 + e-2)/(4i), component 1;
    // -cos 2pi x1 sin 2pi x2 likewise.
    const cplx quarter_i(0.0, 0.25);
    auto set4 = [&](int comp, double s_pp, double s_pm, double s_mp, double s_mm) {
        F.mode(comp, {1, 1, 0}) = -quarter_i * s_pp;
        F.mode(comp, {1, -1, 0}) = -quarter_i * s_pm;
        F.mode(comp, {-1, 1, 0}) = -quarter_i * s_mp;
        F.mode(comp, {-1, -1, 0}) = -quarter_i * s_mm;
    };
    // sin a cos b = (sin(a+b) + sin(a-b))/2; sin phase via -i/4 pairs.
    set4(0, 1.0, 1.0, -1.0, -1.0);
    set4(1, -1.0, 1.0, -1.0, 1.0);
    return F;
}

SpectralField taylor_green_exact(long N, double t) {
    SpectralField F = taylor_green_field(N);
    double damp = std::exp(-8.0 * kPi * kPi * t);
    for (cplx& z : F.data) z *= damp;
    return F;
}

namespace {

// Fills Hermitian-symmetric Gaussian modes in |k_i| <= kmax, k != 0, drawing
// in a fixed k-lexicographic order so the field is resolution-independent.
void fill_random_modes(SpectralField& F, std::uint64_t seed, long kmax) {
    require(kmax <= F.k_max, "random field: kmax beyond the dealias bound");
    Rng rng(seed);
    int n = F.n;
    std::array<long, 3> k{0, 0, 0};
    std::function<void(int)> walk = [&](int d) {
        if (d == n) {
            // Draw each conjugate pair once: take the lexicographically
            // positive representative.
            bool positive = false;
            for (int i = 0; i < n; ++i) {
                if (k[i] > 0) { positive = true; break; }
                if (k[i] < 0) { positive = false; break; }
            }
            if (!positive) return;
            for (int comp = 0; comp < F.c; ++comp) {
                cplx z(rng.normal(), rng.normal());
                F.mode(comp, k) = z;
                std::array<long, 3> neg{0, 0, 0};
                for (int i = 0; i < n; ++i) neg[i] = -k[i];
                F.mode(comp, neg) = std::conj(z);
            }
            return;
        }
        for (long kk = -kmax; kk <= kmax; ++kk) {
            k[d] = kk;
            walk(d + 1);
        }
    };
    walk(0);
}

}  // namespace

SpectralField random_scalar_field(int n, long N, std::uint64_t seed, long kmax, double amplitude) {
    SpectralField F(n, N, 1);
    fill_random_modes(F, seed, kmax);
    double norm = F.l2();
    if (norm > 0.0)
        for (cplx& z : F.data) z *= amplitude / norm;
    return F;
}

SpectralField random_divfree_field(int n, long N, std::uint64_t seed, long kmax,
                                   double amplitude) {
    SpectralField F(n, N, n);
    fill_random_modes(F, seed, kmax);
    F = leray_project(F);
    double norm = F.l2();
    if (norm > 0.0)
        for (cplx& z : F.data) z *= amplitude / norm;
    return F;
}

SmallnessScan smallness_scan(const SpectralField& direction, const SolverConfig& cfg,
                             double eps_hi, int bisection_steps) {
    cfg.validate();
    SpectralField dir = direction;
    double norm = dir.l2();
    require(norm > 0.0, "smallness_scan: zero direction");
    for (cplx& z : dir.data) z /= norm;

    auto ratio_at = [&](double eps) -> ScanPoint {
        SpectralField f = dir;
        for (cplx& z : f.data) z *= eps;
        try {
            PicardResult r = picard_solve(f, cfg);
            double ratio = r.report.contraction_ratio;
            bool ok = r.report.converged && ratio < 1.0;
            return {eps, ratio, ok};
        } catch (const numeric_error&) {
            return {eps, kInf, false};
        }
    };

    SmallnessScan scan;
    double lo = 0.0, hi = eps_hi;
    ScanPoint top = ratio_at(hi);
    scan.curve.push_back(top);
    if (top.converged) {
        scan.eps0 = hi;
        scan.upper_bounded = false;
        return scan;
    }
    // Find a contracting lower bracket.
    double probe = hi / 2.0;
    while (probe > 1e-12) {
        ScanPoint pt = ratio_at(probe);
        scan.curve.push_back(pt);
        if (pt.converged) {
            lo = probe;
            break;
        }
        hi = probe;
        probe /= 2.0;
    }
    if (lo == 0.0) return scan;  // nothing contracts: bug signal, eps0 = 0
    for (int step = 0; step < bisection_steps; ++step) {
        double mid = std::sqrt(lo * hi);
        ScanPoint pt = ratio_at(mid);
        scan.curve.push_back(pt);
        if (pt.converged) lo = mid; else hi = mid;
    }
    scan.eps0 = lo;
    scan.upper_bounded = true;
    std::sort(scan.curve.begin(), scan.curve.end(),
              [](const ScanPoint& a, const ScanPoint& b) { return a.eps < b.eps; });
    return scan;
}

SpectralField dyadic_rescale(const SpectralField& f, int i) {
    require(i >= 0, "dyadic_rescale: theta must be a non-negative dyadic power");
    if (i == 0) return f;
    long theta = 1L << i;
    require(f.admissible(1e-12 * (1.0 + f.l2())), "dyadic_rescale: field not admissible");
    SpectralField out(f.n, f.N, f.c);
    long P = f.points();
    for (LatticeIter it(f.n, f.N); !it.done; it.next()) {
        std::array<long, 3> k{0, 0, 0};
        bool ok = true;
        for (int d = 0; d < f.n; ++d) {
            k[d] = f.freq(it.idx[d]);
            if (std::labs(k[d]) * theta > f.N / 2) ok = false;
        }
        long flat = flat_index(f.n, f.N, it.idx);
        bool nonzero = false;
        for (int comp = 0; comp < f.c; ++comp)
            if (f.data[comp * P + flat] != cplx(0.0, 0.0)) nonzero = true;
        if (!nonzero) continue;
        require(ok, "dyadic_rescale: rescaled mode leaves the grid; use a mid-band datum");
        std::array<long, 3> kt{0, 0, 0};
        for (int d = 0; d < f.n; ++d) kt[d] = k[d] * theta;
        for (int comp = 0; comp < f.c; ++comp)
            out.mode(comp, kt) = static_cast<double>(theta) * f.data[comp * P + flat];
    }
    require(out.admissible(1e-12 * (1.0 + out.l2())),
            "dyadic_rescale: rescaled spectrum exceeds the dealias bound");
    return out;
}

std::vector<ScaleCheckRow> scale_family_check(const SpectralField& f,
                                              const std::vector<double>& thetas,
                                              const SolverConfig& cfg) {
    cfg.validate();
    WaveletSystem W = build_system(cfg.n, cfg.J);
    SpaceParams crit = cfg.space;
    crit.critical = true;

    auto coeffs_of = [&](const SpectralField& g) { return analyze_components(g, W); };

    std::vector<ScaleCheckRow> rows;
    for (double theta : thetas) {
        double li = std::log2(theta);
        int i = static_cast<int>(std::lround(li));
        require(std::abs(li - i) < 1e-12 && i >= 0, "scale_family_check: theta must be dyadic >= 1");

        ScaleCheckRow row{};
        row.theta = theta;

        SpectralField ft = dyadic_rescale(f, i);
        auto cb = coeffs_of(f);
        // Data-norm invariance is realized by the coefficient index shift
        // (the lattice form of f -> theta f(theta x)); on the torus the field
        // map wraps instead of shrinking support, which the weak norm sees.
        std::vector<WaveletCoeffs> cs;
        for (const auto& c : cb) cs.push_back(index_shift(c, i));
        int j_hi = W.j_max;
        row.data_norm_base = besov_lorentz_norm(cb, crit, 0, j_hi - i);
        row.data_norm_scaled = besov_lorentz_norm(cs, crit, i, j_hi);
        double denom = std::max(row.data_norm_base, 1e-30);
        row.data_deviation = std::abs(row.data_norm_scaled - row.data_norm_base) / denom;

        PicardResult base = picard_solve(f, cfg);
        // u_theta(t, x) = theta u(theta^2 t, theta x): same equation with the
        // rescaled datum and the ring range shifted by log2 theta.
        SolverConfig scfg = cfg;
        scfg.ring_lo = cfg.ring_lo + i;
        scfg.ring_hi = cfg.ring_hi + i;
        PicardResult scaled = picard_solve(ft, scfg);
        row.sol_norm_base = microlocal_norm(base.u, W, crit);
        row.sol_norm_scaled = microlocal_norm(scaled.u, W, crit);
        row.sol_deviation = std::abs(row.sol_norm_scaled - row.sol_norm_base) /
                            std::max(row.sol_norm_base, 1e-30);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace bns
