#include "bns/selftest.hpp"

#include <sstream>

#include "bns/flows.hpp"
#include "bns/norms.hpp"
#include "bns/rng.hpp"
#include "bns/solver.hpp"

namespace bns {

namespace {

struct Suite {
    std::ostringstream body;
    bool first = true;
    bool ok = true;

    void record(const std::string& name, bool pass, double measure) {
        if (!first) body << ",";
        first = false;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", measure);
        body << "\"" << name << "\":{\"pass\":" << (pass ? "true" : "false")
             << ",\"measure\":" << buf << "}";
        ok = ok && pass;
    }
};

}  // namespace

SelftestResult selftest() {
    Suite s;
    const int n = 2;
    const long N = 32;

    // transforms
    {
        SpectralField F = random_scalar_field(n, N, 11, N / 3);
        GridField g = inverse_transform(F);
        SpectralField back = forward_transform(g);
        double err = l2_dist(F, back) / F.l2();
        s.record("fft_roundtrip", err <= 1e-12, err);

        double grid_sq = 0.0;
        for (double v : g.data) grid_sq += v * v;
        grid_sq /= static_cast<double>(g.points());
        double spec_sq = F.l2() * F.l2();
        double perr = std::abs(grid_sq - spec_sq) / spec_sq;
        s.record("parseval", perr <= 1e-12, perr);
    }
    // leray + products
    {
        SpectralField u = random_divfree_field(n, N, 12, N / 3);
        SpectralField Pu = leray_project(u);
        double idem = l2_dist(leray_project(Pu), Pu) / std::max(Pu.l2(), 1e-30);
        s.record("leray_idempotent", idem <= 1e-12, idem);
        s.record("leray_divfree", Pu.divergence_rel() <= 1e-10, Pu.divergence_rel());
    }
    // wavelets
    {
        WaveletSystem W = build_system(n, 5);
        SpectralField F = random_scalar_field(n, 32, 13, 32 / 3);
        WaveletCoeffs c = analyze(F, W);
        double pars = std::abs(c.sumsq() - F.l2() * F.l2()) / (F.l2() * F.l2());
        s.record("wavelet_parseval", pars <= 1e-10, pars);
        double rec = l2_dist(synthesize(c, W), F) / F.l2();
        s.record("wavelet_reconstruction", rec <= 1e-10, rec);
    }
    // weak norm vs brute force
    {
        Rng rng(14);
        WaveletSystem W = build_system(n, 5);
        WaveletCoeffs c(n, 5, W.j_max);
        for (auto& band : c.detail)
            for (double& v : band) v = rng.uniform() < 0.3 ? rng.normal() : 0.0;
        BandProfile b = band_profile(c, 3);
        double ours = weak_lorentz_norm(b, 2.0, kInf);
        double brute = 0.0;
        for (double lam : b.values) {
            for (double nudge : {1.0 - 1e-12, 1.0, 1.0 + 1e-12}) {
                double lv = lam * nudge;
                if (lv <= 0.0) continue;
                long count = 0;
                for (double v : b.values)
                    if (v > lv) ++count;
                brute = std::max(brute, lv * std::sqrt(count * b.cube_volume()));
            }
        }
        double err = std::abs(ours - brute) / std::max(brute, 1e-30);
        s.record("weak_lorentz_orderstat", err <= 1e-12, err);
    }
    // heat semigroup
    {
        SpectralField F = random_scalar_field(n, N, 15, N / 3);
        SpectralField one = heat_multiplier(heat_multiplier(F, 0.01), 0.02);
        SpectralField two = heat_multiplier(F, 0.03);
        double err = l2_dist(one, two) / two.l2();
        s.record("heat_semigroup", err <= 1e-12, err);
    }
    // Bony decomposition sums to the product
    {
        WaveletSystem W = build_system(n, 5);
        GridField u = inverse_transform(random_scalar_field(n, 32, 16, 32 / 3));
        GridField v = inverse_transform(random_scalar_field(n, 32, 17, 32 / 3));
        BonyParts parts = bony_decompose(u, v, W);
        GridField uv = dealiased_product(u, v);
        double num = 0.0, den = 0.0;
        for (long i = 0; i < uv.points(); ++i) {
            double sum = parts.couple.data[i] + parts.near_diagonal.data[i] +
                         parts.low_high.data[i] + parts.high_low.data[i];
            num += sq(sum - uv.data[i]);
            den += sq(uv.data[i]);
        }
        double err = std::sqrt(num / std::max(den, 1e-30));
        s.record("bony_sum", err <= 1e-10, err);
    }
    // bilinear operator keeps fields divergence-free
    {
        SpectralField f = random_divfree_field(n, N, 18, 5, 0.05);
        std::vector<double> times = TimeRing::sample_times(2, 3, 3);
        Trajectory u = heat_flow(f, times);
        SpectralField B = bilinear_B(u, u, times.back());
        s.record("bilinear_divfree", B.divergence_rel() <= 1e-10, B.divergence_rel());
    }
    // solver smoke: Taylor-Green fixed point
    {
        SolverConfig cfg;
        cfg.n = 2;
        cfg.J = 5;
        cfg.ring_lo = 2;
        cfg.ring_hi = 3;
        cfg.samples_per_ring = 2;
        cfg.max_iter = 8;
        PicardResult r = picard_solve(taylor_green_field(32), cfg);
        double worst = 0.0;
        for (const auto& smp : r.u.samples)
            worst = std::max(worst,
                             l2_dist(smp.F, taylor_green_exact(32, smp.t)) /
                                 taylor_green_exact(32, smp.t).l2());
        s.record("taylor_green", r.report.converged && worst <= 1e-6, worst);
    }

    SelftestResult out;
    out.ok = s.ok;
    out.json = "{\"ok\":" + std::string(s.ok ? "true" : "false") + ",\"suites\":{" +
               s.body.str() + "}}";
    return out;
}

}  // namespace bns
