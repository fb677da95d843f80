#include "test_util.hpp"

#include "bns/flows.hpp"
#include "bns/solver.hpp"

using namespace bns;
using namespace bns::test;

TEST_CASE("heat flow: identity at t = 0, single-mode decay, mean invariance") {
    SpectralField F = random_admissible(2, 32, 3);
    F.data[0] = cplx(0.8, 0.0);
    Trajectory T = heat_flow(F, {0.0, 0.01, 0.1});
    CHECK(T.has_anchor);
    CHECK(l2_dist(T.anchor, F) == 0.0);
    for (const auto& s : T.samples) CHECK(std::abs(s.F.data[0] - cplx(0.8, 0.0)) < 1e-15);

    SpectralField single(2, 32, 1);
    single.mode(0, {2, 1, 0}) = cplx(0.0, -0.5);
    single.mode(0, {-2, -1, 0}) = cplx(0.0, 0.5);
    Trajectory S = heat_flow(single, {0.3});
    double want = 0.5 * std::exp(-0.3 * sq(kTwoPi) * 5.0);
    CHECK(rel_err(std::abs(S.samples[0].F.mode(0, {2, 1, 0})), want) < 1e-13);

    CHECK_THROWS_AS(heat_flow(F, {-0.1}), invalid_input);
}

TEST_CASE("heat semigroup property") {
    SpectralField F = random_admissible(2, 32, 5);
    SpectralField a = heat_multiplier(heat_multiplier(F, 0.013), 0.027);
    SpectralField b = heat_multiplier(F, 0.04);
    CHECK(l2_dist(a, b) / b.l2() < 1e-12);
}

TEST_CASE("trajectory interpolation is exact for heat decay") {
    SpectralField F = random_admissible(2, 32, 7);
    Trajectory T = heat_flow(F, {0.0, 0.02, 0.08});
    for (double t : {0.005, 0.03, 0.06}) {
        SpectralField got = T.interpolate(t);
        SpectralField want = heat_multiplier(F, t);
        CHECK(l2_dist(got, want) / want.l2() < 1e-10);
    }
}

TEST_CASE("duhamel_apply: unit heat factor, triple symbol, zero mode") {
    SpectralField F(2, 32, 1);
    F.mode(0, {3, 1, 0}) = cplx(1.0, 0.0);
    F.mode(0, {-3, -1, 0}) = cplx(1.0, 0.0);

    SUBCASE("t = s gives the plain derivative") {
        SpectralField g = duhamel_apply(F, 0.5, 0.5, DuhamelKind::Grad, {1, 1, 1});
        CHECK(std::abs(g.mode(0, {3, 1, 0}) - cplx(0.0, kTwoPi * 3.0)) < 1e-12);
    }
    SUBCASE("A_{1,1,1} symbol") {
        double dt = 0.01;
        SpectralField g = duhamel_apply(F, 0.02, 0.01, DuhamelKind::TripleRiesz, {1, 1, 1});
        double ksq = sq(kTwoPi) * 10.0;
        cplx want = std::pow(cplx(0.0, kTwoPi * 3.0), 3) / ksq * std::exp(-dt * ksq);
        CHECK(std::abs(g.mode(0, {3, 1, 0}) - want) < 1e-12);
    }
    SUBCASE("k = 0 is annihilated") {
        SpectralField C(2, 32, 1);
        C.data[0] = cplx(2.0, 0.0);
        for (DuhamelKind k : {DuhamelKind::Grad, DuhamelKind::TripleRiesz})
            CHECK(duhamel_apply(C, 0.1, 0.0, k, {1, 2, 1}).l2() == 0.0);
    }
    SUBCASE("t < s rejected") {
        CHECK_THROWS_AS(duhamel_apply(F, 0.1, 0.2, DuhamelKind::Grad, {1, 1, 1}),
                        invalid_input);
    }
}

TEST_CASE("ring quadrature: constants, exponential integrands, convergence order") {
    SUBCASE("constant integrand is exact under both rules") {
        for (QuadRule rule : {QuadRule::ExpFit, QuadRule::Trapezoid}) {
            QuadOptions opt;
            opt.rule = rule;
            double t = 0.37;
            auto nodes = duhamel_nodes(t, opt);
            std::vector<double> vals(nodes.size(), 3.25);
            double got = ring_quadrature_scalar(nodes, vals, t, 0.0, rule);
            CHECK(rel_err(got, 3.25 * t) < 1e-13);
        }
    }
    SUBCASE("e^{-(t-s)a}: trapezoid error drops ~4x per node doubling") {
        double t = 0.22, a = 70.0;
        double exact = (1.0 - std::exp(-a * t)) / a;
        auto run = [&](int S) {
            QuadOptions opt;
            opt.samples_per_ring = S;
            auto nodes = duhamel_nodes(t, opt);
            std::vector<double> vals(nodes.size(), 1.0);
            return std::abs(ring_quadrature_scalar(nodes, vals, t, a, QuadRule::Trapezoid) -
                            exact);
        };
        double e4 = run(4), e8 = run(8);
        CHECK(e8 < e4);
        CHECK(e4 / e8 >= 3.5);
        // the exponential-fit rule is exact on this integrand
        QuadOptions opt;
        auto nodes = duhamel_nodes(t, opt);
        std::vector<double> vals(nodes.size(), 1.0);
        CHECK(rel_err(ring_quadrature_scalar(nodes, vals, t, a, QuadRule::ExpFit), exact) <
              1e-12);
    }
    SUBCASE("zero integrand") {
        QuadOptions opt;
        auto nodes = duhamel_nodes(0.5, opt);
        std::vector<double> vals(nodes.size(), 0.0);
        CHECK(ring_quadrature_scalar(nodes, vals, 0.5, 11.0, QuadRule::ExpFit) == 0.0);
    }
    SUBCASE("field version integrates a trajectory, exact on ring-constant data") {
        SpectralField F = random_admissible(2, 32, 9);
        Trajectory T;
        T.set_anchor(F);
        for (double t : TimeRing::sample_times(1, 3, 4)) T.push(t, F);
        double t = 0.2;
        SpectralField I = ring_quadrature(T, t, {});
        SpectralField want = F;
        for (cplx& z : want.data) z *= t;
        CHECK(l2_dist(I, want) / want.l2() < 1e-12);
    }
}

TEST_CASE("bony decomposition") {
    WaveletSystem W = build_system(2, 5);
    SUBCASE("u = 0 gives four zero parts") {
        GridField z(2, 32, 1);
        GridField v = inverse_transform(random_admissible(2, 32, 11));
        BonyParts parts = bony_decompose(z, v, W);
        CHECK(parts.couple.l2() == 0.0);
        CHECK(parts.near_diagonal.l2() == 0.0);
        CHECK(parts.low_high.l2() == 0.0);
        CHECK(parts.high_low.l2() == 0.0);
    }
    SUBCASE("constant u: couple and u-high parts vanish, sum is u v") {
        GridField u(2, 32, 1);
        for (double& x : u.data) x = 1.7;
        GridField v = inverse_transform(random_admissible(2, 32, 12));
        BonyParts parts = bony_decompose(u, v, W);
        CHECK(parts.couple.l2() < 1e-12);
        CHECK(parts.near_diagonal.l2() < 1e-12);
        CHECK(parts.high_low.l2() < 1e-12);
        GridField uv = dealiased_product(u, v);
        double worst = 0.0;
        for (long i = 0; i < uv.points(); ++i)
            worst = std::max(worst, std::abs(parts.low_high.data[i] - uv.data[i]));
        CHECK(worst < 1e-10);
    }
    SUBCASE("random pair: parts sum to the dealiased product") {
        for (int trial = 0; trial < 3; ++trial) {
            GridField u = inverse_transform(random_admissible(2, 32, 20 + trial));
            GridField v = inverse_transform(random_admissible(2, 32, 30 + trial));
            BonyParts parts = bony_decompose(u, v, W);
            GridField uv = dealiased_product(u, v);
            double num = 0.0, den = 0.0;
            for (long i = 0; i < uv.points(); ++i) {
                double s = parts.couple.data[i] + parts.near_diagonal.data[i] +
                           parts.low_high.data[i] + parts.high_low.data[i];
                num += sq(s - uv.data[i]);
                den += sq(uv.data[i]);
            }
            CHECK(std::sqrt(num / den) < 1e-10);
        }
    }
    SUBCASE("shape mismatch rejected") {
        GridField u(2, 32, 1), v(2, 16, 1);
        CHECK_THROWS_AS(bony_decompose(u, v, W), invalid_input);
    }
}

TEST_CASE("paraproduct flow: zeros and the single-mode closed form") {
    WaveletSystem W = build_system(2, 5);
    SUBCASE("zero factor gives zero") {
        Trajectory z;
        z.set_anchor(SpectralField(2, 32, 1));
        for (double t : TimeRing::sample_times(2, 3, 3)) z.push(t, SpectralField(2, 32, 1));
        SpectralField v = random_admissible(2, 32, 41);
        Trajectory tv = heat_flow(v, TimeRing::sample_times(2, 3, 3));
        CHECK(paraproduct_flow(z, tv, 0.05, DuhamelKind::Grad, {1, 1, 1}, W).l2() == 0.0);
        CHECK(couple_flow(z, tv, 0.05, DuhamelKind::Grad, {1, 1, 1}, W).l2() == 0.0);
    }
    SUBCASE("stationary constant x single mode matches the analytic integral") {
        // u constant c: sum_j P_{j-2}u Q_j v = c (v - mean v); single-mode v
        // makes the Duhamel integral a scalar closed form.
        double c = 1.3;
        SpectralField uc(2, 32, 1);
        uc.data[0] = cplx(c, 0.0);
        SpectralField v(2, 32, 1);
        std::array<long, 3> kappa{2, 1, 0};
        v.mode(0, kappa) = cplx(0.4, 0.1);
        v.mode(0, {-2, -1, 0}) = cplx(0.4, -0.1);

        Trajectory tu, tv;
        tu.set_anchor(uc);
        tv.set_anchor(v);
        for (double t : TimeRing::sample_times(2, 6, 4)) {
            tu.push(t, uc);
            tv.push(t, v);
        }
        double t = 0.05;
        SpectralField got = paraproduct_flow(tu, tv, t, DuhamelKind::Grad, {1, 1, 1}, W);
        double a = sq(kTwoPi) * 5.0;
        cplx want = cplx(0.0, kTwoPi * 2.0) * c * cplx(0.4, 0.1) *
                    ((1.0 - std::exp(-a * t)) / a);
        CHECK(std::abs(got.mode(0, kappa) - want) < 1e-6 * std::abs(want));
        // triple kernel variant: symbol (i 2 pi k_l)(i 2 pi k_l')(i 2 pi k_l'')/|2 pi k|^2
        SpectralField got3 =
            paraproduct_flow(tu, tv, t, DuhamelKind::TripleRiesz, {1, 2, 1}, W);
        cplx sym = cplx(0.0, kTwoPi * 2.0) * cplx(0.0, kTwoPi * 1.0) * cplx(0.0, kTwoPi * 2.0) / a;
        cplx want3 = sym * c * cplx(0.4, 0.1) * ((1.0 - std::exp(-a * t)) / a);
        CHECK(std::abs(got3.mode(0, kappa) - want3) < 1e-6 * std::abs(want3));
    }
}

TEST_CASE("couple flow: disjoint bands annihilate") {
    WaveletSystem W = build_system(2, 5);
    WaveletCoeffs cu(2, 5, W.j_max), cv(2, 5, W.j_max);
    cu.d(1, 1, 0) = 1.0;  // band 1
    cv.d(4, 2, 7) = 1.0;  // band 4: |j - j'| = 3 >= 2
    SpectralField u = synthesize(cu, W);
    SpectralField v = synthesize(cv, W);
    Trajectory tu, tv;
    tu.set_anchor(u);
    tv.set_anchor(v);
    for (double t : TimeRing::sample_times(2, 4, 3)) {
        tu.push(t, u);
        tv.push(t, v);
    }
    SpectralField got = couple_flow(tu, tv, 0.05, DuhamelKind::Grad, {2, 1, 1}, W);
    CHECK(got.l2() < 1e-14);
}

TEST_CASE("bilinear B: zero factor, single-mode closed form, Bony consistency") {
    SUBCASE("B(u, 0) = 0") {
        SpectralField f = random_divfree_field(2, 32, 51, 8, 0.3);
        Trajectory u = heat_flow(f, TimeRing::sample_times(2, 4, 3));
        Trajectory z;
        z.set_anchor(SpectralField(2, 32, 2));
        for (double t : TimeRing::sample_times(2, 4, 3)) z.push(t, SpectralField(2, 32, 2));
        CHECK(bilinear_B(u, z, 0.05).l2() == 0.0);
    }
    SUBCASE("pure shear: the advection term vanishes identically") {
        SpectralField u(2, 32, 2);
        u.mode(0, {0, 1, 0}) = cplx(0.0, -0.5);  // u = (sin 2 pi x2, 0)
        u.mode(0, {0, -1, 0}) = cplx(0.0, 0.5);
        Trajectory tu;
        tu.set_anchor(u);
        for (double t : TimeRing::sample_times(2, 6, 4)) tu.push(t, u);
        CHECK(bilinear_B(tu, tu, 0.03).l2() < 1e-14);
    }
    SUBCASE("two-shear heat flow matches the analytic mode integral") {
        // u = (sin 2 pi x2, sin 4 pi x1): the cross term u1 u2 feeds modes
        // (+-2, +-1); with heat decay the product coefficient is
        // -(1/4) e^{-20 pi^2 s} and the Duhamel kernel rate at |k|^2 = 5 is
        // also 20 pi^2, giving B(2,1)(t) = t e^{-20 pi^2 t} x Leray symbol.
        SpectralField w(2, 32, 2);
        w.mode(0, {0, 1, 0}) = cplx(0.0, -0.5);
        w.mode(0, {0, -1, 0}) = cplx(0.0, 0.5);
        w.mode(1, {2, 0, 0}) = cplx(0.0, -0.5);
        w.mode(1, {-2, 0, 0}) = cplx(0.0, 0.5);
        CHECK(w.divergence_rel() < 1e-14);
        Trajectory tw;
        tw.set_anchor(w);
        for (double s : TimeRing::sample_times(2, 6, 4)) tw.push(s, heat_multiplier(w, s));
        double t = 0.03;
        SpectralField B = bilinear_B(tw, tw, t);
        CHECK(B.divergence_rel() < 1e-10);
        double scale = t * std::exp(-20.0 * kPi * kPi * t);
        cplx want1 = cplx(0.0, 0.3 * kPi) * scale;   // (3 pi/10) i t e^{-20 pi^2 t}
        cplx want2 = cplx(0.0, -0.6 * kPi) * scale;  // -(3 pi/5) i t e^{-20 pi^2 t}
        CHECK(std::abs(B.mode(0, {2, 1, 0}) - want1) < 1e-6 * std::abs(want1));
        CHECK(std::abs(B.mode(1, {2, 1, 0}) - want2) < 1e-6 * std::abs(want2));
        // only the four cross modes are populated
        double off = 0.0;
        for (LatticeIter it(2, 32); !it.done; it.next()) {
            long k1 = B.freq(it.idx[0]), k2 = B.freq(it.idx[1]);
            if (std::labs(k1) == 2 && std::labs(k2) == 1) continue;
            long flat = flat_index(2, 32, it.idx);
            off += std::norm(B.data[flat]) + std::norm(B.data[B.points() + flat]);
        }
        CHECK(std::sqrt(off) < 1e-12);
    }
    SUBCASE("B_l from the four Bony parts equals B_l from the plain product") {
        WaveletSystem W = build_system(2, 5);
        SpectralField u = random_admissible(2, 32, 61);
        SpectralField v = random_admissible(2, 32, 62);
        Trajectory tu, tv;
        tu.set_anchor(u);
        tv.set_anchor(v);
        for (double s : TimeRing::sample_times(2, 4, 3)) {
            tu.push(s, heat_multiplier(u, s));
            tv.push(s, heat_multiplier(v, s));
        }
        double t = 0.05;
        // plain product flow
        SpectralField direct = product_flow(tu, tv, t, DuhamelKind::Grad, {1, 1, 1});
        // four-part assembly through the same quadrature
        auto part_flow = [&](auto part_fn) {
            QuadOptions opt;
            std::vector<double> nodes = duhamel_nodes(t, opt);
            std::vector<SpectralField> vals;
            for (double s : nodes) {
                SpectralField us = s == 0.0 ? tu.anchor : tu.interpolate(s);
                SpectralField vs = s == 0.0 ? tv.anchor : tv.interpolate(s);
                SpectralField g = part_fn(us, vs);
                vals.push_back(apply_multiplier(g, [](const std::array<long, 3>& k) {
                    return cplx(0.0, kTwoPi * static_cast<double>(k[0]));
                }));
            }
            return duhamel_integrate(nodes, vals, t, opt.rule);
        };
        SpectralField sum = part_flow([&](const SpectralField& a, const SpectralField& b) {
            SpectralField couple = couple_part(a, b, W);
            SpectralField lohi = paraproduct_part(a, b, W, true);
            SpectralField hilo = paraproduct_part(b, a, W, false);
            // swap back: hilo is sum_j P_{j-2}b Q_j a which equals Q_j a P_{j-2} b
            SpectralField near(a.n, a.N, 1);
            for (int j = 0; j <= W.j_max; ++j) {
                SpectralField Qa = project_band(a, W, BandProjection::Q, j);
                for (int jp = std::max(0, j - 2); jp <= std::min(W.j_max, j + 2); ++jp) {
                    if (jp == j) continue;
                    SpectralField Qb = project_band(b, W, BandProjection::Q, jp);
                    axpy(near, 1.0, dealiased_product_spec(Qa, Qb));
                }
            }
            SpectralField total = couple;
            axpy(total, 1.0, near);
            axpy(total, 1.0, lohi);
            axpy(total, 1.0, hilo);
            return total;
        });
        CHECK(l2_dist(sum, direct) / std::max(direct.l2(), 1e-30) < 1e-9);
    }
}

TEST_CASE("quadrature convergence: doubling nodes cuts single-mode error >= 3.5x") {
    // one decaying mode integrated against the heat kernel, trapezoid rule
    double t = 0.11, a = 90.0, b = 35.0;
    double exact = (std::exp(-b * t) - std::exp(-a * t)) / (a - b);
    auto err = [&](int S) {
        QuadOptions opt;
        opt.samples_per_ring = S;
        auto nodes = duhamel_nodes(t, opt);
        std::vector<double> vals;
        for (double s : nodes) vals.push_back(std::exp(-b * s));
        return std::abs(ring_quadrature_scalar(nodes, vals, t, a, QuadRule::Trapezoid) - exact);
    };
    CHECK(err(4) / err(8) >= 3.5);
}

TEST_CASE("Lemma 3.1 decay fit on a heat-flow trajectory") {
    WaveletSystem W = build_system(2, 5);
    SUBCASE("zero trajectory passes vacuously") {
        Trajectory T;
        T.set_anchor(SpectralField(2, 32, 1));
        T.push(0.3, SpectralField(2, 32, 1));
        DecayFit fit = coeff_decay_check(T, W);
        CHECK(fit.pass);
        CHECK(fit.damped_points == 0);
    }
    SUBCASE("single-wavelet datum: positive rate below the slowest-mode bound") {
        WaveletCoeffs c(2, 5, W.j_max);
        c.d(2, 1, 2) = 1.0;
        SpectralField f = synthesize(c, W);
        Trajectory T = heat_flow(f, TimeRing::sample_times(0, 2, 4));
        DecayFit fit = coeff_decay_check(T, W);
        CHECK(fit.pass);
        CHECK(fit.c_tilde > 0.0);
        // slowest admissible mode in a band decays at (2 pi/3)^2 in t 2^{2j}
        // units; the fit cannot exceed it by much
        CHECK(fit.c_tilde <= sq(kTwoPi / 3.0) * 1.5);
        CHECK(fit.C_undamped < 100.0);
    }
    SUBCASE("random datum: constants stay finite and the bound holds") {
        SpectralField f = random_admissible(2, 32, 71);
        Trajectory T = heat_flow(f, TimeRing::sample_times(0, 3, 4));
        DecayFit fit = coeff_decay_check(T, W);
        CHECK(fit.pass);
        CHECK(fit.c_tilde > 0.0);
    }
}

TEST_CASE("product support ring invariant under the flow integrand") {
    WaveletSystem W = build_system(2, 5);
    SpectralField u = random_admissible(2, 32, 81);
    SpectralField v = random_admissible(2, 32, 82);
    for (int j = 2; j <= 4; ++j) {
        SpectralField Pu = project_band(u, W, BandProjection::P, j - 2);
        for (int eps = 1; eps <= 3; ++eps) {
            SpectralField Qv = project_band(v, W, BandProjection::Qeps, j, eps);
            SpectralField prod = dealiased_product_spec(Pu, Qv);
            double total = sq(prod.l2());
            if (total == 0.0) continue;
            CHECK(support_ring_energy(prod, j, SupportRing::Product, eps) / total < 1e-12);
        }
    }
}
