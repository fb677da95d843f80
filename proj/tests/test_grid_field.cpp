#include "test_util.hpp"

using namespace bns;
using namespace bns::test;

TEST_CASE("forward transform of zero and delta fields") {
    GridField z(2, 16, 1);
    SpectralField Z = forward_transform(z);
    for (const cplx& v : Z.data) CHECK(std::abs(v) == 0.0);

    // delta of height N^n at one sample has flat unit spectrum
    GridField d(2, 16, 1);
    d.data[0] = 256.0;
    SpectralField D = forward_transform(d);
    for (const cplx& v : D.data) CHECK(std::abs(v - cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("Parseval under the chosen normalization") {
    GridField f = random_grid(2, 32, 7);
    SpectralField F = forward_transform(f);
    double grid_sq = 0.0;
    for (double v : f.data) grid_sq += v * v;
    grid_sq /= static_cast<double>(f.points());
    double spec_sq = 0.0;
    for (const cplx& v : F.data) spec_sq += std::norm(v);
    CHECK(rel_err(spec_sq, grid_sq) < 1e-12);
}

TEST_CASE("roundtrip identity") {
    for (int n = 1; n <= 3; ++n) {
        long N = n == 3 ? 16 : 32;
        GridField f = random_grid(n, N, 100 + n);
        GridField back = inverse_transform(forward_transform(f));
        double num = 0.0, den = 0.0;
        for (long i = 0; i < f.points(); ++i) {
            num += sq(back.data[i] - f.data[i]);
            den += sq(f.data[i]);
        }
        CHECK(std::sqrt(num / den) < 1e-12);
    }
}

TEST_CASE("inverse transform rejects broken Hermitian symmetry") {
    SpectralField F(2, 16, 1);
    F.mode(0, {1, 0, 0}) = cplx(1.0, 0.5);  // conjugate partner missing
    CHECK_THROWS_AS(inverse_transform(F), invalid_input);
}

TEST_CASE("non power of two grids are rejected") {
    CHECK_THROWS_AS(GridField(2, 24, 1), invalid_input);
    CHECK_THROWS_AS(GridField(2, 8, 1), invalid_input);  // N >= 16
}

TEST_CASE("apply_multiplier identity, zero, and Laplacian on a single mode") {
    GridField f(1, 32, 1);
    for (long i = 0; i < 32; ++i) f.data[i] = std::sin(kTwoPi * i / 32.0);
    SpectralField F = forward_transform(f);

    SpectralField same = apply_multiplier(F, [](const std::array<long, 3>&) { return cplx(1.0, 0.0); });
    CHECK(l2_dist(same, F) < 1e-14);

    SpectralField zero = apply_multiplier(F, [](const std::array<long, 3>&) { return cplx(0.0, 0.0); });
    CHECK(zero.l2() == 0.0);

    SpectralField lap = apply_multiplier(F, [](const std::array<long, 3>& k) {
        double ksq = 0.0;
        for (double kv : k) ksq += sq(kTwoPi * kv);
        return cplx(-ksq, 0.0);
    });
    GridField g = inverse_transform(lap);
    for (long i = 0; i < 32; ++i)
        CHECK(std::abs(g.data[i] + 4.0 * kPi * kPi * std::sin(kTwoPi * i / 32.0)) < 1e-10);
}

TEST_CASE("apply_multiplier rejects non-finite symbols on admissible modes") {
    SpectralField F = random_admissible(1, 32, 3);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(apply_multiplier(F, [inf](const std::array<long, 3>& k) {
                        return k[0] == 1 ? cplx(inf, 0.0) : cplx(1.0, 0.0);
                    }),
                    invalid_input);
}

TEST_CASE("Riesz transform on sin, constants, and the squared sum identity") {
    GridField f(1, 32, 1);
    for (long i = 0; i < 32; ++i) f.data[i] = std::sin(kTwoPi * i / 32.0);
    GridField g = inverse_transform(riesz_transform(forward_transform(f), 1));
    for (long i = 0; i < 32; ++i)
        CHECK(std::abs(g.data[i] + std::cos(kTwoPi * i / 32.0)) < 1e-12);

    GridField c(2, 16, 1);
    for (double& v : c.data) v = 3.5;
    CHECK(riesz_transform(forward_transform(c), 1).l2() < 1e-14);

    // sum_i R_i^2 F = -F for mean-free F
    SpectralField F = random_admissible(2, 32, 9);
    F.data[0] = 0.0;
    SpectralField sum(2, 32, 1);
    for (int ax = 1; ax <= 2; ++ax) {
        SpectralField r = riesz_transform(riesz_transform(F, ax), ax);
        axpy(sum, 1.0, r);
    }
    axpy(sum, 1.0, F);
    CHECK(sum.l2() / F.l2() < 1e-12);
}

TEST_CASE("Leray projector kills gradients, fixes divergence-free fields, idempotent") {
    // gradient field: u = grad g
    SpectralField g = random_admissible(2, 32, 11);
    SpectralField grad(2, 32, 2);
    long P = grad.points();
    for (LatticeIter it(2, 32); !it.done; it.next()) {
        long flat = flat_index(2, 32, it.idx);
        for (int d = 0; d < 2; ++d) {
            double kd = static_cast<double>(g.freq(it.idx[d]));
            grad.data[d * P + flat] = g.data[flat] * cplx(0.0, kTwoPi * kd);
        }
    }
    SpectralField pg = leray_project(grad);
    CHECK(pg.l2() / std::max(grad.l2(), 1e-30) < 1e-12);

    // u = (sin 2 pi x2, 0) is divergence-free and fixed by the projector
    GridField u(2, 32, 2);
    for (LatticeIter it(2, 32); !it.done; it.next())
        u.data[flat_index(2, 32, it.idx)] = std::sin(kTwoPi * it.idx[1] / 32.0);
    SpectralField U = forward_transform(u);
    CHECK(l2_dist(leray_project(U), U) / U.l2() < 1e-12);

    // idempotence on random vector fields
    SpectralField v = random_admissible(2, 32, 13);
    SpectralField w = random_admissible(2, 32, 14);
    SpectralField vec(2, 32, 2);
    std::copy(v.data.begin(), v.data.end(), vec.data.begin());
    std::copy(w.data.begin(), w.data.end(), vec.data.begin() + P);
    SpectralField p1 = leray_project(vec);
    CHECK(l2_dist(leray_project(p1), p1) / vec.l2() < 1e-12);
    CHECK(p1.divergence_rel() < 1e-12);

    SpectralField scalar(2, 32, 1);
    CHECK_THROWS_AS(leray_project(scalar), invalid_input);
}

TEST_CASE("dealiased product: identity, squared sine, convolution oracle") {
    GridField one(2, 16, 1);
    for (double& v : one.data) v = 1.0;
    GridField f = inverse_transform(random_admissible(2, 16, 21));
    GridField p = dealiased_product(f, one);
    for (long i = 0; i < f.points(); ++i) CHECK(std::abs(p.data[i] - f.data[i]) < 1e-12);

    // sin^2 = (1 - cos(4 pi x))/2
    GridField s(1, 32, 1);
    for (long i = 0; i < 32; ++i) s.data[i] = std::sin(kTwoPi * i / 32.0);
    GridField sq2 = dealiased_product(s, s);
    for (long i = 0; i < 32; ++i) {
        double want = 0.5 * (1.0 - std::cos(2.0 * kTwoPi * i / 32.0));
        CHECK(std::abs(sq2.data[i] - want) < 1e-12);
    }

    SUBCASE("matches the O(N^{2n}) convolution oracle") {
        for (int n = 1; n <= 2; ++n) {
            long N = 16;
            SpectralField F = random_admissible(n, N, 31 + n);
            SpectralField G = random_admissible(n, N, 41 + n);
            SpectralField got = dealiased_product_spec(F, G);
            SpectralField want = convolution_oracle(F, G);
            CHECK(l2_dist(got, want) / std::max(want.l2(), 1e-30) < 1e-12);
        }
    }

    GridField wrong(2, 32, 1);
    CHECK_THROWS_AS(dealiased_product(f, wrong), invalid_input);
}

TEST_CASE("admissibility bookkeeping") {
    SpectralField F(2, 16, 1);
    F.mode(0, {6, 0, 0}) = 1.0;  // beyond k_max = 5
    F.mode(0, {-6, 0, 0}) = 1.0;
    CHECK(!F.admissible());
    F.truncate_to_kmax();
    CHECK(F.admissible());
}
