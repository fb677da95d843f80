#include "bns/grid_field.hpp"

#include <algorithm>

#include "bns/fft.hpp"

namespace bns {

long default_kmax(long N) { return N / 3; }

static void check_shape(int n, long N) {
    require(n >= 1 && n <= 3, "dimension must be 1, 2 or 3");
    require(is_pow2(N) && N >= 16, "N must be a power of two >= 16");
}

GridField::GridField(int n_, long N_, int c_) : n(n_), N(N_), c(c_) {
    check_shape(n, N);
    require(c >= 1, "component count must be positive");
    data.assign(static_cast<size_t>(c) * points(), 0.0);
}

bool GridField::finite() const {
    for (double v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

double GridField::l2() const {
    double s = 0.0;
    for (double v : data) s += v * v;
    return std::sqrt(s / static_cast<double>(points()));
}

SpectralField::SpectralField(int n_, long N_, int c_) : n(n_), N(N_), c(c_) {
    check_shape(n, N);
    require(c >= 1, "component count must be positive");
    k_max = default_kmax(N);
    data.assign(static_cast<size_t>(c) * points(), cplx(0.0, 0.0));
}

cplx& SpectralField::mode(int comp, const std::array<long, 3>& k) {
    std::array<long, 3> idx{0, 0, 0};
    for (int d = 0; d < n; ++d) idx[d] = idx_of(k[d]);
    return at(comp, flat_index(n, N, idx));
}

cplx SpectralField::mode(int comp, const std::array<long, 3>& k) const {
    std::array<long, 3> idx{0, 0, 0};
    for (int d = 0; d < n; ++d) idx[d] = idx_of(k[d]);
    return at(comp, flat_index(n, N, idx));
}

double SpectralField::l2() const {
    double s = 0.0;
    for (const cplx& z : data) s += std::norm(z);
    return std::sqrt(s);
}

bool SpectralField::admissible(double tol) const {
    long P = points();
    for (int comp = 0; comp < c; ++comp) {
        for (LatticeIter it(n, N); !it.done; it.next()) {
            bool outside = false;
            for (int d = 0; d < n; ++d)
                if (std::labs(freq(it.idx[d])) > k_max) outside = true;
            if (!outside) continue;
            if (std::abs(data[comp * P + flat_index(n, N, it.idx)]) > tol) return false;
        }
    }
    return true;
}

void SpectralField::truncate_to_kmax() {
    long P = points();
    for (int comp = 0; comp < c; ++comp) {
        for (LatticeIter it(n, N); !it.done; it.next()) {
            for (int d = 0; d < n; ++d) {
                if (std::labs(freq(it.idx[d])) > k_max) {
                    data[comp * P + flat_index(n, N, it.idx)] = 0.0;
                    break;
                }
            }
        }
    }
}

double SpectralField::divergence_rel() const {
    require(c == n, "divergence needs a full velocity field (c == n)");
    double max_div = 0.0, max_amp = 0.0;
    long P = points();
    for (LatticeIter it(n, N); !it.done; it.next()) {
        long flat = flat_index(n, N, it.idx);
        cplx div(0.0, 0.0);
        double amp = 0.0;
        for (int d = 0; d < n; ++d) {
            cplx v = data[d * P + flat];
            div += kTwoPi * static_cast<double>(freq(it.idx[d])) * v;
            amp = std::max(amp, std::abs(v));
        }
        max_div = std::max(max_div, std::abs(div));
        max_amp = std::max(max_amp, amp);
    }
    return max_amp > 0.0 ? max_div / max_amp : 0.0;
}

double SpectralField::hermitian_defect() const {
    double worst = 0.0, scale = 0.0;
    long P = points();
    for (const cplx& z : data) scale = std::max(scale, std::abs(z));
    if (scale == 0.0) return 0.0;
    for (int comp = 0; comp < c; ++comp) {
        for (LatticeIter it(n, N); !it.done; it.next()) {
            std::array<long, 3> neg{0, 0, 0};
            for (int d = 0; d < n; ++d) neg[d] = (N - it.idx[d]) % N;
            cplx a = data[comp * P + flat_index(n, N, it.idx)];
            cplx b = data[comp * P + flat_index(n, N, neg)];
            worst = std::max(worst, std::abs(a - std::conj(b)));
        }
    }
    return worst / scale;
}

SpectralField forward_transform(const GridField& f) {
    require(f.finite(), "forward_transform: field has non-finite samples");
    SpectralField F(f.n, f.N, f.c);
    long P = f.points();
    double scale = 1.0 / static_cast<double>(P);
    std::vector<cplx> buf(P);
    for (int comp = 0; comp < f.c; ++comp) {
        for (long i = 0; i < P; ++i) buf[i] = f.data[comp * P + i];
        fft_inplace(f.n, f.N, buf.data(), -1);
        for (long i = 0; i < P; ++i) F.data[comp * P + i] = buf[i] * scale;
    }
    return F;
}

GridField inverse_transform(const SpectralField& F) {
    double defect = F.hermitian_defect();
    if (defect > 1e-9)
        fail_invalid("inverse_transform: Hermitian symmetry violated (defect " +
                     std::to_string(defect) + ")");
    GridField f(F.n, F.N, F.c);
    long P = F.points();
    std::vector<cplx> buf(P);
    for (int comp = 0; comp < F.c; ++comp) {
        for (long i = 0; i < P; ++i) buf[i] = F.data[comp * P + i];
        fft_inplace(F.n, F.N, buf.data(), +1);
        for (long i = 0; i < P; ++i) f.data[comp * P + i] = buf[i].real();
    }
    return f;
}

SpectralField apply_multiplier(const SpectralField& F, const Symbol& sigma) {
    SpectralField out = F;
    long P = F.points();
    for (LatticeIter it(F.n, F.N); !it.done; it.next()) {
        std::array<long, 3> k{0, 0, 0};
        bool inside = true;
        for (int d = 0; d < F.n; ++d) {
            k[d] = F.freq(it.idx[d]);
            if (std::labs(k[d]) > F.k_max) inside = false;
        }
        long flat = flat_index(F.n, F.N, it.idx);
        cplx s = sigma(k);
        if (inside && (!std::isfinite(s.real()) || !std::isfinite(s.imag())))
            fail_invalid("apply_multiplier: symbol not finite on admissible spectrum");
        for (int comp = 0; comp < F.c; ++comp) out.data[comp * P + flat] = F.data[comp * P + flat] * s;
    }
    return out;
}

SpectralField riesz_transform(const SpectralField& F, int axis) {
    require(axis >= 1 && axis <= F.n, "riesz_transform: axis out of range");
    return apply_multiplier(F, [axis](const std::array<long, 3>& k) -> cplx {
        double ksq = 0.0;
        for (double kv : k) ksq += kv * kv;
        if (ksq == 0.0) return cplx(0.0, 0.0);
        return cplx(0.0, -static_cast<double>(k[axis - 1]) / std::sqrt(ksq));
    });
}

SpectralField leray_project(const SpectralField& u) {
    require(u.c == u.n, "leray_project: needs c == n");
    SpectralField out = u;
    long P = u.points();
    for (LatticeIter it(u.n, u.N); !it.done; it.next()) {
        long flat = flat_index(u.n, u.N, it.idx);
        double ksq = 0.0;
        std::array<double, 3> k{0, 0, 0};
        for (int d = 0; d < u.n; ++d) {
            k[d] = static_cast<double>(u.freq(it.idx[d]));
            ksq += k[d] * k[d];
        }
        if (ksq == 0.0) continue;  // identity at the mean mode
        cplx dot(0.0, 0.0);
        for (int d = 0; d < u.n; ++d) dot += k[d] * u.data[d * P + flat];
        dot /= ksq;
        for (int d = 0; d < u.n; ++d) out.data[d * P + flat] = u.data[d * P + flat] - k[d] * dot;
    }
    return out;
}

SpectralField heat_multiplier(const SpectralField& F, double t) {
    require(t >= 0.0, "heat_multiplier: negative time");
    return apply_multiplier(F, [t](const std::array<long, 3>& k) -> cplx {
        double ksq = 0.0;
        for (double kv : k) ksq += kv * kv;
        return cplx(std::exp(-t * kTwoPi * kTwoPi * ksq), 0.0);
    });
}

// Embed modes of F (component comp) into a 2N lattice, unnormalized-inverse
// transform, and return the big complex buffer.
static std::vector<cplx> pad_to_big_grid(const SpectralField& F, int comp) {
    long M = 2 * F.N;
    long bigP = ipow(M, F.n);
    std::vector<cplx> big(bigP, cplx(0.0, 0.0));
    long P = F.points();
    for (LatticeIter it(F.n, F.N); !it.done; it.next()) {
        std::array<long, 3> bidx{0, 0, 0};
        bool inside = true;
        for (int d = 0; d < F.n; ++d) {
            long k = F.freq(it.idx[d]);
            if (std::labs(k) > F.k_max) inside = false;
            bidx[d] = k >= 0 ? k : k + M;
        }
        if (!inside) continue;
        big[flat_index(F.n, M, bidx)] = F.data[comp * P + flat_index(F.n, F.N, it.idx)];
    }
    fft_inplace(F.n, M, big.data(), +1);
    return big;
}

SpectralField dealiased_product_spec(const SpectralField& F, const SpectralField& G,
                                     int comp_f, int comp_g) {
    require(F.n == G.n && F.N == G.N, "dealiased_product: mismatched (n, N)");
    long M = 2 * F.N;
    long bigP = ipow(M, F.n);
    std::vector<cplx> a = pad_to_big_grid(F, comp_f);
    std::vector<cplx> b = pad_to_big_grid(G, comp_g);
    for (long i = 0; i < bigP; ++i) a[i] *= b[i];
    fft_inplace(F.n, M, a.data(), -1);
    double scale = 1.0 / static_cast<double>(bigP);

    SpectralField out(F.n, F.N, 1);
    out.k_max = std::min(F.k_max, G.k_max);
    for (LatticeIter it(F.n, F.N); !it.done; it.next()) {
        std::array<long, 3> bidx{0, 0, 0};
        bool inside = true;
        for (int d = 0; d < F.n; ++d) {
            long k = out.freq(it.idx[d]);
            if (std::labs(k) > out.k_max) inside = false;
            bidx[d] = k >= 0 ? k : k + M;
        }
        if (!inside) continue;
        out.data[flat_index(F.n, F.N, it.idx)] = a[flat_index(F.n, M, bidx)] * scale;
    }
    return out;
}

GridField dealiased_product(const GridField& f, const GridField& g) {
    require(f.n == g.n && f.N == g.N, "dealiased_product: mismatched (n, N)");
    require(f.c == 1 && g.c == 1, "dealiased_product: scalar fields expected");
    SpectralField F = forward_transform(f);
    SpectralField G = forward_transform(g);
    require(F.admissible(1e-12 * (1.0 + F.l2())), "dealiased_product: first factor not admissible");
    require(G.admissible(1e-12 * (1.0 + G.l2())), "dealiased_product: second factor not admissible");
    return inverse_transform(dealiased_product_spec(F, G));
}

SpectralField zeros_like(const SpectralField& F) {
    SpectralField z(F.n, F.N, F.c);
    z.k_max = F.k_max;
    return z;
}

void axpy(SpectralField& y, double a, const SpectralField& x) {
    require(y.data.size() == x.data.size(), "axpy: shape mismatch");
    for (size_t i = 0; i < y.data.size(); ++i) y.data[i] += a * x.data[i];
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
    require(a.data.size() == b.data.size(), "operator-: shape mismatch");
    SpectralField out = a;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
    return out;
}

double l2_dist(const SpectralField& a, const SpectralField& b) {
    require(a.data.size() == b.data.size(), "l2_dist: shape mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) s += std::norm(a.data[i] - b.data[i]);
    return std::sqrt(s);
}

SpectralField component(const SpectralField& F, int comp) {
    require(comp >= 0 && comp < F.c, "component: index out of range");
    SpectralField out(F.n, F.N, 1);
    out.k_max = F.k_max;
    long P = F.points();
    std::copy(F.data.begin() + comp * P, F.data.begin() + (comp + 1) * P, out.data.begin());
    return out;
}

}  // namespace bns
