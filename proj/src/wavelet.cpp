#include "bns/wavelet.hpp"

#include <algorithm>

#include "bns/fft.hpp"

namespace bns {

namespace {

double nu_smooth(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double a = std::exp(-1.0 / x);
    double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

double nu_poly(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * x * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x);
}

double nu(Profile p, double x) {
    return p == Profile::SmoothExp ? nu_smooth(x) : nu_poly(x);
}

}  // namespace

Profile profile_from_string(const std::string& name) {
    if (name == "smooth" || name == "smooth-exp") return Profile::SmoothExp;
    if (name == "poly" || name == "polynomial") return Profile::Poly;
    fail_invalid("unknown window profile: " + name);
}

std::string profile_name(Profile p) { return p == Profile::SmoothExp ? "smooth" : "poly"; }

// The transition is shaped as cos(pi/2 nu); together with nu(x)+nu(1-x)=1
// this gives phi0^2(xi) + phi0^2(2 pi - xi) = 1 on the transition, the
// identity both the orthonormality of translates and the paper's
// phi^2(xi) + phi^2(2 pi - xi) = 1 rest on.
double phi0_hat(Profile p, double xi) {
    double a = std::abs(xi);
    if (a <= kTwoPi / 3.0) return 1.0;
    if (a >= 2.0 * kTwoPi / 3.0) return 0.0;
    return std::cos(0.5 * kPi * nu(p, 3.0 * a / kTwoPi - 1.0));
}

double phi_hat(Profile p, double xi) {
    double lo = phi0_hat(p, 0.5 * xi);
    double hi = phi0_hat(p, xi);
    return std::sqrt(std::max(0.0, lo * lo - hi * hi));
}

double window_scaling(Profile p, int level, long kappa) {
    return phi0_hat(p, kTwoPi * static_cast<double>(kappa) / pow2d(level));
}

double window_wavelet_mod(Profile p, int band, long kappa) {
    return phi_hat(p, kTwoPi * static_cast<double>(kappa) / pow2d(band));
}

cplx window_wavelet(Profile p, int band, long kappa) {
    double mod = window_wavelet_mod(p, band, kappa);
    if (mod == 0.0) return cplx(0.0, 0.0);
    double phase = -kPi * static_cast<double>(kappa) / pow2d(band);
    return std::polar(mod, phase);
}

double WaveletSystem::scaling(int level, long kappa) const {
    if (level > J) level = J;
    if (level < 0) level = 0;
    if (std::labs(kappa) > N / 2) return window_scaling(profile, level, kappa);
    return w0[level][kappa + N / 2];
}

double WaveletSystem::wavelet_mod(int band, long kappa) const {
    if (std::labs(kappa) > N / 2) return window_wavelet_mod(profile, band, kappa);
    return w1[band][kappa + N / 2];
}

cplx WaveletSystem::wavelet(int band, long kappa) const {
    double mod = wavelet_mod(band, kappa);
    if (mod == 0.0) return cplx(0.0, 0.0);
    return std::polar(mod, -kPi * static_cast<double>(kappa) / pow2d(band));
}

WaveletSystem build_system(int n, int J, Profile profile) {
    require(n >= 1 && n <= 3, "build_system: dimension must be 1, 2 or 3");
    require(J >= 4, "build_system: J must be at least 4");

    WaveletSystem W;
    W.n = n;
    W.J = J;
    W.j_max = J - 1;
    W.N = 1L << J;
    W.k_max = default_kmax(W.N);
    W.profile = profile;

    long half = W.N / 2;
    W.w0.assign(J + 1, std::vector<double>(W.N + 1, 0.0));
    W.w1.assign(J, std::vector<double>(W.N + 1, 0.0));
    for (long kappa = -half; kappa <= half; ++kappa) {
        for (int l = 0; l <= J; ++l) W.w0[l][kappa + half] = window_scaling(profile, l, kappa);
        for (int j = 0; j < J; ++j) W.w1[j][kappa + half] = window_wavelet_mod(profile, j, kappa);
    }

    // Self-check the window identities on a dense sample of the transition.
    for (int i = 0; i <= 4096; ++i) {
        double xi = kTwoPi / 3.0 + (kTwoPi / 3.0) * i / 4096.0;
        double p0 = phi0_hat(profile, xi);
        if (p0 < 0.0 || p0 > 1.0) fail_invalid("build_system: window leaves [0,1]");
        double a = phi_hat(profile, xi);
        double b = phi_hat(profile, kTwoPi - xi);
        if (std::abs(a * a + b * b - 1.0) > 1e-12)
            fail_invalid("build_system: profile fails phi^2(xi) + phi^2(2pi - xi) = 1");
    }
    // Partition of unity across the ladder, per axis, on the admissible range.
    for (long kappa = 1; kappa <= W.k_max; ++kappa) {
        double s = sq(W.w0[0][kappa + half]);
        for (int j = 0; j <= W.j_max; ++j) s += sq(W.w1[j][kappa + half]);
        if (std::abs(s - 1.0) > 1e-12) fail_invalid("build_system: partition of unity violated");
    }
    return W;
}

WaveletCoeffs::WaveletCoeffs(int n_, int J_, int j_max_) : n(n_), J(J_), j_max(j_max_) {
    detail.resize(j_max + 1);
    for (int j = 0; j <= j_max; ++j) detail[j].assign(eps_count() * band_size(j), 0.0);
}

double WaveletCoeffs::sumsq() const {
    double s = scaling0 * scaling0;
    for (const auto& band : detail)
        for (double v : band) s += v * v;
    return s;
}

namespace {

// Per-axis window factors at one frequency for one band.
struct AxisFactors {
    cplx f1;    // wavelet window with phase
    double f0;  // scaling window
};

void check_scalar_admissible(const SpectralField& F) {
    require(F.c == 1, "wavelet ops take scalar fields; analyze components separately");
    double tol = 1e-10 * (1.0 + F.l2());
    require(F.admissible(tol), "field spectrum exceeds the dealias bound");
}

}  // namespace

WaveletCoeffs analyze(const SpectralField& F, const WaveletSystem& W) {
    check_scalar_admissible(F);
    require(F.n == W.n && F.N == W.N, "analyze: field does not match the wavelet system");

    WaveletCoeffs out(W.n, W.J, W.j_max);
    out.scaling0 = F.data[0].real();

    const long K = W.k_max;
    const int n = W.n;
    const int epss = (1 << n) - 1;

    for (int j = 0; j <= W.j_max; ++j) {
        const long M = 1L << j;
        const long Mn = out.band_size(j);
        std::vector<std::vector<cplx>> acc(epss, std::vector<cplx>(Mn, cplx(0, 0)));

        std::array<long, 3> kap{0, 0, 0};
        std::array<AxisFactors, 3> ax{};
        // Loop admissible frequencies; accumulate folded window-weighted modes.
        std::function<void(int)> walk = [&](int d) {
            if (d == n) {
                cplx u = F.mode(0, kap);
                if (u == cplx(0.0, 0.0)) return;
                std::array<long, 3> r{0, 0, 0};
                for (int i = 0; i < n; ++i) r[i] = ((kap[i] % M) + M) % M;
                long rf = flat_index(n, M, r);
                for (int e = 1; e <= epss; ++e) {
                    cplx w(1.0, 0.0);
                    bool zero = false;
                    for (int i = 0; i < n; ++i) {
                        if (e & (1 << i)) {
                            if (ax[i].f1 == cplx(0.0, 0.0)) { zero = true; break; }
                            w *= ax[i].f1;
                        } else {
                            if (ax[i].f0 == 0.0) { zero = true; break; }
                            w *= ax[i].f0;
                        }
                    }
                    if (!zero) acc[e - 1][rf] += u * std::conj(w);
                }
                return;
            }
            for (long kk = -K; kk <= K; ++kk) {
                double f0 = W.scaling(j, kk);
                double f1m = W.wavelet_mod(j, kk);
                if (f0 == 0.0 && f1m == 0.0) continue;
                ax[d].f0 = f0;
                ax[d].f1 = f1m == 0.0 ? cplx(0.0, 0.0)
                                      : std::polar(f1m, -kPi * static_cast<double>(kk) / pow2d(j));
                kap[d] = kk;
                walk(d + 1);
            }
        };
        walk(0);

        double scale = pow2d(-0.5 * n * j);
        for (int e = 1; e <= epss; ++e) {
            fft_inplace(n, M, acc[e - 1].data(), +1);
            for (long i = 0; i < Mn; ++i) out.d(j, e, i) = scale * acc[e - 1][i].real();
        }
    }
    return out;
}

WaveletCoeffs analyze(const GridField& f, const WaveletSystem& W) {
    return analyze(forward_transform(f), W);
}

std::vector<WaveletCoeffs> analyze_components(const SpectralField& F, const WaveletSystem& W) {
    std::vector<WaveletCoeffs> out;
    out.reserve(F.c);
    for (int comp = 0; comp < F.c; ++comp) out.push_back(analyze(component(F, comp), W));
    return out;
}

SpectralField synthesize(const WaveletCoeffs& c, const WaveletSystem& W) {
    require(c.n == W.n && c.J == W.J && c.j_max == W.j_max,
            "synthesize: coefficient shape does not match the wavelet system");
    SpectralField F(W.n, W.N, 1);
    F.data[0] = cplx(c.scaling0, 0.0);

    const long K = W.k_max;
    const int n = W.n;
    const int epss = (1 << n) - 1;

    for (int j = 0; j <= c.j_max; ++j) {
        const long M = 1L << j;
        const long Mn = c.band_size(j);
        std::vector<std::vector<cplx>> spec(epss, std::vector<cplx>(Mn));
        for (int e = 1; e <= epss; ++e) {
            for (long i = 0; i < Mn; ++i) spec[e - 1][i] = cplx(c.d(j, e, i), 0.0);
            fft_inplace(n, M, spec[e - 1].data(), -1);
        }

        double scale = pow2d(-0.5 * n * j);
        std::array<long, 3> kap{0, 0, 0};
        std::array<AxisFactors, 3> ax{};
        std::function<void(int)> walk = [&](int d) {
            if (d == n) {
                std::array<long, 3> r{0, 0, 0};
                for (int i = 0; i < n; ++i) r[i] = ((kap[i] % M) + M) % M;
                long rf = flat_index(n, M, r);
                cplx add(0.0, 0.0);
                for (int e = 1; e <= epss; ++e) {
                    cplx w(1.0, 0.0);
                    bool zero = false;
                    for (int i = 0; i < n; ++i) {
                        if (e & (1 << i)) {
                            if (ax[i].f1 == cplx(0.0, 0.0)) { zero = true; break; }
                            w *= ax[i].f1;
                        } else {
                            if (ax[i].f0 == 0.0) { zero = true; break; }
                            w *= ax[i].f0;
                        }
                    }
                    if (!zero) add += w * spec[e - 1][rf];
                }
                F.mode(0, kap) += scale * add;
                return;
            }
            for (long kk = -K; kk <= K; ++kk) {
                double f0 = W.scaling(j, kk);
                double f1m = W.wavelet_mod(j, kk);
                if (f0 == 0.0 && f1m == 0.0) continue;
                ax[d].f0 = f0;
                ax[d].f1 = f1m == 0.0 ? cplx(0.0, 0.0)
                                      : std::polar(f1m, -kPi * static_cast<double>(kk) / pow2d(j));
                kap[d] = kk;
                walk(d + 1);
            }
        };
        walk(0);
    }
    return F;
}

WaveletCoeffs index_shift(const WaveletCoeffs& c, int i) {
    require(i >= 0, "index_shift: shift must be non-negative");
    WaveletCoeffs out(c.n, c.J, c.j_max);
    out.scaling0 = 0.0;  // base-scale part has no shifted image
    double factor = pow2d(i * (1.0 - 0.5 * c.n));
    for (int j = 0; j + i <= c.j_max; ++j) {
        long M = 1L << j;
        for (int e = 1; e <= (1 << c.n) - 1; ++e) {
            for (LatticeIter it(c.n, M); !it.done; it.next()) {
                long src = flat_index(c.n, M, it.idx);
                long dst = flat_index(c.n, 1L << (j + i), it.idx);
                out.d(j + i, e, dst) = factor * c.d(j, e, src);
            }
        }
    }
    return out;
}

SpectralField project_band(const SpectralField& F, const WaveletSystem& W,
                           BandProjection kind, int j, int eps) {
    check_scalar_admissible(F);
    require(F.n == W.n && F.N == W.N, "project_band: field does not match the wavelet system");
    if (kind != BandProjection::P)
        require(j >= 0 && j <= W.j_max, "project_band: band index out of range");

    if (kind == BandProjection::P) {
        if (j >= W.J) return F;  // V_j contains the whole admissible spectrum
        if (j < 0) j = 0;        // levels below the base hold only the mean
    }
    if (kind == BandProjection::Qeps)
        require(eps >= 1 && eps < (1 << W.n), "project_band: eps pattern out of range");

    const long K = W.k_max;
    const int n = W.n;
    const long M = 1L << j;
    const long Mn = ipow(M, n);

    int e_lo = 0, e_hi = 0;
    if (kind == BandProjection::P) { e_lo = 0; e_hi = 0; }
    else if (kind == BandProjection::Qeps) { e_lo = eps; e_hi = eps; }
    else { e_lo = 1; e_hi = (1 << n) - 1; }

    SpectralField out(W.n, W.N, 1);
    out.k_max = F.k_max;

    for (int e = e_lo; e <= e_hi; ++e) {
        std::vector<cplx> acc(Mn, cplx(0.0, 0.0));
        std::array<long, 3> kap{0, 0, 0};
        std::array<cplx, 3> wf{};
        std::function<void(int, bool)> walk = [&](int d, bool fold_pass) {
            if (d == n) {
                std::array<long, 3> r{0, 0, 0};
                for (int i = 0; i < n; ++i) r[i] = ((kap[i] % M) + M) % M;
                long rf = flat_index(n, M, r);
                cplx w(1.0, 0.0);
                for (int i = 0; i < n; ++i) w *= wf[i];
                if (fold_pass)
                    acc[rf] += F.mode(0, kap) * std::conj(w);
                else
                    out.mode(0, kap) += w * acc[rf];
                return;
            }
            for (long kk = -K; kk <= K; ++kk) {
                cplx w;
                if (e & (1 << d)) {
                    double m = W.wavelet_mod(j, kk);
                    if (m == 0.0) continue;
                    w = std::polar(m, -kPi * static_cast<double>(kk) / pow2d(j));
                } else {
                    double m = W.scaling(j, kk);
                    if (m == 0.0) continue;
                    w = cplx(m, 0.0);
                }
                wf[d] = w;
                kap[d] = kk;
                walk(d + 1, fold_pass);
            }
        };
        walk(0, true);
        walk(0, false);
    }
    return out;
}

std::vector<double> scaling_coeffs(const SpectralField& F, const WaveletSystem& W, int level) {
    check_scalar_admissible(F);
    require(level >= 0 && level <= W.J, "scaling_coeffs: level out of range");
    const long K = W.k_max;
    const int n = W.n;
    const long M = 1L << level;
    const long Mn = ipow(M, n);

    std::vector<cplx> acc(Mn, cplx(0.0, 0.0));
    std::array<long, 3> kap{0, 0, 0};
    std::array<double, 3> wf{};
    std::function<void(int)> walk = [&](int d) {
        if (d == n) {
            std::array<long, 3> r{0, 0, 0};
            for (int i = 0; i < n; ++i) r[i] = ((kap[i] % M) + M) % M;
            double w = 1.0;
            for (int i = 0; i < n; ++i) w *= wf[i];
            acc[flat_index(n, M, r)] += F.mode(0, kap) * w;
            return;
        }
        for (long kk = -K; kk <= K; ++kk) {
            double m = W.scaling(level, kk);
            if (m == 0.0) continue;
            wf[d] = m;
            kap[d] = kk;
            walk(d + 1);
        }
    };
    walk(0);

    fft_inplace(n, M, acc.data(), +1);
    double scale = pow2d(-0.5 * n * level);
    std::vector<double> out(Mn);
    for (long i = 0; i < Mn; ++i) out[i] = scale * acc[i].real();
    return out;
}

double wavelet_inner_product(const WaveletSystem& W, int eps, int j, const std::array<long, 3>& k,
                             int epsp, int jp, const std::array<long, 3>& kp) {
    const int n = W.n;
    // Window support per axis is |kappa| <= (4/3) 2^band.
    long K = (4 * (1L << std::max(j, jp))) / 3 + 2;
    std::array<long, 3> kap{0, 0, 0};
    cplx total(0.0, 0.0);
    std::function<void(int)> walk = [&](int d) {
        if (d == n) {
            cplx wa(1.0, 0.0), wb(1.0, 0.0);
            for (int i = 0; i < n; ++i) {
                wa *= (eps & (1 << i)) ? window_wavelet(W.profile, j, kap[i])
                                       : cplx(window_scaling(W.profile, j, kap[i]), 0.0);
                wb *= (epsp & (1 << i)) ? window_wavelet(W.profile, jp, kap[i])
                                        : cplx(window_scaling(W.profile, jp, kap[i]), 0.0);
            }
            if (wa == cplx(0.0, 0.0) || wb == cplx(0.0, 0.0)) return;
            double pha = 0.0, phb = 0.0;
            for (int i = 0; i < n; ++i) {
                pha += static_cast<double>(kap[i] * k[i]) / pow2d(j);
                phb += static_cast<double>(kap[i] * kp[i]) / pow2d(jp);
            }
            wa *= std::polar(1.0, -kTwoPi * pha);
            wb *= std::polar(1.0, -kTwoPi * phb);
            total += wa * std::conj(wb);
            return;
        }
        for (long kk = -K; kk <= K; ++kk) {
            kap[d] = kk;
            walk(d + 1);
        }
    };
    walk(0);
    double scale = pow2d(-0.5 * n * j) * pow2d(-0.5 * n * jp);
    return (scale * total).real();
}

double support_ring_energy(const SpectralField& F, int j, SupportRing kind, int eps) {
    const long twoj = 1L << j;
    double outside_energy = 0.0;
    long P = F.points();
    for (LatticeIter it(F.n, F.N); !it.done; it.next()) {
        bool outside = false;
        for (int d = 0; d < F.n; ++d) {
            long a = std::labs(F.freq(it.idx[d]));
            bool hi = (eps >> d) & 1;
            switch (kind) {
                case SupportRing::PLow:
                    if (6 * a > twoj) outside = true;
                    break;
                case SupportRing::QBand:
                    if (!hi && 3 * a > 2 * twoj) outside = true;
                    if (hi && (3 * a < twoj || 3 * a > 4 * twoj)) outside = true;
                    break;
                case SupportRing::Product:
                    if (!hi && 6 * a > 5 * twoj) outside = true;
                    if (hi && (6 * a < twoj || 2 * a > 3 * twoj)) outside = true;
                    break;
                case SupportRing::CoupleProduct:
                    if (3 * a > 8 * twoj) outside = true;
                    break;
            }
            if (outside) break;
        }
        if (!outside) continue;
        long flat = flat_index(F.n, F.N, it.idx);
        for (int comp = 0; comp < F.c; ++comp) outside_energy += std::norm(F.data[comp * P + flat]);
    }
    return outside_energy;
}

}  // namespace bns
