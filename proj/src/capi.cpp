#include "besovns.h"

#include <cstring>
#include <filesystem>
#include <sstream>

#include "bns/flows.hpp"
#include "bns/io.hpp"
#include "bns/norms.hpp"
#include "bns/selftest.hpp"
#include "bns/solver.hpp"

using namespace bns;

namespace {

thread_local std::string g_last_error;

int set_error(int code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

template <typename Fn>
int guard(Fn&& fn) {
    try {
        fn();
        return BNS_OK;
    } catch (const invalid_input& e) {
        return set_error(BNS_EINVAL, e.what());
    } catch (const numeric_error& e) {
        return set_error(BNS_ENUMERIC, e.what());
    } catch (const std::exception& e) {
        return set_error(BNS_EINVAL, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

SpaceParams to_params(const bns_space_params* p, int n) {
    SpaceParams sp;
    if (!p) {
        sp.s = static_cast<double>(n) / sp.p - 1.0;
        return sp;
    }
    sp.p = p->p;
    sp.q = p->q;
    sp.r = p->r;
    sp.m = p->m;
    sp.mprime = p->mprime;
    if (p->s_is_set) sp.s = p->s;
    return sp;
}

}  // namespace

struct bns_field {
    bool spectral;
    GridField grid;
    SpectralField spec;

    SpectralField as_spectral() const { return spectral ? spec : forward_transform(grid); }
    GridField as_grid() const { return spectral ? inverse_transform(spec) : grid; }
};

struct bns_wavelet {
    WaveletSystem W;
};

struct bns_coeffs {
    int n, J, j_max;
    std::vector<WaveletCoeffs> comps;
};

struct bns_traj {
    Trajectory T;
};

extern "C" {

const char* bns_version(void) { return "besovns 1.0.0"; }

const char* bns_last_error(void) { return g_last_error.c_str(); }

void bns_free_string(char* s) { std::free(s); }

/* -- fields ---------------------------------------------------------------- */

int bns_field_load(const char* path, bns_field** out) {
    return guard([&] {
        require(path && out, "null argument");
        LoadedField lf = read_bnf1(path);
        auto* f = new bns_field{lf.spectral, std::move(lf.grid), std::move(lf.spec)};
        *out = f;
    });
}

int bns_field_save(const bns_field* f, const char* path) {
    return guard([&] {
        require(f && path, "null argument");
        if (f->spectral) write_bnf1(path, f->spec);
        else write_bnf1(path, f->grid);
    });
}

void bns_field_free(bns_field* f) { delete f; }

int bns_field_info(const bns_field* f, int* n, long* N, int* c, int* spectral) {
    return guard([&] {
        require(f != nullptr, "null field");
        int fn = f->spectral ? f->spec.n : f->grid.n;
        long fN = f->spectral ? f->spec.N : f->grid.N;
        int fc = f->spectral ? f->spec.c : f->grid.c;
        if (n) *n = fn;
        if (N) *N = fN;
        if (c) *c = fc;
        if (spectral) *spectral = f->spectral ? 1 : 0;
    });
}

int bns_field_clone(const bns_field* f, bns_field** out) {
    return guard([&] {
        require(f && out, "null argument");
        *out = new bns_field(*f);
    });
}

int bns_field_scale(bns_field* f, double factor) {
    return guard([&] {
        require(f != nullptr, "null field");
        if (f->spectral)
            for (cplx& z : f->spec.data) z *= factor;
        else
            for (double& v : f->grid.data) v *= factor;
    });
}

int bns_field_l2(const bns_field* f, double* out) {
    return guard([&] {
        require(f && out, "null argument");
        *out = f->spectral ? f->spec.l2() : f->grid.l2();
    });
}

int bns_field_divergence(const bns_field* f, double* out) {
    return guard([&] {
        require(f && out, "null argument");
        *out = f->as_spectral().divergence_rel();
    });
}

int bns_field_to_spectral(const bns_field* f, bns_field** out) {
    return guard([&] {
        require(f && out, "null argument");
        *out = new bns_field{true, {}, f->as_spectral()};
    });
}

int bns_field_to_grid(const bns_field* f, bns_field** out) {
    return guard([&] {
        require(f && out, "null argument");
        *out = new bns_field{false, f->as_grid(), {}};
    });
}

int bns_field_taylor_green(long N, bns_field** out) {
    return guard([&] {
        require(out != nullptr, "null argument");
        *out = new bns_field{true, {}, taylor_green_field(N)};
    });
}

int bns_field_random_divfree(int n, long N, unsigned long long seed, long kmax,
                             double amplitude, bns_field** out) {
    return guard([&] {
        require(out != nullptr, "null argument");
        *out = new bns_field{true, {}, random_divfree_field(n, N, seed, kmax, amplitude)};
    });
}

int bns_field_random_scalar(int n, long N, unsigned long long seed, long kmax,
                            double amplitude, bns_field** out) {
    return guard([&] {
        require(out != nullptr, "null argument");
        *out = new bns_field{true, {}, random_scalar_field(n, N, seed, kmax, amplitude)};
    });
}

/* -- wavelets and norms ------------------------------------------------------ */

int bns_wavelet_build(int n, int J, const char* profile, bns_wavelet** out) {
    return guard([&] {
        require(out != nullptr, "null argument");
        Profile p = profile && *profile ? profile_from_string(profile) : Profile::SmoothExp;
        *out = new bns_wavelet{build_system(n, J, p)};
    });
}

void bns_wavelet_free(bns_wavelet* w) { delete w; }

int bns_analyze(const bns_field* f, const bns_wavelet* w, bns_coeffs** out) {
    return guard([&] {
        require(f && w && out, "null argument");
        SpectralField F = f->as_spectral();
        auto comps = analyze_components(F, w->W);
        *out = new bns_coeffs{w->W.n, w->W.J, w->W.j_max, std::move(comps)};
    });
}

int bns_synthesize(const bns_coeffs* c, const bns_wavelet* w, bns_field** out) {
    return guard([&] {
        require(c && w && out, "null argument");
        require(c->comps.size() == 1, "synthesize: scalar coefficient set expected");
        *out = new bns_field{true, {}, synthesize(c->comps[0], w->W)};
    });
}

int bns_coeffs_save(const bns_coeffs* c, const char* path) {
    return guard([&] {
        require(c && path, "null argument");
        write_bnc1(path, c->comps.at(0));
    });
}

int bns_coeffs_load(const char* path, bns_coeffs** out) {
    return guard([&] {
        require(path && out, "null argument");
        WaveletCoeffs c = read_bnc1(path);
        auto* h = new bns_coeffs{c.n, c.J, c.j_max, {}};
        h->comps.push_back(std::move(c));
        *out = h;
    });
}

void bns_coeffs_free(bns_coeffs* c) { delete c; }

int bns_norms_json(const bns_coeffs* c, const bns_space_params* p, char** json_out) {
    return guard([&] {
        require(c && json_out, "null argument");
        SpaceParams sp = to_params(p, c->n);
        std::ostringstream os;
        os << "{\"besov\":" << fmt(besov_norm(c->comps, sp))
           << ",\"besov_lorentz\":" << fmt(besov_lorentz_norm(c->comps, sp));
        bool tll_ok = std::isfinite(sp.q) && std::isfinite(sp.r) && sp.q > 1.0 && sp.r > 1.0 &&
                      c->comps.size() == 1;
        if (tll_ok)
            os << ",\"tll\":" << fmt(triebel_lizorkin_lorentz_norm(c->comps[0], sp));
        else
            os << ",\"tll\":null";
        os << ",\"per_band\":[";
        for (int j = 0; j <= c->j_max; ++j) {
            if (j) os << ",";
            BandProfile b = band_profile(c->comps, j);
            os << "{\"j\":" << j << ",\"weak\":" << fmt(weak_lorentz_norm(b, sp.p, sp.r))
               << ",\"contribution\":"
               << fmt(pow2d(j * sp.smoothness(c->n)) * weak_lorentz_norm(b, sp.p, sp.r)) << "}";
        }
        os << "]}";
        *json_out = dup_string(os.str());
    });
}

/* -- trajectories ------------------------------------------------------------ */

int bns_heat_flow(const bns_field* f, const double* times, int ntimes, bns_traj** out) {
    return guard([&] {
        require(f && times && out && ntimes > 0, "null argument");
        std::vector<double> ts(times, times + ntimes);
        *out = new bns_traj{heat_flow(f->as_spectral(), ts)};
    });
}

int bns_heat_flow_rings(const bns_field* f, int ring_lo, int ring_hi, int samples_per_ring,
                        bns_traj** out) {
    return guard([&] {
        require(f && out, "null argument");
        std::vector<double> ts = TimeRing::sample_times(ring_lo, ring_hi, samples_per_ring);
        *out = new bns_traj{heat_flow(f->as_spectral(), ts)};
    });
}

int bns_traj_load(const char* manifest_path, bns_traj** out) {
    return guard([&] {
        require(manifest_path && out, "null argument");
        auto entries = read_manifest(manifest_path);
        Trajectory T;
        for (const auto& e : entries) {
            SpectralField F = read_bnf1_spectral(e.path);
            if (e.t == 0.0) T.set_anchor(std::move(F));
            else T.push(e.t, std::move(F));
        }
        T.validate();
        *out = new bns_traj{std::move(T)};
    });
}

int bns_traj_save(const bns_traj* t, const char* manifest_path, const char* prefix) {
    return guard([&] {
        require(t && manifest_path, "null argument");
        std::filesystem::path mpath(manifest_path);
        std::filesystem::path dir = mpath.parent_path();
        if (!dir.empty()) std::filesystem::create_directories(dir);
        std::string pre = prefix && *prefix ? prefix : "field";
        std::vector<ManifestEntry> entries;
        int idx = 0;
        if (t->T.has_anchor) {
            std::string p = (dir / (pre + "_anchor.bnf1")).string();
            write_bnf1(p, t->T.anchor);
            entries.push_back({0.0, p});
        }
        for (const auto& s : t->T.samples) {
            std::string p = (dir / (pre + "_" + std::to_string(idx++) + ".bnf1")).string();
            write_bnf1(p, s.F);
            entries.push_back({s.t, p});
        }
        write_manifest(manifest_path, entries);
    });
}

void bns_traj_free(bns_traj* t) { delete t; }

int bns_traj_count(const bns_traj* t, int* out) {
    return guard([&] {
        require(t && out, "null argument");
        *out = static_cast<int>(t->T.samples.size());
    });
}

int bns_traj_time(const bns_traj* t, int i, double* out) {
    return guard([&] {
        require(t && out, "null argument");
        require(i >= 0 && i < static_cast<int>(t->T.samples.size()), "index out of range");
        *out = t->T.samples[i].t;
    });
}

int bns_traj_field(const bns_traj* t, int i, bns_field** out) {
    return guard([&] {
        require(t && out, "null argument");
        require(i >= 0 && i < static_cast<int>(t->T.samples.size()), "index out of range");
        *out = new bns_field{true, {}, t->T.samples[i].F};
    });
}

int bns_traj_microlocal(const bns_traj* t, const bns_space_params* p, double* out) {
    return guard([&] {
        require(t && out, "null argument");
        WaveletSystem W = build_system(t->T.n, ilog2(t->T.N));
        *out = microlocal_norm(t->T, W, to_params(p, t->T.n));
    });
}

int bns_traj_norms_json(const bns_traj* t, const bns_space_params* p, char** json_out) {
    return guard([&] {
        require(t && json_out, "null argument");
        WaveletSystem W = build_system(t->T.n, ilog2(t->T.N));
        SpaceParams sp = to_params(p, t->T.n);
        MicrolocalReport rep = microlocal_norm_report(t->T, W, sp);
        std::ostringstream os;
        os << "{\"microlocal\":" << fmt(rep.norm) << ",\"per_ring\":[";
        for (size_t i = 0; i < rep.per_ring.size(); ++i) {
            if (i) os << ",";
            os << "{\"j_t\":" << rep.per_ring[i].first
               << ",\"value\":" << fmt(rep.per_ring[i].second) << "}";
        }
        os << "],\"decay\":[";
        auto rows = decay_profile(t->T, W, sp);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i) os << ",";
            os << "{\"j\":" << rows[i].j << ",\"j_t\":" << rows[i].j_t
               << ",\"t\":" << fmt(rows[i].t)
               << ",\"detail_weighted\":" << fmt(rows[i].detail_weighted)
               << ",\"scaling_sup\":" << fmt(rows[i].scaling_sup) << "}";
        }
        os << "]";
        if (t->T.has_anchor) {
            DecayFit fit = coeff_decay_check(t->T, W);
            os << ",\"fit\":{\"c_tilde\":" << fmt(fit.c_tilde)
               << ",\"C_damped\":" << fmt(fit.C_damped)
               << ",\"C_undamped\":" << fmt(fit.C_undamped)
               << ",\"pass\":" << (fit.pass ? "true" : "false") << "}";
        }
        os << "}";
        *json_out = dup_string(os.str());
    });
}

/* -- flows -------------------------------------------------------------------- */

int bns_flow_apply(const bns_traj* u, const bns_traj* v, double t, int flow, int op,
                   const int axes[3], int quad_samples, bns_field** out, char** diag_json_out) {
    return guard([&] {
        require(u && v && out && axes, "null argument");
        QuadOptions opt;
        if (quad_samples >= 2) opt.samples_per_ring = quad_samples;
        std::array<int, 3> ax{axes[0], axes[1], axes[2]};
        DuhamelKind kind = op == BNS_OP_TRIPLE ? DuhamelKind::TripleRiesz : DuhamelKind::Grad;

        WaveletSystem W = build_system(u->T.n, ilog2(u->T.N));
        auto run = [&](const QuadOptions& o) {
            if (flow == BNS_FLOW_BILINEAR) return bilinear_B(u->T, v->T, t, o);
            return flow == BNS_FLOW_PARAPRODUCT ? paraproduct_flow(u->T, v->T, t, kind, ax, W, o)
                                                : couple_flow(u->T, v->T, t, kind, ax, W, o);
        };
        SpectralField result = run(opt);
        if (diag_json_out) {
            QuadOptions coarse = opt;
            coarse.samples_per_ring = std::max(2, opt.samples_per_ring / 2);
            SpectralField check = run(coarse);
            double quad_res = l2_dist(result, check) / std::max(result.l2(), 1e-30);

            std::ostringstream os;
            os << "{\"t\":" << fmt(t) << ",\"l2\":" << fmt(result.l2())
               << ",\"quad_residual\":" << fmt(quad_res);
            if (flow == BNS_FLOW_BILINEAR) {
                os << ",\"divergence\":" << fmt(result.divergence_rel());
            } else {
                // Fourier-support check of the product parts at s = t against
                // the stated rings, worst band.
                SpectralField ut = u->T.interpolate(t);
                SpectralField vt = v->T.interpolate(t);
                double worst = 0.0;
                for (int j = 0; j <= W.j_max; ++j) {
                    if (flow == BNS_FLOW_PARAPRODUCT) {
                        SpectralField Pu = project_band(ut, W, BandProjection::P, j - 2);
                        for (int e = 1; e < (1 << W.n); ++e) {
                            SpectralField Qv = project_band(vt, W, BandProjection::Qeps, j, e);
                            SpectralField prod = dealiased_product_spec(Pu, Qv);
                            double tot = sq(prod.l2());
                            if (tot <= 0.0) continue;
                            worst = std::max(
                                worst, support_ring_energy(prod, j, SupportRing::Product, e) / tot);
                        }
                    } else {
                        SpectralField Qu = project_band(ut, W, BandProjection::Q, j);
                        SpectralField Qv = project_band(vt, W, BandProjection::Q, j);
                        SpectralField prod = dealiased_product_spec(Qu, Qv);
                        double tot = sq(prod.l2());
                        if (tot <= 0.0) continue;
                        worst = std::max(
                            worst, support_ring_energy(prod, j, SupportRing::CoupleProduct) / tot);
                    }
                }
                os << ",\"support_out_of_ring\":" << fmt(worst);
            }
            os << "}";
            *diag_json_out = dup_string(os.str());
        }
        *out = new bns_field{true, {}, std::move(result)};
    });
}

/* -- solver -------------------------------------------------------------------- */

namespace {

SolverConfig to_config(const bns_solver_config* cfg) {
    require(cfg != nullptr, "null solver config");
    SolverConfig c;
    c.n = cfg->n;
    c.J = cfg->J;
    c.ring_lo = cfg->ring_lo;
    c.ring_hi = cfg->ring_hi;
    c.samples_per_ring = cfg->samples_per_ring;
    c.quad_samples = cfg->quad_samples;
    c.max_iter = cfg->max_iter;
    c.tol = cfg->tol;
    c.space = to_params(&cfg->space, cfg->n);
    return c;
}

std::string report_jsonl(const IterationReport& rep) {
    std::ostringstream os;
    for (const auto& row : rep.rows) {
        os << "{\"tau\":" << row.tau << ",\"micro_norm\":" << fmt(row.micro_norm)
           << ",\"l2_max\":" << fmt(row.l2_max) << ",\"diff_micro\":" << fmt(row.diff_micro)
           << ",\"diff_l2\":" << fmt(row.diff_l2) << ",\"residual\":" << fmt(row.residual)
           << "}\n";
    }
    os << "{\"converged\":" << (rep.converged ? "true" : "false")
       << ",\"non_contraction\":" << (rep.non_contraction ? "true" : "false")
       << ",\"contraction_ratio\":" << fmt(rep.contraction_ratio) << "}\n";
    return os.str();
}

}  // namespace

int bns_picard_solve(const bns_field* f, const bns_solver_config* cfg, bns_traj** out,
                     char** report_jsonl_out, int* converged_out) {
    return guard([&] {
        require(f && cfg && out, "null argument");
        PicardResult r = picard_solve(f->as_spectral(), to_config(cfg));
        if (report_jsonl_out) *report_jsonl_out = dup_string(report_jsonl(r.report));
        if (converged_out) *converged_out = r.report.converged ? 1 : 0;
        if (r.report.non_contraction)
            fail_numeric("picard iteration is not contracting; report retained");
        *out = new bns_traj{std::move(r.u)};
    });
}

int bns_rk4_reference(const bns_field* f, const bns_solver_config* cfg, bns_traj** out) {
    return guard([&] {
        require(f && cfg && out, "null argument");
        *out = new bns_traj{rk4_reference(f->as_spectral(), to_config(cfg))};
    });
}

int bns_mild_residual(const bns_traj* u, const bns_field* f, int quad_samples, double* out) {
    return guard([&] {
        require(u && f && out, "null argument");
        QuadOptions opt;
        if (quad_samples >= 2) opt.samples_per_ring = quad_samples;
        *out = mild_residual(u->T, f->as_spectral(), opt);
    });
}

int bns_oracle_compare_csv(const bns_field* f, const bns_solver_config* cfg, char** csv_out) {
    return guard([&] {
        require(f && cfg && csv_out, "null argument");
        SolverConfig c = to_config(cfg);
        SpectralField datum = f->as_spectral();
        PicardResult pic = picard_solve(datum, c);
        Trajectory ref = rk4_reference(datum, c);
        std::ostringstream os;
        os << "t,l2_picard,l2_rk4,rel_discrepancy\n";
        for (size_t i = 0; i < pic.u.samples.size(); ++i) {
            const auto& a = pic.u.samples[i];
            const auto& b = ref.samples[i];
            double denom = std::max(b.F.l2(), 1e-30);
            os << fmt(a.t) << "," << fmt(a.F.l2()) << "," << fmt(b.F.l2()) << ","
               << fmt(l2_dist(a.F, b.F) / denom) << "\n";
        }
        *csv_out = dup_string(os.str());
    });
}

int bns_selftest(char** json_out) {
    SelftestResult r = selftest();
    if (json_out) *json_out = dup_string(r.json);
    if (!r.ok) return set_error(BNS_ENUMERIC, "selftest failed");
    return BNS_OK;
}

}  // extern "C"
