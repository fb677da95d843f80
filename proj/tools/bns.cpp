// bns: command-line front end for the besovns shared library.
//
// Subcommands: norm, heatflow, flow, solve, oracle-compare, selftest.
// Exit codes: 0 success, 1 validation error, 2 numerical failure.
// All numeric outputs are byte-stable for a fixed (argv, seed, inputs);
// wall-clock timing goes to stderr only.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "besovns.h"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliError {
    int code;
    std::string msg;
};

[[noreturn]] void die(int code, const std::string& msg) { throw CliError{code, msg}; }

void check(int rc) {
    if (rc == BNS_OK) return;
    die(rc == BNS_EINVAL ? 1 : 2, bns_last_error());
}

std::string take_string(char* s) {
    std::string out = s ? s : "";
    bns_free_string(s);
    return out;
}

struct FieldHandle {
    bns_field* p = nullptr;
    ~FieldHandle() { bns_field_free(p); }
};
struct WaveletHandle {
    bns_wavelet* p = nullptr;
    ~WaveletHandle() { bns_wavelet_free(p); }
};
struct CoeffsHandle {
    bns_coeffs* p = nullptr;
    ~CoeffsHandle() { bns_coeffs_free(p); }
};
struct TrajHandle {
    bns_traj* p = nullptr;
    ~TrajHandle() { bns_traj_free(p); }
};

// Shared option bundle resolved from defaults < config file < flags.
struct Options {
    // space params
    double p = 2.0, q = 2.0, r = 0.0, s = 0.0, m = 1.25, mprime = 0.25;
    bool r_inf = true, q_inf = false, s_set = false;
    // solver
    int n = 2, J = 6;
    std::string rings = "1:4";
    int S = 4, quad = 8, max_iter = 30;
    double tol = 1e-10;
    unsigned long long seed = 1;
    std::string datum = "taylor-green";
    std::string profile = "smooth";
    double amplitude = 0.0;
    long kmax = 0;
};

bns_space_params space_of(const Options& o) {
    bns_space_params sp;
    sp.p = o.p;
    sp.q = o.q_inf ? HUGE_VAL : o.q;
    sp.r = o.r_inf ? HUGE_VAL : o.r;
    sp.s = o.s;
    sp.s_is_set = o.s_set ? 1 : 0;
    sp.m = o.m;
    sp.mprime = o.mprime;
    return sp;
}

void parse_rings(const std::string& spec, int& lo, int& hi) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) die(1, "rings must be lo:hi, got " + spec);
    lo = std::stoi(spec.substr(0, colon));
    hi = std::stoi(spec.substr(colon + 1));
}

bns_solver_config solver_config_of(const Options& o) {
    bns_solver_config cfg;
    cfg.n = o.n;
    cfg.J = o.J;
    parse_rings(o.rings, cfg.ring_lo, cfg.ring_hi);
    cfg.samples_per_ring = o.S;
    cfg.quad_samples = o.quad;
    cfg.max_iter = o.max_iter;
    cfg.tol = o.tol;
    cfg.space = space_of(o);
    return cfg;
}

// Resolved run manifest embedded into every JSON output. No wall-clock here:
// outputs must be byte-identical across runs (timing goes to stderr).
json manifest_json(const std::string& command, const json& config,
                   const std::vector<std::string>& inputs,
                   const std::vector<std::string>& outputs, unsigned long long seed) {
    json m;
    m["command"] = command;
    m["config"] = config;
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    m["seed"] = seed;
    m["version"] = bns_version();
    return m;
}

json config_json(const Options& o) {
    json c;
    c["p"] = o.p;
    c["q"] = o.q_inf ? json("inf") : json(o.q);
    c["r"] = o.r_inf ? json("inf") : json(o.r);
    if (o.s_set) c["s"] = o.s;
    c["m"] = o.m;
    c["mprime"] = o.mprime;
    c["n"] = o.n;
    c["N"] = (1L << o.J);
    c["rings"] = o.rings;
    c["S"] = o.S;
    c["quad"] = o.quad;
    c["tol"] = o.tol;
    c["max_iter"] = o.max_iter;
    c["datum"] = o.datum;
    c["profile"] = o.profile;
    return c;
}

void write_text(const std::string& path, const std::string& body) {
    if (path.empty() || path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) die(1, "cannot write output file: " + path);
    os << body;
}

// JSON-lines emission with an optional CSV projection of selected columns.
void emit_report(const std::string& path, const json& manifest,
                 const std::vector<json>& records, const std::string& csv_columns) {
    std::ostringstream os;
    os << json{{"manifest", manifest}}.dump() << "\n";
    for (const auto& rec : records) os << rec.dump() << "\n";
    write_text(path, os.str());

    if (!csv_columns.empty() && !path.empty() && path != "-") {
        std::vector<std::string> cols;
        std::stringstream ss(csv_columns);
        std::string col;
        while (std::getline(ss, col, ',')) cols.push_back(col);
        std::ostringstream cs;
        for (size_t i = 0; i < cols.size(); ++i) cs << (i ? "," : "") << cols[i];
        cs << "\n";
        for (const auto& rec : records) {
            for (size_t i = 0; i < cols.size(); ++i) {
                cs << (i ? "," : "");
                if (rec.contains(cols[i])) cs << rec[cols[i]].dump();
            }
            cs << "\n";
        }
        fs::path csv_path = fs::path(path).replace_extension(".csv");
        write_text(csv_path.string(), cs.str());
    }
}

FieldHandle make_datum(const Options& o) {
    FieldHandle f;
    long N = 1L << o.J;
    long kmax = o.kmax > 0 ? o.kmax : N / 6;
    double amp = o.amplitude > 0.0 ? o.amplitude : 1.0;
    if (o.datum == "taylor-green") {
        if (o.n != 2) die(1, "taylor-green datum is 2D only");
        check(bns_field_taylor_green(N, &f.p));
        if (o.amplitude > 0.0) check(bns_field_scale(f.p, o.amplitude * std::sqrt(2.0)));
    } else if (o.datum == "random") {
        check(bns_field_random_divfree(o.n, N, o.seed, kmax, amp, &f.p));
    } else if (o.datum.rfind("file:", 0) == 0) {
        check(bns_field_load(o.datum.substr(5).c_str(), &f.p));
    } else {
        die(1, "datum must be taylor-green, random, or file:<path>");
    }
    return f;
}

void add_space_opts(CLI::App* cmd, Options& o) {
    cmd->add_option("--p", o.p, "Lebesgue exponent p");
    auto* qopt = cmd->add_option_function<std::string>(
        "--q",
        [&o](const std::string& v) {
            if (v == "inf") { o.q_inf = true; return; }
            o.q_inf = false;
            o.q = std::stod(v);
        },
        "summation exponent q (number or inf)");
    qopt->default_str("2");
    auto* ropt = cmd->add_option_function<std::string>(
        "--r",
        [&o](const std::string& v) {
            if (v == "inf") { o.r_inf = true; return; }
            o.r_inf = false;
            o.r = std::stod(v);
        },
        "Lorentz exponent r (number or inf)");
    ropt->default_str("inf");
    cmd->add_option_function<double>(
        "--s", [&o](const double& v) { o.s = v; o.s_set = true; },
        "smoothness s (default n/p - 1)");
    cmd->add_option("--m", o.m, "high-frequency decay exponent m");
    cmd->add_option("--mprime", o.mprime, "low-frequency exponent m'");
}

void add_solver_opts(CLI::App* cmd, Options& o) {
    cmd->add_option("--n", o.n, "spatial dimension");
    cmd->add_option_function<long>(
        "--N", [&o](const long& v) {
            int J = 0;
            while ((1L << J) < v) ++J;
            if ((1L << J) != v) die(1, "N must be a power of two");
            o.J = J;
        },
        "grid size per axis (power of two)");
    cmd->add_option("--rings", o.rings, "horizon rings lo:hi");
    cmd->add_option("--S", o.S, "stored samples per ring");
    cmd->add_option("--quad", o.quad, "quadrature nodes per ring");
    cmd->add_option("--tol", o.tol, "Picard stopping tolerance");
    cmd->add_option("--max_iter", o.max_iter, "Picard iteration cap");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--datum", o.datum, "taylor-green | random | file:<path>");
    cmd->add_option("--amplitude", o.amplitude, "datum amplitude (L2)");
    cmd->add_option("--kmax", o.kmax, "random datum spectrum bound");
}

// -- subcommand bodies --------------------------------------------------------

int run_norm(const Options& o, const std::string& in, const std::string& traj,
             const std::string& out_path, const std::string& cmdline) {
    std::vector<std::string> inputs;
    json result;
    bns_space_params sp = space_of(o);

    if (!in.empty()) {
        inputs.push_back(in);
        CoeffsHandle c;
        if (fs::path(in).extension() == ".bnc1") {
            check(bns_coeffs_load(in.c_str(), &c.p));
        } else {
            FieldHandle f;
            check(bns_field_load(in.c_str(), &f.p));
            int n = 0, comps = 0, spect = 0;
            long N = 0;
            check(bns_field_info(f.p, &n, &N, &comps, &spect));
            int J = 0;
            while ((1L << J) < N) ++J;
            WaveletHandle w;
            check(bns_wavelet_build(n, J, o.profile.c_str(), &w.p));
            check(bns_analyze(f.p, w.p, &c.p));
        }
        char* js = nullptr;
        check(bns_norms_json(c.p, &sp, &js));
        result = json::parse(take_string(js));
    }
    if (!traj.empty()) {
        inputs.push_back(traj);
        TrajHandle t;
        check(bns_traj_load(traj.c_str(), &t.p));
        char* js = nullptr;
        check(bns_traj_norms_json(t.p, &sp, &js));
        json tnorms = json::parse(take_string(js));
        result["microlocal"] = tnorms["microlocal"];
        result["per_ring"] = tnorms["per_ring"];
    }
    if (result.is_null()) die(1, "norm: need --in and/or --traj");
    result["manifest"] = manifest_json(cmdline, config_json(o), inputs,
                                       {out_path.empty() ? "-" : out_path}, o.seed);
    write_text(out_path, result.dump(2) + "\n");
    return 0;
}

int run_heatflow(const Options& o, const std::string& in, const std::string& outdir,
                 const std::string& prefix, const std::string& cmdline) {
    FieldHandle f;
    std::vector<std::string> inputs;
    if (!in.empty()) {
        check(bns_field_load(in.c_str(), &f.p));
        inputs.push_back(in);
    } else {
        f = make_datum(o);
    }
    int lo = 0, hi = 0;
    parse_rings(o.rings, lo, hi);
    TrajHandle t;
    check(bns_heat_flow_rings(f.p, lo, hi, o.S, &t.p));

    fs::create_directories(outdir);
    std::string manifest_path = (fs::path(outdir) / (prefix + ".manifest")).string();
    check(bns_traj_save(t.p, manifest_path.c_str(), prefix.c_str()));

    bns_space_params sp = space_of(o);
    char* js = nullptr;
    check(bns_traj_norms_json(t.p, &sp, &js));
    json diag = json::parse(take_string(js));
    diag["manifest"] = manifest_json(cmdline, config_json(o), inputs, {manifest_path}, o.seed);
    std::string report_path = (fs::path(outdir) / (prefix + "_decay.json")).string();
    write_text(report_path, diag.dump(2) + "\n");
    std::cerr << "heatflow: wrote " << manifest_path << " and " << report_path << "\n";
    return 0;
}

int run_flow(const Options& o, const std::string& u_path, const std::string& v_path,
             const std::string& kind, const std::string& op_name, std::vector<int> axes,
             double t, const std::string& out_path, const std::string& diag_path,
             const std::string& cmdline) {
    TrajHandle u, v;
    check(bns_traj_load(u_path.c_str(), &u.p));
    check(bns_traj_load(v_path.c_str(), &v.p));

    int flow = 0;
    if (kind == "paraproduct") flow = BNS_FLOW_PARAPRODUCT;
    else if (kind == "couple") flow = BNS_FLOW_COUPLE;
    else if (kind == "bilinear") flow = BNS_FLOW_BILINEAR;
    else die(1, "kind must be paraproduct, couple, or bilinear");

    int op = BNS_OP_GRAD;
    if (op_name == "triple") op = BNS_OP_TRIPLE;
    else if (op_name != "grad") die(1, "op must be grad or triple");

    while (axes.size() < 3) axes.push_back(1);
    int ax[3] = {axes[0], axes[1], axes[2]};

    FieldHandle out;
    char* diag_raw = nullptr;
    check(bns_flow_apply(u.p, v.p, t, flow, op, ax, o.quad, &out.p, &diag_raw));
    check(bns_field_save(out.p, out_path.c_str()));

    json diag = json::parse(take_string(diag_raw));
    bns_space_params sp = space_of(o);
    double mu = 0.0, mv = 0.0;
    check(bns_traj_microlocal(u.p, &sp, &mu));
    check(bns_traj_microlocal(v.p, &sp, &mv));
    diag["micro_u"] = mu;
    diag["micro_v"] = mv;
    diag["manifest"] =
        manifest_json(cmdline, config_json(o), {u_path, v_path}, {out_path}, o.seed);
    write_text(diag_path, diag.dump(2) + "\n");
    return 0;
}

int run_solve(const Options& o, const std::string& outdir, const std::string& csv_cols,
              const std::string& cmdline) {
    FieldHandle f = make_datum(o);
    bns_solver_config cfg = solver_config_of(o);

    TrajHandle u;
    char* report_raw = nullptr;
    int converged = 0;
    int rc = bns_picard_solve(f.p, &cfg, &u.p, &report_raw, &converged);
    std::string report = take_string(report_raw);
    fs::create_directories(outdir);
    std::string report_path = (fs::path(outdir) / "solve_report.jsonl").string();

    std::vector<json> records;
    std::istringstream rs(report);
    std::string line;
    while (std::getline(rs, line))
        if (!line.empty()) records.push_back(json::parse(line));

    std::string manifest_path = (fs::path(outdir) / "solution.manifest").string();
    std::vector<std::string> outputs{report_path};
    if (rc == BNS_OK) {
        check(bns_traj_save(u.p, manifest_path.c_str(), "u"));
        outputs.push_back(manifest_path);
        double res = 0.0;
        check(bns_mild_residual(u.p, f.p, o.quad, &res));
        records.push_back(json{{"final_mild_residual", res}, {"converged", converged != 0}});
    }
    emit_report(report_path, manifest_json(cmdline, config_json(o), {}, outputs, o.seed),
                records, csv_cols);
    if (rc != BNS_OK) die(2, bns_last_error());
    std::cerr << "solve: " << (converged ? "converged" : "iteration cap reached") << ", report "
              << report_path << "\n";
    return 0;
}

int run_oracle_compare(const Options& o, const std::string& out_path,
                       const std::string& cmdline) {
    FieldHandle f = make_datum(o);
    bns_solver_config cfg = solver_config_of(o);
    char* csv_raw = nullptr;
    check(bns_oracle_compare_csv(f.p, &cfg, &csv_raw));
    std::string csv = take_string(csv_raw);
    std::string head = "# " +
                       manifest_json(cmdline, config_json(o), {},
                                     {out_path.empty() ? "-" : out_path}, o.seed)
                           .dump() +
                       "\n";
    write_text(out_path, head + csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"besovns: Meyer-wavelet Besov-Lorentz norms, Duhamel flows, and a mild "
                 "Navier-Stokes solver on the periodic torus"};
    app.require_subcommand(1);
    app.set_config("--config")->description("key = value config file, # comments");

    Options o;
    std::string in, traj, out_path, outdir = "out", prefix = "traj";
    std::string u_path, v_path, kind = "bilinear", op_name = "grad", diag_path = "flow_diag.json";
    std::string csv_cols;
    std::vector<int> axes{1, 1, 1};
    double t_arg = 0.25;

    auto* norm = app.add_subcommand("norm", "norms of a field, coefficient set, or trajectory");
    norm->add_option("--in", in, "BNF1 field or BNC1 coefficients");
    norm->add_option("--traj", traj, "trajectory manifest for the microlocal norm");
    norm->add_option("--out", out_path, "output JSON path (default stdout)");
    norm->add_option("--profile", o.profile, "window profile: smooth | poly");
    add_space_opts(norm, o);

    auto* heat = app.add_subcommand("heatflow", "heat-semigroup trajectory of a datum");
    heat->add_option("--in", in, "BNF1 input field (default: generated datum)");
    heat->add_option("--outdir", outdir, "output directory");
    heat->add_option("--prefix", prefix, "output file prefix");
    add_space_opts(heat, o);
    add_solver_opts(heat, o);

    auto* flow = app.add_subcommand("flow", "paraproduct / couple / bilinear Duhamel flow");
    flow->add_option("--u", u_path, "first trajectory manifest")->required();
    flow->add_option("--v", v_path, "second trajectory manifest")->required();
    flow->add_option("--kind", kind, "paraproduct | couple | bilinear");
    flow->add_option("--op", op_name, "grad (A_l) | triple (A_{l,l',l''})");
    flow->add_option("--axes", axes, "1-based axes l[,l',l'']");
    flow->add_option("--t", t_arg, "evaluation time");
    flow->add_option("--out", out_path, "output BNF1 path")->required();
    flow->add_option("--diag", diag_path, "diagnostics JSON path");
    flow->add_option("--quad", o.quad, "quadrature nodes per ring");
    add_space_opts(flow, o);

    auto* solve = app.add_subcommand("solve", "Picard iteration for the mild equation");
    solve->add_option("--outdir", outdir, "output directory");
    solve->add_option("--csv", csv_cols, "CSV projection columns for the report");
    add_space_opts(solve, o);
    add_solver_opts(solve, o);

    auto* oracle = app.add_subcommand("oracle-compare", "Picard vs RK4 reference, CSV");
    oracle->add_option("--out", out_path, "output CSV path (default stdout)");
    add_space_opts(oracle, o);
    add_solver_opts(oracle, o);

    app.add_subcommand("selftest", "run the built-in invariant suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    std::ostringstream cmdline;
    for (int i = 0; i < argc; ++i) cmdline << (i ? " " : "") << argv[i];

    auto started = std::chrono::steady_clock::now();
    int rc = 0;
    try {
        if (app.got_subcommand("norm")) rc = run_norm(o, in, traj, out_path, cmdline.str());
        else if (app.got_subcommand("heatflow"))
            rc = run_heatflow(o, in, outdir, prefix, cmdline.str());
        else if (app.got_subcommand("flow"))
            rc = run_flow(o, u_path, v_path, kind, op_name, axes, t_arg, out_path, diag_path,
                          cmdline.str());
        else if (app.got_subcommand("solve")) rc = run_solve(o, outdir, csv_cols, cmdline.str());
        else if (app.got_subcommand("oracle-compare"))
            rc = run_oracle_compare(o, out_path, cmdline.str());
        else if (app.got_subcommand("selftest")) {
            char* js = nullptr;
            int code = bns_selftest(&js);
            std::cout << take_string(js) << "\n";
            rc = code == BNS_OK ? 0 : 2;
        }
    } catch (const CliError& e) {
        std::cerr << "error: " << e.msg << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                          started)
                    .count();
    std::fprintf(stderr, "wall-clock: %.1f ms\n", ms);
    return rc;
}
