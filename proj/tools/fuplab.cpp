#include <cmath>
#include <cstdio>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "fuplab/extension.hpp"
#include "fuplab/fup.hpp"
#include "fuplab/grid_set.hpp"
#include "fuplab/harness.hpp"
#include "fuplab/porosity.hpp"
#include "fuplab/weight.hpp"

using namespace fuplab;

namespace {

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        out.push_back(std::stoi(s.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        out.push_back(std::stod(s.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

int cmd_run(const std::string& config_path, bool report) {
    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    Manifest man = run_experiment(cfg);
    for (const auto& s : man.stages)
        std::printf("%-24s %-12s %-7s %.3fs %s\n", s.name.c_str(),
                    s.type.c_str(), s.status.c_str(), s.seconds,
                    s.message.c_str());
    if (report) emit_report(man, cfg.output_dir);
    std::printf("overall: %s\n", man.all_pass ? "pass" : "fail");
    return man.all_pass ? 0 : 1;
}

int cmd_gen(const std::string& kind, int dim, int base,
            const std::string& digits, int depth, const std::string& embedding,
            const std::string& out) {
    GridSet s = [&] {
        if (kind == "sierpinski") return gen_sierpinski(depth);
        CantorSpec spec;
        spec.dim = dim;
        spec.base = base;
        spec.depth = depth;
        spec.kept_digits.assign(dim, parse_int_list(digits));
        return gen_cantor_product(spec);
    }();
    if (embedding == "frequency")
        s = s.with_embedding(frequency_embedding(s.dim(), s.side()));
    save_gset(s, out);
    std::printf("wrote %s: side %lld, %zu cells\n", out.c_str(),
                static_cast<long long>(s.side()), s.cell_count());
    return 0;
}

int cmd_porosity(const std::string& input, const std::string& kind, double nu,
                 double alpha0, double alpha1, int dirs, int L,
                 const std::string& depths) {
    GridSet s = load_gset(input);
    if (alpha0 <= 0.0) alpha0 = 2.0 * s.cell_width();
    if (kind == "box") {
        bool all = true;
        for (int n : parse_int_list(depths)) {
            bool ok = check_box_porosity(s, L, n);
            std::printf("depth %d: %s\n", n, ok ? "porous" : "not porous");
            all = all && ok;
        }
        return all ? 0 : 1;
    }
    PorosityReport rep = kind == "line"
                             ? analyze_line_porosity(s, alpha0, alpha1, dirs, nu)
                             : analyze_ball_porosity(s, alpha0, alpha1, nu);
    std::printf("nu_max %.6f (requested %.6f), %s, positions %zu\n", rep.nu_max,
                nu, rep.exact ? "exact" : "subsampled", rep.positions_tested);
    if (rep.witness) {
        std::printf("witness at scale %.6g, center", rep.witness->scale);
        for (double c : rep.witness->center) std::printf(" %.6g", c);
        std::printf("\n");
    }
    if (!rep.note.empty()) std::printf("%s\n", rep.note.c_str());
    return rep.nu_max >= nu - 1e-15 ? 0 : 1;
}

int cmd_fup_scan(const std::string& x_path, const std::string& y_path, int base,
                 const std::string& digits, const std::string& depths, int dim,
                 double tol, const std::string& out) {
    std::vector<std::pair<GridSet, GridSet>> pairs;
    if (!x_path.empty()) {
        GridSet X = load_gset(x_path);
        GridSet Y = y_path.empty() ? X : load_gset(y_path);
        pairs.emplace_back(std::move(X), std::move(Y));
    } else {
        CantorSpec spec;
        spec.dim = dim;
        spec.base = base;
        spec.kept_digits.assign(dim, parse_int_list(digits));
        for (int depth : parse_int_list(depths)) {
            spec.depth = depth;
            GridSet s = gen_cantor_product(spec);
            pairs.emplace_back(s, s);
        }
    }
    FupScanResult scan = fup_scan(pairs, tol);
    std::printf("side        norm          trivial       iters\n");
    for (const auto& pt : scan.points)
        std::printf("%-10lld  %.10f  %.10f  %d\n",
                    static_cast<long long>(pt.side), pt.norm, pt.trivial,
                    pt.iterations);
    if (scan.points.size() > 1)
        std::printf("fit: norm = %.4g * N^-%.5f (max log residual %.3g)\n",
                    scan.constant, scan.beta, scan.max_residual);
    if (!out.empty()) {
        std::FILE* f = std::fopen(out.c_str(), "w");
        if (!f) throw std::runtime_error("cannot write " + out);
        std::fprintf(f, "side,norm,trivial,iterations\n");
        for (const auto& pt : scan.points)
            std::fprintf(f, "%lld,%.17g,%.17g,%d\n",
                         static_cast<long long>(pt.side), pt.norm, pt.trivial,
                         pt.iterations);
        std::fclose(f);
    }
    return 0;
}

int cmd_weight_build(const std::string& input, double nu, double mu, double s_par,
                     double alpha, bool modify, const std::string& out) {
    GridSet Y = load_gset(input);
    SmoothWeight base = build_damping_weight(Y, nu, mu, s_par, alpha);
    std::size_t cubes = 0;
    for (const auto& c : base.clusters) cubes += c.centers.size();
    std::printf("shells k = %d..%d, %zu cubes total\n", base.k_min(),
                base.k_max(), cubes);
    if (base.warning) std::printf("note: %s\n", base.note.c_str());
    ModifiedWeight w;
    if (modify) {
        w = modify_weight(base);
        if (!w.ok) {
            std::fprintf(stderr, "modification failed: %s\n", w.message.c_str());
            return 1;
        }
        for (const auto& c : w.corrections)
            std::printf("k %2d: q = %.8g, p = %.8g\n", c.k, c.q, c.p);
    } else {
        w.base = std::move(base);
    }
    save_weight(w, out);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int cmd_weight_check(const std::string& input) {
    ModifiedWeight w = load_weight(input);
    GrowthReport g = growth_report(w);
    std::printf("growth integral %.6g, tail bound %.6g, %s\n", g.integral_value,
                g.tail_bound, g.diverged ? "DIVERGED" : "convergent");
    for (int a = 1; a <= 3; ++a)
        std::printf("|D^%d w| <x>^%d sup (sampled): %.6g\n", a, a - 1,
                    regularity_scan(w, a));
    return g.diverged ? 1 : 0;
}

int cmd_psh_check(const std::string& weight_path, const std::string& c_str,
                  int samples, const std::string& out) {
    ModifiedWeight w = load_weight(weight_path);
    SampleSpec spec;
    if (samples > 0) spec.count = samples;
    double C;
    if (c_str == "auto") {
        PropConstants pc = scan_prop_constants(w, spec);
        C = std::max(pc.c1, pc.c2);
        std::printf("scanned constants: c1 = %.6g, c2 = %.6g\n", pc.c1, pc.c2);
    } else {
        C = std::stod(c_str);
    }
    PshCertificate cert = psh_certificate(w, C, spec);
    std::printf("C = %.6g, min eigenvalue %.6g over %zu points, margin %.6g: %s\n",
                C, cert.global_min, cert.sample_points.size(),
                cert.real_locus_margin, cert.pass ? "pass" : "FAIL");
    if (!out.empty()) save_certificate(cert, out);
    return cert.pass ? 0 : 1;
}

int cmd_extend_eval(const std::string& weight_path, const std::string& xs,
                    const std::string& ys, double C, double rho) {
    ModifiedWeight w = load_weight(weight_path);
    ComplexPoint z;
    z.x = parse_double_list(xs);
    z.y = parse_double_list(ys);
    if (static_cast<int>(z.x.size()) != w.base.dim ||
        z.y.size() != z.x.size()) {
        std::fprintf(stderr, "point dimension mismatch\n");
        return 2;
    }
    double ew = poisson_extend(w, z);
    std::printf("E w(z) = %.10g\n", ew);
    if (rho > 0.0) {
        PhiContext ctx = make_phi_context(w, C, rho);
        auto [phi, kappa] = phi_kappa(z, ctx);
        std::printf("phi = %.10g, kappa = %.10g (c_d = %.6g)\n", phi, kappa,
                    ctx.c_d);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for fractal uncertainty and damping "
                 "weight experiments"};
    app.require_subcommand(1);

    std::string config_path;
    bool report = false;
    auto* run = app.add_subcommand("run", "execute an experiment config");
    run->add_option("config", config_path, "JSON experiment config")->required();
    run->add_flag("--report", report, "also emit report.txt and plot data");

    std::string gen_kind = "cantor", gen_digits = "0,2", gen_emb = "physical",
                gen_out = "set.gset";
    int gen_dim = 2, gen_base = 3, gen_depth = 3;
    auto* gen = app.add_subcommand("gen", "generate a lattice set");
    gen->add_option("--kind", gen_kind, "cantor | sierpinski");
    gen->add_option("--dim", gen_dim);
    gen->add_option("--base", gen_base);
    gen->add_option("--digits", gen_digits, "kept digits, comma separated");
    gen->add_option("--depth", gen_depth);
    gen->add_option("--embedding", gen_emb, "physical | frequency");
    gen->add_option("--out", gen_out)->required();

    std::string por_input, por_kind = "ball", por_depths = "1";
    double por_nu = 1.0 / 192.0, por_a0 = 0.0, por_a1 = 1.0;
    int por_dirs = 32, por_L = 3;
    auto* por = app.add_subcommand("porosity", "certify porosity of a set");
    por->add_option("--input", por_input)->required();
    por->add_option("--kind", por_kind, "ball | line | box");
    por->add_option("--nu", por_nu, "requested porosity constant");
    por->add_option("--alpha0", por_a0, "smallest scale (default 2 cells)");
    por->add_option("--alpha1", por_a1, "largest scale");
    por->add_option("--dirs", por_dirs, "direction count (line kind)");
    por->add_option("--L", por_L, "box base");
    por->add_option("--depths", por_depths, "box depths, comma separated");

    std::string fs_x, fs_y, fs_digits = "0,2", fs_depths = "2,3,4", fs_out;
    int fs_base = 3, fs_dim = 1;
    double fs_tol = 1e-10;
    auto* fsc = app.add_subcommand("fup-scan",
                                   "localization norms across resolutions");
    fsc->add_option("--x", fs_x, "spatial set (.gset); omit to use a family");
    fsc->add_option("--y", fs_y, "frequency set (defaults to --x)");
    fsc->add_option("--base", fs_base);
    fsc->add_option("--digits", fs_digits);
    fsc->add_option("--depths", fs_depths, "family depths, comma separated");
    fsc->add_option("--dim", fs_dim);
    fsc->add_option("--tol", fs_tol);
    fsc->add_option("--out", fs_out, "scan CSV path");

    std::string wb_input, wb_out = "weight.json";
    double wb_nu = 1.0 / 24.0, wb_mu = 10.0 * std::sqrt(2.0), wb_s = 0.2,
           wb_alpha = 0.7;
    bool wb_modify = false;
    auto* wb = app.add_subcommand("weight-build", "build the damping weight");
    wb->add_option("--input", wb_input, "the set Y (.gset)")->required();
    wb->add_option("--nu", wb_nu);
    wb->add_option("--mu", wb_mu);
    wb->add_option("--s", wb_s);
    wb->add_option("--alpha", wb_alpha);
    wb->add_flag("--modify", wb_modify, "equalize shell projections");
    wb->add_option("--out", wb_out)->required();

    std::string wc_input;
    auto* wc = app.add_subcommand("weight-check",
                                  "growth and regularity diagnostics");
    wc->add_option("--input", wc_input)->required();

    std::string psh_weight, psh_c = "auto", psh_out;
    int psh_samples = 0;
    auto* psh = app.add_subcommand("psh-check",
                                   "certify the extended weight's Hessian");
    psh->add_option("--weight", psh_weight)->required();
    psh->add_option("--C", psh_c, "constant, or 'auto' to scan");
    psh->add_option("--samples", psh_samples);
    psh->add_option("--out", psh_out, "certificate JSON path");

    std::string ee_weight, ee_x, ee_y;
    double ee_c = 0.0, ee_rho = 0.0;
    auto* ee = app.add_subcommand("extend-eval",
                                  "evaluate the harmonic extension at a point");
    ee->add_option("--weight", ee_weight)->required();
    ee->add_option("--x", ee_x, "real part, comma separated")->required();
    ee->add_option("--y", ee_y, "imaginary part, comma separated")->required();
    ee->add_option("--C", ee_c);
    ee->add_option("--rho", ee_rho, "when > 0, also print phi and kappa");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, report);
        if (gen->parsed())
            return cmd_gen(gen_kind, gen_dim, gen_base, gen_digits, gen_depth,
                           gen_emb, gen_out);
        if (por->parsed())
            return cmd_porosity(por_input, por_kind, por_nu, por_a0, por_a1,
                                por_dirs, por_L, por_depths);
        if (fsc->parsed())
            return cmd_fup_scan(fs_x, fs_y, fs_base, fs_digits, fs_depths,
                                fs_dim, fs_tol, fs_out);
        if (wb->parsed())
            return cmd_weight_build(wb_input, wb_nu, wb_mu, wb_s, wb_alpha,
                                    wb_modify, wb_out);
        if (wc->parsed()) return cmd_weight_check(wc_input);
        if (psh->parsed())
            return cmd_psh_check(psh_weight, psh_c, psh_samples, psh_out);
        if (ee->parsed())
            return cmd_extend_eval(ee_weight, ee_x, ee_y, ee_c, ee_rho);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
