#include "fuplab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fuplab/extension.hpp"
#include "fuplab/fup.hpp"
#include "fuplab/grid_set.hpp"
#include "fuplab/porosity.hpp"
#include "fuplab/sha256.hpp"
#include "fuplab/weight.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fuplab {

namespace {

CantorSpec cantor_from_json(const json& p) {
    CantorSpec spec;
    spec.dim = p.value("dim", 1);
    spec.base = p.value("base", 3);
    spec.depth = p.value("depth", 1);
    if (!p.contains("digits"))
        throw std::runtime_error("generator: cantor needs a digits list");
    const json& dg = p.at("digits");
    if (dg.empty()) throw std::runtime_error("generator: digits list is empty");
    if (dg[0].is_array()) {
        for (const auto& axis : dg)
            spec.kept_digits.push_back(axis.get<std::vector<int>>());
    } else {
        auto one = dg.get<std::vector<int>>();
        spec.kept_digits.assign(spec.dim, one);
    }
    return spec;
}

class PipelineRunner {
public:
    PipelineRunner(const ExperimentConfig& cfg, Manifest& man)
        : cfg_(cfg), man_(man) {}

    void run_stage(const StageSpec& stage, StageRecord& rec) {
        const json& p = stage.params;
        if (stage.type == "generator")
            run_generator(p, rec);
        else if (stage.type == "porosity")
            run_porosity(p, rec);
        else if (stage.type == "weight-build")
            run_weight_build(p, rec);
        else if (stage.type == "modify")
            run_modify(p, rec);
        else if (stage.type == "psh-check")
            run_psh_check(p, rec);
        else if (stage.type == "fup-scan")
            run_fup_scan(p, rec);
        else
            throw std::runtime_error("unknown stage type: " + stage.type);
    }

private:
    std::string emit(const std::string& file, StageRecord& rec) {
        std::string full = (fs::path(cfg_.output_dir) / file).string();
        rec.artifacts.push_back({file, ""});
        return full;
    }

    void seal(StageRecord& rec) {
        for (auto& a : rec.artifacts)
            if (a.sha256.empty())
                a.sha256 = sha256_file(
                    (fs::path(cfg_.output_dir) / a.file).string());
    }

    std::string input_path(const json& p, const char* key = "input") {
        if (!p.contains(key))
            throw std::runtime_error(std::string("stage needs '") + key + "'");
        return (fs::path(cfg_.output_dir) / p.at(key).get<std::string>())
            .string();
    }

    void run_generator(const json& p, StageRecord& rec) {
        std::string kind = p.value("kind", "cantor");
        std::string out = p.value("out", "set.gset");
        GridSet s = [&] {
            if (kind == "cantor") return gen_cantor_product(cantor_from_json(p));
            if (kind == "sierpinski") return gen_sierpinski(p.value("depth", 1));
            throw std::runtime_error("generator: unknown kind " + kind);
        }();
        if (p.value("embedding", "physical") == std::string("frequency"))
            s = s.with_embedding(frequency_embedding(s.dim(), s.side()));
        save_gset(s, emit(out, rec));
        rec.values["cells"] = s.cell_count();
        rec.values["side"] = s.side();
        seal(rec);
        rec.status = "pass";
    }

    void run_porosity(const json& p, StageRecord& rec) {
        GridSet s = load_gset(input_path(p));
        std::string kind = p.value("kind", "ball");
        bool ok = false;
        if (kind == "box") {
            int L = p.value("L", 3);
            ok = true;
            json per = json::array();
            for (int n : p.value("depths", std::vector<int>{0})) {
                bool b = check_box_porosity(s, L, n);
                per.push_back(b);
                ok = ok && b;
            }
            rec.values["box_pass"] = per;
        } else {
            double a0 = p.value("alpha0", 2.0 * s.cell_width());
            double a1 = p.value("alpha1", 1.0);
            double nu = p.value("nu", kNuStep);
            PorosityReport rep =
                kind == "line"
                    ? analyze_line_porosity(s, a0, a1, p.value("dir_count", 32), nu)
                    : analyze_ball_porosity(s, a0, a1, nu);
            rec.values["nu_max"] = rep.nu_max;
            rec.values["exact"] = rep.exact;
            rec.values["positions_tested"] = rep.positions_tested;
            if (rep.witness) {
                rec.values["witness_center"] = rep.witness->center;
                rec.values["witness_scale"] = rep.witness->scale;
            }
            ok = rep.nu_max >= nu - 1e-15;
            if (!ok) rec.message = "requested porosity not certified";
        }
        rec.status = ok ? "pass" : "fail";
    }

    void run_weight_build(const json& p, StageRecord& rec) {
        GridSet s = load_gset(input_path(p));
        SmoothWeight w = build_damping_weight(
            s, p.value("nu", 1.0 / 24.0), p.value("mu", 10.0 * std::sqrt(2.0)),
            p.value("s", 0.2), p.value("alpha", 0.7));
        ModifiedWeight wrapped;
        wrapped.base = std::move(w);
        save_weight(wrapped, emit(p.value("out", "weight.json"), rec));
        rec.values["clusters"] = wrapped.base.clusters.size();
        rec.values["k_min"] = wrapped.base.k_min();
        rec.values["k_max"] = wrapped.base.k_max();
        rec.values["warning"] = wrapped.base.warning;
        seal(rec);
        rec.status = "pass";
    }

    void run_modify(const json& p, StageRecord& rec) {
        ModifiedWeight in = load_weight(input_path(p));
        ModifiedWeight out =
            modify_weight(in.base, p.value("dir_table_size", 0));
        save_weight(out, emit(p.value("out", "weight_mod.json"), rec));
        json qs = json::array();
        for (const auto& c : out.corrections) qs.push_back(c.q);
        rec.values["q"] = qs;
        rec.values["ok"] = out.ok;
        if (!out.ok) rec.message = out.message;
        seal(rec);
        rec.status = out.ok ? "pass" : "fail";
    }

    void run_psh_check(const json& p, StageRecord& rec) {
        ModifiedWeight w = load_weight(input_path(p, "weight"));
        SampleSpec spec;
        spec.count = p.value("samples", spec.count);
        spec.line_samples = p.value("line_samples", spec.line_samples);
        spec.seed = cfg_.seed;
        double C;
        if (!p.contains("C") || p.at("C").is_string()) {
            PropConstants pc = scan_prop_constants(w, spec);
            C = std::max(pc.c1, pc.c2);
            rec.values["c1"] = pc.c1;
            rec.values["c2"] = pc.c2;
        } else {
            C = p.at("C").get<double>();
        }
        PshCertificate cert = psh_certificate(w, C, spec);
        save_certificate(cert, emit(p.value("out", "cert.json"), rec));
        rec.values["C"] = C;
        rec.values["global_min"] = cert.global_min;
        rec.values["real_locus_margin"] = cert.real_locus_margin;
        seal(rec);
        rec.status = cert.pass ? "pass" : "fail";
        if (!cert.pass) rec.message = "negative Hessian eigenvalue found";
    }

    void run_fup_scan(const json& p, StageRecord& rec) {
        std::vector<std::pair<GridSet, GridSet>> pairs;
        if (p.contains("family")) {
            CantorSpec spec = cantor_from_json(p.at("family"));
            for (int depth : p.at("family").value("depths", std::vector<int>{spec.depth})) {
                CantorSpec at = spec;
                at.depth = depth;
                GridSet s = gen_cantor_product(at);
                pairs.emplace_back(s, s);
            }
        } else {
            GridSet X = load_gset(input_path(p, "x"));
            GridSet Y = p.contains("y") ? load_gset(input_path(p, "y")) : X;
            pairs.emplace_back(std::move(X), std::move(Y));
        }
        FupScanResult scan =
            fup_scan(pairs, p.value("tol", 1e-10), p.value("max_iter", 10000));
        std::string out = p.value("out", "scan.csv");
        {
            std::ofstream f(emit(out, rec));
            f << "side,norm,trivial,iterations\n";
            f.precision(17);
            for (const auto& pt : scan.points)
                f << pt.side << "," << pt.norm << "," << pt.trivial << ","
                  << pt.iterations << "\n";
        }
        rec.values["beta"] = scan.beta;
        rec.values["constant"] = scan.constant;
        rec.values["max_residual"] = scan.max_residual;
        bool ok = true;
        if (p.contains("min_beta") && scan.beta < p.at("min_beta").get<double>()) {
            ok = false;
            rec.message = "fitted exponent below threshold";
        }
        for (const auto& pt : scan.points)
            if (pt.norm > 2.0 * pt.trivial + 1e-9) {
                ok = false;
                rec.message = "norm exceeds twice the trivial bound";
            }
        seal(rec);
        rec.status = ok ? "pass" : "fail";
    }

    const ExperimentConfig& cfg_;
    Manifest& man_;
};

json manifest_to_json(const Manifest& m) {
    json j;
    j["experiment"] = m.experiment;
    j["seed"] = m.seed;
    j["config_sha256"] = m.config_sha256;
    j["all_pass"] = m.all_pass;
    j["stages"] = json::array();
    for (const auto& s : m.stages) {
        json js;
        js["name"] = s.name;
        js["type"] = s.type;
        js["status"] = s.status;
        js["seconds"] = s.seconds;
        js["message"] = s.message;
        js["values"] = s.values;
        js["artifacts"] = json::array();
        for (const auto& a : s.artifacts)
            js["artifacts"].push_back({{"file", a.file}, {"sha256", a.sha256}});
        j["stages"].push_back(std::move(js));
    }
    return j;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig cfg;
    if (!j.is_object()) throw std::runtime_error("config: top level must be a table");
    cfg.name = j.value("name", "experiment");
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.output_dir = j.value("output_dir", ".");
    if (j.contains("tolerances"))
        for (auto& [k, v] : j.at("tolerances").items())
            cfg.tolerances[k] = v.get<double>();
    const char* key = j.contains("pipeline") ? "pipeline" : "stages";
    if (j.contains(key)) {
        int idx = 0;
        for (const auto& js : j.at(key)) {
            StageSpec s;
            if (!js.contains("type"))
                throw std::runtime_error("config: stage without a type");
            s.type = js.at("type").get<std::string>();
            s.name = js.value("name", s.type + "-" + std::to_string(idx));
            s.params = js;
            s.params.erase("type");
            s.params.erase("name");
            cfg.stages.push_back(std::move(s));
            ++idx;
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    json j = json::parse(in);
    return parse_config(j);
}

Manifest run_experiment(const ExperimentConfig& cfg) {
    Manifest man;
    man.experiment = cfg.name;
    man.seed = cfg.seed;
    {
        json cj;
        cj["name"] = cfg.name;
        cj["seed"] = cfg.seed;
        man.config_sha256 = sha256_hex(cj.dump());
    }
    fs::create_directories(cfg.output_dir);
    PipelineRunner runner(cfg, man);
    bool halted = false;
    for (const auto& stage : cfg.stages) {
        StageRecord rec;
        rec.name = stage.name;
        rec.type = stage.type;
        if (halted) {
            rec.status = "skipped";
            man.stages.push_back(std::move(rec));
            continue;
        }
        auto t0 = std::chrono::steady_clock::now();
        try {
            runner.run_stage(stage, rec);
        } catch (const std::exception& e) {
            rec.status = "fail";
            rec.message = e.what();
        }
        rec.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        if (rec.status != "pass") {
            man.all_pass = false;
            halted = true;
        }
        man.stages.push_back(std::move(rec));
    }
    save_manifest(man, (fs::path(cfg.output_dir) / "manifest.json").string());
    return man;
}

void save_manifest(const Manifest& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest " + path);
    out << manifest_to_json(m).dump(2) << "\n";
}

Manifest load_manifest(const std::string& path, const std::string& artifact_dir) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest " + path);
    json j = json::parse(in);
    Manifest m;
    m.experiment = j.value("experiment", "");
    m.seed = j.value("seed", std::uint64_t{1});
    m.config_sha256 = j.value("config_sha256", "");
    m.all_pass = j.value("all_pass", false);
    for (const auto& js : j.value("stages", json::array())) {
        StageRecord s;
        s.name = js.value("name", "");
        s.type = js.value("type", "");
        s.status = js.value("status", "");
        s.seconds = js.value("seconds", 0.0);
        s.message = js.value("message", "");
        s.values = js.value("values", json::object());
        for (const auto& ja : js.value("artifacts", json::array())) {
            ArtifactEntry a;
            a.file = ja.at("file").get<std::string>();
            a.sha256 = ja.at("sha256").get<std::string>();
            std::string full = (fs::path(artifact_dir) / a.file).string();
            if (sha256_file(full) != a.sha256)
                throw std::runtime_error("manifest hash mismatch for " + a.file);
            s.artifacts.push_back(std::move(a));
        }
        m.stages.push_back(std::move(s));
    }
    return m;
}

void emit_report(const Manifest& m, const std::string& dir) {
    fs::create_directories(dir);
    std::ofstream rep(fs::path(dir) / "report.txt");
    rep << "experiment: " << m.experiment << "\n";
    rep << "overall: " << (m.all_pass ? "pass" : "fail") << "\n";
    for (const auto& s : m.stages) {
        rep << s.name << " [" << s.type << "]: " << s.status;
        if (s.status != "skipped") {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f", s.seconds);
            rep << " (" << buf << "s)";
        }
        if (!s.message.empty()) rep << " -- " << s.message;
        rep << "\n";
        for (const auto& a : s.artifacts) rep << "  artifact: " << a.file << "\n";

        if (s.values.contains("beta") && !s.artifacts.empty()) {
            // log-log columns of the scan for plotting
            std::ifstream scan(fs::path(dir) / s.artifacts.front().file);
            std::ofstream out(fs::path(dir) / (s.name + "_loglog.csv"));
            out << "log_side,log_norm\n";
            out.precision(17);
            std::string line;
            std::getline(scan, line);  // header
            while (std::getline(scan, line)) {
                std::istringstream ss(line);
                double side, norm;
                char comma;
                if (ss >> side >> comma >> norm && norm > 0.0)
                    out << std::log(side) << "," << std::log(norm) << "\n";
            }
            rep << "  plot-data: " << s.name + "_loglog.csv" << "\n";
        }
        if (s.values.contains("global_min") && !s.artifacts.empty()) {
            std::ifstream cf(fs::path(dir) / s.artifacts.front().file);
            if (cf) {
                json cj = json::parse(cf);
                auto eig = cj.value("min_eig", std::vector<double>{});
                if (!eig.empty()) {
                    double lo = *std::min_element(eig.begin(), eig.end());
                    double hi = *std::max_element(eig.begin(), eig.end());
                    if (hi <= lo) hi = lo + 1.0;
                    const int bins = 32;
                    std::vector<int> count(bins, 0);
                    for (double e : eig) {
                        int b = static_cast<int>((e - lo) / (hi - lo) * bins);
                        count[std::clamp(b, 0, bins - 1)]++;
                    }
                    std::ofstream out(fs::path(dir) / (s.name + "_eig_hist.csv"));
                    out << "bin_lo,bin_hi,count\n";
                    out.precision(17);
                    for (int b = 0; b < bins; ++b)
                        out << lo + (hi - lo) * b / bins << ","
                            << lo + (hi - lo) * (b + 1) / bins << "," << count[b]
                            << "\n";
                    rep << "  plot-data: " << s.name + "_eig_hist.csv" << "\n";
                }
            }
        }
    }
}

}  // namespace fuplab
