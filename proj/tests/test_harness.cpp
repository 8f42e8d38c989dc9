#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "fuplab/harness.hpp"
#include "fuplab/sha256.hpp"

using namespace fuplab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& leaf) {
    fs::path p = fs::temp_directory_path() / ("fuplab_harness_" + leaf);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json small_pipeline(const std::string& out_dir) {
    json cfg;
    cfg["name"] = "smoke";
    cfg["seed"] = 7;
    cfg["output_dir"] = out_dir;
    cfg["pipeline"] = json::array();
    cfg["pipeline"].push_back({{"type", "generator"},
                               {"name", "make-set"},
                               {"kind", "cantor"},
                               {"dim", 1},
                               {"base", 3},
                               {"digits", {0, 2}},
                               {"depth", 4},
                               {"out", "set.gset"}});
    cfg["pipeline"].push_back({{"type", "porosity"},
                               {"kind", "ball"},
                               {"input", "set.gset"},
                               {"nu", 1.0 / 24.0}});
    cfg["pipeline"].push_back(
        {{"type", "fup-scan"},
         {"family",
          {{"dim", 1}, {"base", 3}, {"digits", {0, 2}}, {"depths", {2, 3, 4}}}},
         {"min_beta", 0.02},
         {"out", "scan.csv"}});
    return cfg;
}

}  // namespace

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex(std::string()) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex(std::string("abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex(std::string(
              "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")) ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    // exercise the padding boundary around one block
    CHECK(sha256_hex(std::string(55, 'a')) == sha256_hex(std::string(55, 'a')));
    CHECK(sha256_hex(std::string(56, 'a')) != sha256_hex(std::string(55, 'a')));

    fs::path p = fs::temp_directory_path() / "fuplab_sha_probe.bin";
    std::ofstream(p, std::ios::binary) << "abc";
    CHECK(sha256_file(p.string()) == sha256_hex(std::string("abc")));
    fs::remove(p);
}

TEST_CASE("config parsing: defaults, key variants, and errors") {
    json j;
    j["pipeline"] = json::array();
    ExperimentConfig cfg = parse_config(j);
    CHECK(cfg.name == "experiment");
    CHECK(cfg.seed == 1);
    CHECK(cfg.output_dir == ".");
    CHECK(cfg.stages.empty());

    json j2;
    j2["name"] = "named";
    j2["stages"] = json::array();  // alternate key
    j2["stages"].push_back({{"type", "generator"}, {"digits", {0, 2}}});
    j2["tolerances"] = {{"fup", 1e-10}};
    ExperimentConfig c2 = parse_config(j2);
    CHECK(c2.stages.size() == 1);
    CHECK(c2.stages[0].name == "generator-0");  // default from type and index
    CHECK(c2.stages[0].params.contains("digits"));
    CHECK(!c2.stages[0].params.contains("type"));
    CHECK(c2.tolerances.at("fup") == 1e-10);

    CHECK_THROWS(parse_config(json::array()));
    json j3;
    j3["pipeline"] = json::array();
    j3["pipeline"].push_back({{"name", "no-type"}});
    CHECK_THROWS(parse_config(j3));
}

TEST_CASE("empty pipeline produces a passing manifest") {
    fs::path dir = scratch("empty");
    ExperimentConfig cfg;
    cfg.name = "nothing";
    cfg.output_dir = dir.string();
    Manifest m = run_experiment(cfg);
    CHECK(m.all_pass);
    CHECK(m.stages.empty());
    CHECK(fs::exists(dir / "manifest.json"));
    fs::remove_all(dir);
}

TEST_CASE("pipeline runs, hashes verify, tampering is caught") {
    fs::path dir = scratch("run");
    ExperimentConfig cfg = parse_config(small_pipeline(dir.string()));
    Manifest m = run_experiment(cfg);
    REQUIRE(m.stages.size() == 3);
    CHECK(m.all_pass);
    for (const auto& s : m.stages) CHECK(s.status == "pass");
    CHECK(m.stages[0].values.at("cells").get<int>() == 16);  // 2^4 kept cells
    CHECK(m.stages[2].values.at("beta").get<double>() > 0.02);

    std::string man_path = (dir / "manifest.json").string();
    Manifest back = load_manifest(man_path, dir.string());
    CHECK(back.all_pass);
    CHECK(back.stages.size() == 3);
    CHECK(back.config_sha256 == m.config_sha256);

    // flip a byte in an artifact: reload must fail the hash check
    {
        std::fstream f(dir / "set.gset",
                       std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(10);
        char c;
        f.seekg(10);
        f.get(c);
        f.seekp(10);
        f.put(static_cast<char>(c ^ 0x40));
    }
    CHECK_THROWS(load_manifest(man_path, dir.string()));
    fs::remove_all(dir);
}

TEST_CASE("a failing stage halts the pipeline and skips the rest") {
    fs::path dir = scratch("halt");
    json cfg = small_pipeline(dir.string());
    cfg["pipeline"][0]["kind"] = "moebius";  // unknown generator
    Manifest m = run_experiment(parse_config(cfg));
    REQUIRE(m.stages.size() == 3);
    CHECK(!m.all_pass);
    CHECK(m.stages[0].status == "fail");
    CHECK(!m.stages[0].message.empty());
    CHECK(m.stages[1].status == "skipped");
    CHECK(m.stages[2].status == "skipped");
    fs::remove_all(dir);
}

TEST_CASE("uncertifiable porosity request fails cleanly") {
    fs::path dir = scratch("porofail");
    json cfg = small_pipeline(dir.string());
    cfg["pipeline"][1]["nu"] = 1.0 / 3.0;  // at the lattice cap; 1D Cantor tops out lower
    Manifest m = run_experiment(parse_config(cfg));
    CHECK(!m.all_pass);
    CHECK(m.stages[1].status == "fail");
    CHECK(m.stages[1].values.contains("witness_center"));
    CHECK(m.stages[2].status == "skipped");
    fs::remove_all(dir);
}

TEST_CASE("identical configs give identical artifacts") {
    fs::path d1 = scratch("det1"), d2 = scratch("det2");
    Manifest m1 = run_experiment(parse_config(small_pipeline(d1.string())));
    Manifest m2 = run_experiment(parse_config(small_pipeline(d2.string())));
    REQUIRE(m1.stages.size() == m2.stages.size());
    for (std::size_t i = 0; i < m1.stages.size(); ++i) {
        REQUIRE(m1.stages[i].artifacts.size() == m2.stages[i].artifacts.size());
        for (std::size_t a = 0; a < m1.stages[i].artifacts.size(); ++a)
            CHECK(m1.stages[i].artifacts[a].sha256 ==
                  m2.stages[i].artifacts[a].sha256);
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("report emission writes the summary and plot data") {
    fs::path dir = scratch("report");
    Manifest m = run_experiment(parse_config(small_pipeline(dir.string())));
    emit_report(m, dir.string());
    REQUIRE(fs::exists(dir / "report.txt"));
    std::ifstream rep(dir / "report.txt");
    std::string text((std::istreambuf_iterator<char>(rep)),
                     std::istreambuf_iterator<char>());
    CHECK(text.find("overall: pass") != std::string::npos);
    CHECK(text.find("make-set") != std::string::npos);
    // the scan stage gets a log-log companion next to its csv
    bool found = false;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().filename().string().find("loglog") != std::string::npos)
            found = true;
    CHECK(found);
    fs::remove_all(dir);
}
