// End-to-end checks of the command-line tool: exit codes, report files,
// deterministic output. The binary path and the sample model directory are
// injected by the build.

#include "gwsurgery/model_io.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int status;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    fs::create_directories(GWS_TMP_DIR);
    static int counter = 0;
    std::string capture = std::string(GWS_TMP_DIR) + "/out" + std::to_string(counter++) + ".txt";
    std::string cmd = std::string(GWS_CLI_PATH) + " " + args + " > " + capture + " 2>&1";
    int raw = std::system(cmd.c_str());
    std::ifstream in(capture);
    std::stringstream ss;
    ss << in.rdbuf();
    int status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return {status, ss.str()};
}

std::string models_dir() { return GWS_MODELS_DIR; }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("verify-flop exits zero on the consistent toy model") {
    RunResult r = run_cli("verify-flop --model " + models_dir() +
                          "/toy_flop.json --map phi --table t --target-table tf --order 10");
    INFO(r.out);
    CHECK(r.status == 0);
}

TEST_CASE("verify-flop in generate mode writes a verdict-true report") {
    std::string out = std::string(GWS_TMP_DIR) + "/flop_report.json";
    RunResult r = run_cli("verify-flop --model " + models_dir() +
                          "/toy_flop.json --map phi --table t --mode generate --order 10 --out " + out);
    INFO(r.out);
    REQUIRE(r.status == 0);
    gws::json rep = gws::json::parse(slurp(out));
    CHECK(rep["verdict"] == true);
    CHECK(rep["mode"] == "generate");
}

TEST_CASE("verify-flop exits one when a table value is corrupted") {
    gws::ModelFile f = gws::load_model_file(models_dir() + "/toy_flop.json");
    f.gw_tables.at("tf").entries.at(gws::make_gw_key({1, 0}, 0, {})) += 1;
    std::string mutated = std::string(GWS_TMP_DIR) + "/mutated_flop.json";
    {
        std::ofstream outf(mutated);
        outf << gws::canonical_dump(gws::model_file_to_json(f));
    }
    RunResult r = run_cli("verify-flop --model " + mutated +
                          " --map phi --table t --target-table tf --order 10");
    INFO(r.out);
    CHECK(r.status == 1);
}

TEST_CASE("verify-transition with big-quantum insertions") {
    RunResult r = run_cli("verify-transition --model " + models_dir() +
                          "/toy_transition.json --map phie --table t --target-table te --order 10 "
                          "--w-order 2 --w h");
    INFO(r.out);
    CHECK(r.status == 0);
}

TEST_CASE("flop subcommand writes the transported table deterministically") {
    std::string out1 = std::string(GWS_TMP_DIR) + "/flop_t1.json";
    std::string out2 = std::string(GWS_TMP_DIR) + "/flop_t2.json";
    RunResult r1 = run_cli("flop --model " + models_dir() +
                           "/toy_flop.json --map phi --table t --order 30 --out " + out1);
    RunResult r2 = run_cli("flop --model " + models_dir() +
                           "/toy_flop.json --map phi --table t --order 30 --out " + out2);
    REQUIRE(r1.status == 0);
    REQUIRE(r2.status == 0);
    CHECK(slurp(out1) == slurp(out2));
    gws::json j = gws::json::parse(slurp(out1));
    CHECK(j["table"]["model"] == "Mf");
    CHECK_FALSE(j["table"]["entries"].empty());
}

TEST_CASE("expand prints the geometric series") {
    RunResult r = run_cli("expand --series \"G([0,1])\" --order 3");
    CHECK(r.status == 0);
    CHECK(r.out == "q^[0,1] + q^[0,2] + q^[0,3]\n");
}

TEST_CASE("glue evaluates and enumerate lists types") {
    RunResult g = run_cli("glue --model " + models_dir() +
                          "/toy_cut.json --cut cut --z Z --plus-table lp --minus-table lmb "
                          "--target 1 0 --genus 0 --order 8");
    INFO(g.out);
    REQUIRE(g.status == 0);
    gws::json gj = gws::json::parse(g.out);
    CHECK(gj.contains("total"));
    CHECK(gj.contains("types"));

    RunResult e = run_cli("enumerate --model " + models_dir() +
                          "/toy_cut.json --cut cut --target 1 0 --genus 0 --marks 0 --order 8");
    REQUIRE(e.status == 0);
    gws::json ej = gws::json::parse(e.out);
    CHECK(ej["count"].get<int>() >= 1);
}

TEST_CASE("invariant violations exit with status two and a structured error") {
    gws::ModelFile f = gws::load_model_file(models_dir() + "/toy_cut.json");
    std::string mutated = std::string(GWS_TMP_DIR) + "/bad_z.json";
    {
        gws::json j = gws::model_file_to_json(f);
        j["z_models"]["Z"]["inverse_pairing"][0][0] = "7";  // no longer the inverse
        std::ofstream outf(mutated);
        outf << gws::canonical_dump(j);
    }
    RunResult r = run_cli("glue --model " + mutated +
                          " --cut cut --z Z --plus-table lp --minus-table lmb --target 1 0 "
                          "--genus 0 --order 8");
    CHECK(r.status == 2);
    CHECK(r.out.find("error") != std::string::npos);
    CHECK(r.out.find("z_models.Z") != std::string::npos);
}

TEST_CASE("unresolved reference exits with status two") {
    RunResult r = run_cli("verify-flop --model " + models_dir() +
                          "/toy_flop.json --map nope --table t --order 10");
    CHECK(r.status == 2);
    CHECK(r.out.find("error") != std::string::npos);
}

TEST_CASE("sample model files are canonical") {
    for (const char* name : {"toy_flop.json", "toy_transition.json", "toy_cut.json"}) {
        std::string text = slurp(models_dir() + "/" + name);
        gws::ModelFile f = gws::model_file_from_json(gws::json::parse(text));
        CHECK(gws::canonical_dump(gws::model_file_to_json(f)) == text);
    }
}
