#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "helpers.hpp"

namespace {

// SKELACT_BIN and SKELACT_DATA_DIR come from the build system.
std::string bin() { return SKELACT_BIN; }

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = bin() + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buf[4096];
    while (size_t n = ::fread(buf, 1, sizeof(buf), pipe))
        result.output.append(buf, n);
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("every subcommand has --help and exits 0") {
    for (const char* sub : {"convert", "synth", "train", "eval", "ablate",
                            "stream", "model-info"}) {
        const RunResult r = run(std::string(sub) + " --help");
        CHECK(r.exit_code == 0);
        CHECK(r.output.find("--help") != std::string::npos);
    }
    CHECK(run("--help").exit_code == 0);
}

TEST_CASE("usage errors exit 1") {
    CHECK(run("").exit_code == 1);                        // missing subcommand
    CHECK(run("train").exit_code == 1);                   // missing required
    CHECK(run("no-such-subcommand").exit_code == 1);
    CHECK(run("synth --out /tmp/x --bogus-flag").exit_code == 1);
}

TEST_CASE("data and config errors exit 2") {
    const RunResult missing =
        run("eval --checkpoint /nonexistent.ckpt --data /nonexistent");
    CHECK(missing.exit_code == 2);

    skelact::test::TempDir dir("cli_cfg");
    {
        std::ofstream out(dir.file("bad.json"));
        out << R"({"window":{"window_seconds":-1}})";
    }
    const RunResult bad_cfg =
        run("model-info --config " + dir.file("bad.json"));
    CHECK(bad_cfg.exit_code == 2);
    CHECK(bad_cfg.output.find("window.window_seconds") != std::string::npos);
}

TEST_CASE("synth is byte-deterministic per seed and convert round-trips") {
    skelact::test::TempDir dir("cli_synth");
    const std::string a = dir.file("a");
    const std::string b = dir.file("b");
    const std::string args = " --samples-per-class 1 --seed 5 --duration 1.0";
    CHECK(run("synth --out " + a + args).exit_code == 0);
    CHECK(run("synth --out " + b + args).exit_code == 0);
    CHECK(skelact::test::slurp(a + "/wave/0.jsonl") ==
          skelact::test::slurp(b + "/wave/0.jsonl"));
    CHECK(skelact::test::slurp(a + "/classes.json") ==
          skelact::test::slurp(b + "/classes.json"));
}

TEST_CASE("convert transcodes the golden NTU fixture") {
    skelact::test::TempDir dir("cli_convert");
    const std::string out = dir.file("sample.jsonl");
    const RunResult r = run(std::string("convert --input ") + SKELACT_DATA_DIR +
                            "/fixtures/S001C001P001R001A001.skeleton --out " + out);
    CHECK(r.exit_code == 0);
    const std::string body = skelact::test::slurp(out);
    CHECK(body.find("\"joint_set\":\"NTU25\"") != std::string::npos);
    CHECK(body.find("\"subject\":\"1\"") != std::string::npos);
}

TEST_CASE("model-info reports the parameter count") {
    const RunResult r = run(std::string("model-info --config ") +
                            SKELACT_DATA_DIR + "/config_default.json");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("trainable parameters: 2494600") != std::string::npos);
}

TEST_CASE("print-config echoes a reloadable document") {
    const RunResult r = run(std::string("model-info --print-config --config ") +
                            SKELACT_DATA_DIR + "/config_default.json");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\"seed\"") != std::string::npos);
    CHECK(r.output.find("\"window_seconds\"") != std::string::npos);
}

}  // TEST_SUITE
