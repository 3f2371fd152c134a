#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CliResult {
    int exit_code;
    std::string output;
};

CliResult run(const std::string& args, bool keep_stderr = false) {
    const std::string cmd =
        std::string(GIL_CLI_PATH) + " " + args + (keep_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[512];
    while (size_t got = fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

const std::string kDir = "/tmp/gil_cli_tests";

struct DirSetup {
    DirSetup() { (void)!std::system(("mkdir -p " + kDir).c_str()); }
} dir_setup;

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("").exit_code == 2);
    CHECK(run("train --bogus-flag").exit_code == 2);
    CHECK(run("train --synthetic tree").exit_code == 2);  // --out missing
    CHECK(run("frobnicate").exit_code == 2);
}

TEST_CASE("I/O errors exit with code 3") {
    CHECK(run("hyperbolicity --edges /nonexistent/path").exit_code == 3);
    CHECK(run("eval --report /nonexistent/report.json").exit_code == 3);
    CHECK(run("train --edges /nonexistent --features /nonexistent --out " + kDir + "/x.json")
              .exit_code == 3);
}

TEST_CASE("generate then hyperbolicity on a tree gives a zero point mass") {
    auto gen = run("generate --kind tree --tree-branching 2 --tree-depth 4 --seed 2 --out-prefix " +
                   kDir + "/tr");
    CHECK(gen.exit_code == 0);
    CHECK(gen.output.find("nodes 31") != std::string::npos);
    CHECK(gen.output.find("edges 30") != std::string::npos);

    auto hyp = run("hyperbolicity --edges " + kDir + "/tr.edges --mode exact");
    CHECK(hyp.exit_code == 0);
    CHECK(hyp.output.find("mode exact") != std::string::npos);
    CHECK(hyp.output.find("delta 0.0000000000 1.0000000000") != std::string::npos);
}

TEST_CASE("generate grid writes the expected edge count") {
    auto gen = run("generate --kind grid --grid-rows 4 --grid-cols 4 --seed 2 --out-prefix " +
                   kDir + "/gr");
    CHECK(gen.exit_code == 0);
    CHECK(gen.output.find("edges 24") != std::string::npos);
}

TEST_CASE("exact hyperbolicity refuses oversized graphs with guidance") {
    run("generate --kind tree --tree-branching 2 --tree-depth 9 --seed 1 --out-prefix " + kDir +
        "/big");
    auto res = run("hyperbolicity --edges " + kDir + "/big.edges --mode exact", true);
    CHECK(res.exit_code == 3);
    CHECK(res.output.find("sampled") != std::string::npos);
}

TEST_CASE("train writes a report that eval can inspect") {
    auto tr = run("train --synthetic tree --tree-branching 2 --tree-depth 4 --task nc --seed 3 "
                  "--max-epochs 20 --out " +
                  kDir + "/run.json");
    CHECK(tr.exit_code == 0);
    CHECK(tr.output.find("best_epoch") != std::string::npos);
    CHECK(tr.output.find("test_accuracy") != std::string::npos);

    auto ev = run("eval --report " + kDir + "/run.json");
    CHECK(ev.exit_code == 0);
    CHECK(ev.output.find("task nc") != std::string::npos);
    CHECK(ev.output.find("test_accuracy") != std::string::npos);
}

TEST_CASE("train consumes generated dataset files") {
    auto gen = run("generate --kind grid --grid-rows 8 --grid-cols 8 --seed 8 --out-prefix " +
                   kDir + "/lg");
    REQUIRE(gen.exit_code == 0);
    auto tr = run("train --edges " + kDir + "/lg.edges --features " + kDir + "/lg.features "
                  "--labels " + kDir + "/lg.labels --task nc --seed 2 --max-epochs 15 --out " +
                  kDir + "/lg.json");
    CHECK(tr.exit_code == 0);
    CHECK(tr.output.find("test_accuracy") != std::string::npos);
}

TEST_CASE("config file drives training and flags override it") {
    {
        std::ofstream cfg(kDir + "/sweep.cfg");
        cfg << "task nc\nlayers 1\nhidden_dim 6\nmax_epochs 10\npatience 10\nseed 4\n";
    }
    auto base = run("train --config " + kDir + "/sweep.cfg --synthetic tree --tree-branching 2 "
                    "--tree-depth 4 --out " +
                    kDir + "/a.json");
    CHECK(base.exit_code == 0);

    // a fusion=none variant run through the ablation flag
    auto ablated = run("train --config " + kDir + "/sweep.cfg --synthetic tree "
                       "--tree-branching 2 --tree-depth 4 --variant fusion=none --out " +
                       kDir + "/b.json");
    CHECK(ablated.exit_code == 0);

    std::ifstream in(kDir + "/b.json");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("\"fusion\": \"none\"") != std::string::npos);
}

TEST_CASE("bad config file is rejected with a named key") {
    {
        std::ofstream cfg(kDir + "/bad.cfg");
        cfg << "layrs 2\n";
    }
    auto res = run("train --config " + kDir + "/bad.cfg --synthetic tree --out " + kDir + "/x.json",
                   true);
    CHECK(res.exit_code != 0);
    CHECK(res.output.find("layrs") != std::string::npos);
}

TEST_CASE("gradcheck passes normally and fails under sabotage") {
    auto good = run("gradcheck --seed 5");
    CHECK(good.exit_code == 0);
    CHECK(good.output.find("max_rel_error") != std::string::npos);

    auto bad = run("gradcheck --seed 5 --sabotage");
    CHECK(bad.exit_code == 1);
}

TEST_CASE("repeated invocations are identical") {
    auto a = run("gradcheck --seed 12");
    auto b = run("gradcheck --seed 12");
    CHECK(a.output == b.output);

    auto h1 = run("hyperbolicity --edges " + kDir + "/tr.edges --mode sampled --samples 5000 "
                  "--seed 3");
    auto h2 = run("hyperbolicity --edges " + kDir + "/tr.edges --mode sampled --samples 5000 "
                  "--seed 3");
    CHECK(h1.output == h2.output);
}
