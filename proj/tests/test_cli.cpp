#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path work = fs::temp_directory_path() / "frechet_cli_test";

int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + FRECHET_CLI_PATH + " " + args + " >" + (work / "stdout.txt").string() +
                            " 2>" + (work / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string path(const std::string& name) { return (work / name).string(); }

struct Workspace {
    Workspace() {
        fs::remove_all(work);
        fs::create_directories(work);
    }
    ~Workspace() { fs::remove_all(work); }
};

}  // namespace

TEST_CASE("command-line workflow") {
    Workspace ws;
    REQUIRE(run("simulate --n 30 --noise-vars 1 --seed 17 --out " + path("d.csv") + " --truth " + path("t.csv")) == 0);
    CHECK(slurp(path("d.csv")).rfind("obs_id,var_name,time,value\n", 0) == 0);
    CHECK(slurp(path("t.csv")).rfind("obs_id,G1,G2,beta\n", 0) == 0);

    REQUIRE(run("simulate --n 30 --noise-vars 1 --seed 17 --out " + path("d2.csv")) == 0);
    CHECK(slurp(path("d.csv")) == slurp(path("d2.csv")));

    const std::string train = "train --data " + path("d.csv") + " --trees 12 --mtry 2 --seed 4 --out ";
    REQUIRE(run(train + path("m1.json"), "FRECHET_WORKERS=1") == 0);
    REQUIRE(run(train + path("m4.json"), "FRECHET_WORKERS=4") == 0);
    const auto model = slurp(path("m1.json"));
    CHECK(model == slurp(path("m4.json")));
    CHECK(model.find("\"format\":\"frechet-forest\"") != std::string::npos);
    CHECK(model.find("\"version\":1") != std::string::npos);

    REQUIRE(run("predict --model " + path("m1.json") + " --data " + path("d.csv") + " --out " + path("p.csv")) == 0);
    const auto preds = slurp(path("p.csv"));
    CHECK(preds.rfind("obs_id,time,value\n", 0) == 0);
    CHECK(preds.find("\n30,") != std::string::npos);

    REQUIRE(run("oob --model " + path("m1.json") + " --data " + path("d.csv")) == 0);
    CHECK(slurp(work / "stdout.txt").rfind("oob_error,", 0) == 0);

    const std::string vi = "importance --model " + path("m1.json") + " --data " + path("d.csv") +
                           " --permutation-seed 9 --out ";
    REQUIRE(run(vi + path("vi1.csv"), "FRECHET_WORKERS=1") == 0);
    REQUIRE(run(vi + path("vi3.csv"), "FRECHET_WORKERS=3") == 0);
    const auto table = slurp(path("vi1.csv"));
    CHECK(table == slurp(path("vi3.csv")));
    CHECK(table.rfind("variable_name,importance,rank\n", 0) == 0);
    CHECK(table.find("\nN1,") != std::string::npos);

    REQUIRE(run("train --mode tree --select hubert --data " + path("d.csv") + " --seed 1 --out " + path("t.json")) ==
            0);
    REQUIRE(run("predict --model " + path("t.json") + " --data " + path("d.csv")) == 0);
    CHECK(run("oob --model " + path("t.json") + " --data " + path("d.csv")) == 2);

    REQUIRE(run("prune-info --data " + path("d.csv") + " --seed 1 --out " + path("prune.csv")) == 0);
    CHECK(slurp(path("prune.csv")).rfind("step,alpha,leaves,cost,gamma,cv_error,selected\n", 0) == 0);

    const std::string bench = "benchmark --data " + path("d.csv") + " --reps 2 --trees 5 --seed 3 --out ";
    REQUIRE(run(bench + path("b1.csv"), "FRECHET_WORKERS=1") == 0);
    REQUIRE(run(bench + path("b2.csv"), "FRECHET_WORKERS=2") == 0);
    CHECK(slurp(path("b1.csv")) == slurp(path("b2.csv")));
}

TEST_CASE("command-line errors map to exit codes") {
    Workspace ws;
    CHECK(run("") == 2);
    CHECK(run("simulate --n 5") == 2);
    CHECK(run("simulate --n 0 --seed 1") == 2);
    CHECK(run("nonsense") == 2);
    CHECK(run("--help") == 0);

    std::ofstream(path("bad.csv")) << "id,var,t,v\n1,X,0,1\n";
    CHECK(run("train --data " + path("bad.csv") + " --seed 1 --out " + path("m.json")) == 2);

    std::ofstream(path("dup.csv")) << "obs_id,var_name,time,value\n1,X,0,1\n1,X,0,2\n1,__output__,0,1\n";
    CHECK(run("train --data " + path("dup.csv") + " --seed 1 --out " + path("m.json")) == 2);

    REQUIRE(run("simulate --n 10 --seed 2 --out " + path("d.csv")) == 0);
    CHECK(run("train --data " + path("d.csv") + " --out " + path("m.json")) == 2);
    CHECK(run("train --data " + path("d.csv") + " --seed 1 --mtry 3 --out " + path("m.json")) == 2);
    CHECK(run("benchmark --data " + path("d.csv") + " --seed 1 --test-fraction 1.5") == 2);

    std::ofstream(path("v2.json")) << R"({"format":"frechet-forest","version":2})";
    CHECK(run("predict --model " + path("v2.json") + " --data " + path("d.csv")) == 2);
    std::ofstream(path("junk.json")) << "{not json";
    CHECK(run("predict --model " + path("junk.json") + " --data " + path("d.csv")) == 2);
}
