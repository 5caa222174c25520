#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "hamm/record.hpp"

namespace {

const std::string kData = HAMM_DATA_DIR;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "hammcert");
    std::ostringstream out, err;
    const int code = hamm::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path temp(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("hamm_cli_" + name);
}

} // namespace

TEST_CASE("certify-existence on example 1") {
    const auto rec_path = temp("exist.rec");
    const auto o = run({"certify-existence", "--problem", kData + "/example1.prob", "--r", "0.05", "--R", "1", "--out",
                        rec_path.string()});
    CHECK(o.code == 0);
    CHECK(o.out.find("certified") != std::string::npos);
    const auto rec = hamm::Record::parse(slurp(rec_path));
    CHECK(*rec.get("verdict") == "certified");
    CHECK(rec.number("idx0") == 0.05);
    CHECK(rec.number("exit_code") == 0);

    CHECK(run({"certify-existence", "--problem", kData + "/example1.prob", "--r", "0.1", "--R", "1"}).code == 1);
    CHECK(run({"certify-existence", "--problem", kData + "/example2.prob", "--r", "0.05", "--R", "1"}).code == 1);
}

TEST_CASE("certify-nonexistence") {
    const auto o = run({"certify-nonexistence", "--problem", kData + "/example2.prob", "--budget", "6"});
    CHECK(o.code == 0);
    CHECK(o.out.find("0.95") != std::string::npos);
    CHECK(run({"certify-nonexistence", "--problem", kData + "/example1.prob"}).code == 2); // no witness
}

TEST_CASE("solve") {
    const auto table = temp("solution.csv");
    const auto rec = temp("solve.rec");
    const auto o = run({"solve", "--problem", kData + "/example1.prob", "--n", "64", "--starts", "4", "--r", "0.05",
                        "--R", "1", "--nontrivial", "--out", table.string(), "--record", rec.string()});
    CHECK(o.code == 0);
    const auto csv = slurp(table);
    CHECK(csv.rfind("t,u,du\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 66);
    const auto r = hamm::Record::parse(slurp(rec));
    CHECK(*r.get("status") == "converged");
    CHECK(*r.get("in_annulus") == "true");

    CHECK(run({"solve", "--problem", kData + "/example2.prob", "--n", "32", "--starts", "4", "--nontrivial"}).code == 1);
    CHECK(run({"solve", "--problem", kData + "/example2.prob", "--n", "32", "--starts", "4"}).code == 0);
}

TEST_CASE("sweep") {
    const auto out = temp("sweep.csv");
    const auto o = run({"sweep", "--problem", kData + "/example2.prob", "--n", "32", "--r", "0.05", "--R", "1",
                        "--lambda", "0:1:3", "--eta1", "0:1:3", "--eta2", "0:1:3", "--witness", "--threads", "3",
                        "--out", out.string()});
    CHECK(o.code == 0);
    const auto csv = slurp(out);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 28);
    CHECK(csv.find("nonexistence") != std::string::npos);
}

TEST_CASE("validate") {
    CHECK(run({"validate", "--problem", kData + "/example1.prob", "--n", "64"}).code == 0);
    CHECK(run({"validate", "--problem", kData + "/example2.prob", "--n", "64"}).code == 0);

    const auto bad = temp("bad_sign.prob");
    std::string text = slurp(kData + "/example1.prob");
    const auto pos = text.find("exp(t*(u + v))");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 14, "u - 1");
    std::ofstream(bad) << text;
    const auto o = run({"validate", "--problem", bad.string(), "--n", "32"});
    CHECK(o.code == 1);
    CHECK(o.out.find("WARN") != std::string::npos);
}

TEST_CASE("usage and input errors") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"certify-existence", "--problem", kData + "/example1.prob"}).code == 2);
    CHECK(run({"certify-existence", "--problem", kData + "/missing.prob", "--r", "0.05", "--R", "1"}).code == 2);
    CHECK(run({"certify-existence", "--problem", kData + "/example1.prob", "--r", "1", "--R", "0.5"}).code == 2);
    CHECK(run({"validate", "--problem", kData + "/example1.prob", "--n", "1"}).code == 2);
    const auto o = run({"certify-existence", "--problem", kData + "/example1.prob", "--r", "0.05", "--R", "1", "--n", "16"});
    CHECK(o.err.empty());
}
