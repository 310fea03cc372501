// End-to-end checks of the CLI binary: byte-stable outputs, config-file
// precedence, exit codes. The binary path comes from the build system.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "semergo/io.hpp"

namespace {

std::string cli_path() { return SEMERGO_CLI_PATH; }

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

RunResult run_cli(const std::string& args, const std::string& tag) {
    std::string out_path = std::string("/tmp/semergo_test_") + tag + ".out";
    std::string cmd = cli_path() + " " + args + " > " + out_path + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    std::ifstream in(out_path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    r.stdout_text = ss.str();
    std::remove(out_path.c_str());
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cli: identical configs give byte-identical outputs") {
    std::string csv1 = "/tmp/semergo_det1.csv", json1 = "/tmp/semergo_det1.json";
    std::string csv2 = "/tmp/semergo_det2.csv", json2 = "/tmp/semergo_det2.json";
    std::string args = "density --m 3 --r 1 --ngrid 25,50 --csv ";
    RunResult a = run_cli(args + csv1 + " --json " + json1, "det1");
    RunResult b = run_cli(args + csv2 + " --json " + json2, "det2");
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    CHECK(a.stdout_text == b.stdout_text);
    CHECK(slurp(csv1) == slurp(csv2));
    CHECK(slurp(json1) == slurp(json2));
    CHECK(slurp(csv1).substr(0, 32) == "n,empirical,limit,abs_error\n25,0");
    for (const char* p : {"/tmp/semergo_det1.csv", "/tmp/semergo_det1.json",
                          "/tmp/semergo_det2.csv", "/tmp/semergo_det2.json"})
        std::remove(p);
}

TEST_CASE("cli: --threads does not change the numbers") {
    RunResult one = run_cli("weyl --alpha sqrt2 --freq 1 --ngrid 25,50 --threads 1", "t1");
    RunResult four = run_cli("weyl --alpha sqrt2 --freq 1 --ngrid 25,50 --threads 4", "t4");
    CHECK(one.exit_code == 0);
    CHECK(one.stdout_text == four.stdout_text);
}

TEST_CASE("cli: config file supplies defaults, flags win") {
    std::string cfg_path = "/tmp/semergo_test.cfg";
    {
        std::ofstream cfg(cfg_path);
        cfg << "# experiment defaults\n";
        cfg << "m = 5\n";
        cfg << "r = 2\n";
        cfg << "ngrid = 10,20\n";
    }
    RunResult from_cfg = run_cli("density --config " + cfg_path, "cfg1");
    CHECK(from_cfg.exit_code == 0);
    // grid from the config file: rows at n=10 and n=20
    CHECK(from_cfg.stdout_text.find("\n10,") != std::string::npos);
    CHECK(from_cfg.stdout_text.find("\n20,") != std::string::npos);

    // explicit flag overrides the config value
    RunResult overridden = run_cli("density --config " + cfg_path + " --ngrid 15,30", "cfg2");
    CHECK(overridden.stdout_text.find("\n15,") != std::string::npos);
    CHECK(overridden.stdout_text.find("\n10,") == std::string::npos);
    std::remove(cfg_path.c_str());
}

TEST_CASE("cli: manifest carries a reorder-stable config hash") {
    std::map<std::string, std::string> a{{"m", "3"}, {"r", "1"}, {"ngrid", "25,50"}};
    std::map<std::string, std::string> b{{"ngrid", "25,50"}, {"r", "1"}, {"m", "3"}};
    CHECK(semergo::config_hash(a) == semergo::config_hash(b));
    std::map<std::string, std::string> c = a;
    c["m"] = "5";
    CHECK(semergo::config_hash(a) != semergo::config_hash(c));

    std::string json = "/tmp/semergo_m.json", manifest = "/tmp/semergo_m.manifest.json";
    RunResult r = run_cli("density --m 3 --r 1 --ngrid 10,20 --json " + json + " --manifest " +
                              manifest,
                          "man");
    CHECK(r.exit_code == 0);
    std::string m = slurp(manifest);
    CHECK(m.find("config_hash") != std::string::npos);
    CHECK(m.find("timestamp") != std::string::npos);
    // data outputs carry no timestamp
    CHECK(slurp(json).find("timestamp") == std::string::npos);
    std::remove(json.c_str());
    std::remove(manifest.c_str());
}

TEST_CASE("cli: exit codes") {
    CHECK(run_cli("counts --nmax 6 --oracle enumerate", "oracle").exit_code == 0);
    CHECK(run_cli("factor x^2+x", "factok").exit_code == 0);
    // usage errors exit 1 (or CLI11's standard usage statuses != 0, != 2)
    CHECK(run_cli("factor", "factbad").exit_code != 0);
    CHECK(run_cli("density --m 1 --r 0", "badm").exit_code == 1);
    CHECK(run_cli("nonsense-subcommand", "nosub").exit_code != 0);
    // non-classical instances are refused by the averaging pipeline
    RunResult graph = run_cli(
        "br-average --instance graph:complete=4,nmax=12 --system finite:m=2 "
        "--observable indicator:r=0 --ngrid 6,10",
        "k4br");
    CHECK(graph.exit_code == 0);  // K4 is classical (delta = 1)
}

TEST_CASE("cli: factor output format matches the documented shape") {
    RunResult r = run_cli("factor --instance poly:p=2,k=1 x^2+x", "factfmt");
    CHECK(r.stdout_text == "x * (x+1), Omega=2\n");
    RunResult one = run_cli("factor 1", "factone");
    CHECK(one.stdout_text == "1, Omega=0\n");
}
