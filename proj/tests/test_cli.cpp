#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "ipd/config.hpp"

namespace {

namespace fs = std::filesystem;
using ipd::Json;

struct CliResult {
    int code = -1;
    std::string out;  // stdout and stderr combined unless noted
};

CliResult run_cli(const std::string& args, const std::string& env = "",
                  bool merge_stderr = true) {
    const std::string cmd = (env.empty() ? "" : env + " ") + IPD_CLI_PATH + " " + args +
                            (merge_stderr ? " 2>&1" : " 2>/dev/null");
    CliResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe)) {
        result.out.append(buf, n);
        if (n < sizeof(buf)) break;
    }
    const int status = pclose(pipe);
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("scores prints the analytic pair with twelve digits") {
    const CliResult r = run_cli("scores -p 11/13,1/2,7/26,0 -q 1,1,1,1");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "s_x = 3.72727272727\n"));
    CHECK(contains(r.out, "s_y = 1.90909090909\n"));
    CHECK(contains(r.out, "route = determinant\n"));

    const CliResult flat = run_cli("scores -p 1,1,1,1 -q 1,1,1,1 --game 5,3,1,0");
    CHECK(flat.code == 0);
    CHECK(contains(flat.out, "s_x = 3\n"));
    CHECK(contains(flat.out, "s_y = 3\n"));
}

TEST_CASE("scores json output is machine readable") {
    const CliResult r =
        run_cli("scores -p 0.9,0.2,0.7,0.4 -q 0.3,0.8,0.1,0.6 --format json", "", false);
    CHECK(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j.at("route") == "determinant");
    CHECK(j.at("degenerate") == false);
    CHECK(j.at("s_x").is_number());
    REQUIRE(j.at("stationary").at("v").size() == 4);
    CHECK(j.at("stationary").at("unique") == true);
    CHECK(j.at("stationary").at("route") == "linear_solve");
}

TEST_CASE("stationary solves the flat chain exactly") {
    const CliResult r = run_cli("stationary -p 0.5,0.5,0.5,0.5 -q 0.5,0.5,0.5,0.5");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "v = (0.25, 0.25, 0.25, 0.25)\n"));
    CHECK(contains(r.out, "unique = true\n"));
    CHECK(contains(r.out, "route = linear_solve\n"));
}

TEST_CASE("stationary reports non-convergence as a config failure") {
    const CliResult r = run_cli("stationary -p 1,0,1,1 -q 0,0,1,0");
    CHECK(r.code == 3);
    CHECK(contains(r.out, "did not converge"));
    const CliResult damped = run_cli("stationary -p 1,0,1,1 -q 0,0,1,0 --damping 0.2");
    CHECK(damped.code == 0);
    CHECK(contains(damped.out, "unique = false"));
}

TEST_CASE("zd extort reproduces the worked strategy") {
    const CliResult r = run_cli("zd extort --chi 3 --phi 1/26 --game 5,3,1,0");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "p = (0.846153846154, 0.5, 0.269230769231, 0)\n"));
    CHECK(contains(r.out, "phi_bound = 0.0769230769231\n"));
    CHECK(contains(r.out, "best_case_s_x = 3.72727272727\n"));
    CHECK(contains(r.out, "best_case_s_y = 1.90909090909\n"));
    CHECK(contains(r.out, "feasible = true\n"));
}

TEST_CASE("zd extort rejects an overshooting scale with the violation") {
    const CliResult r = run_cli("zd extort --chi 2 --phi 0.45 --game 1.5,1.25,1,0");
    CHECK(r.code == 2);
    CHECK(contains(r.out, "p3 = 1.125"));
    CHECK(contains(r.out, "feasible = false"));
    const CliResult nonpos = run_cli("zd extort --chi 2 --phi 0 --game 5,3,1,0");
    CHECK(nonpos.code == 2);
    CHECK(contains(nonpos.out, "phi must be > 0"));
    const CliResult badchi = run_cli("zd extort --chi 0.5 --phi 0.1 --game 5,3,1,0");
    CHECK(badchi.code == 3);
}

TEST_CASE("zd bound prints the feasibility cap") {
    const CliResult remark = run_cli("zd bound --chi 2 --game 1.5,1.25,1,0");
    CHECK(remark.code == 0);
    CHECK(contains(remark.out, "phi_bound = 0.4\n"));
    const CliResult std_game = run_cli("zd bound --chi 3 --game 5,3,1,0");
    CHECK(std_game.code == 0);
    CHECK(contains(std_game.out, "phi_bound = 0.0769230769231\n"));
}

TEST_CASE("zd set-score reports the enforced opponent score") {
    const CliResult r = run_cli("zd set-score --p1 0.8 --p4 0.1");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "s_y = 1.66666666667\n"));
    CHECK(contains(r.out, "feasible = true\n"));

    const CliResult degenerate = run_cli("zd set-score --p1 1 --p4 0");
    CHECK(degenerate.code == 2);
    CHECK(contains(degenerate.out, "enforces no score"));

    const CliResult infeasible = run_cli("zd set-score --p1 0 --p4 1");
    CHECK(infeasible.code == 2);
    CHECK(contains(infeasible.out, "violations"));
}

TEST_CASE("json error objects appear on every failing path") {
    const CliResult degenerate = run_cli("zd set-score --p1 1 --p4 0 --format json");
    CHECK(degenerate.code == 2);
    CHECK(Json::parse(degenerate.out).at("error").at("code") == 2);

    const CliResult badgame = run_cli("scores -p 1,1,1,1 -q 1,1,1,1 --game 1,3,5,0 --format json");
    CHECK(badgame.code == 3);
    CHECK(Json::parse(badgame.out).at("error").at("code") == 3);

    const CliResult badflag = run_cli("scores --nonsense --format json");
    CHECK(badflag.code == 64);
    CHECK(Json::parse(badflag.out).at("error").at("code") == 64);

    // An infeasible construction still reports the full candidate on stdout.
    const CliResult infeasible =
        run_cli("zd extort --chi 2 --phi 0.45 --game 1.5,1.25,1,0 --format json", "", false);
    CHECK(infeasible.code == 2);
    const Json j = Json::parse(infeasible.out);
    CHECK(j.at("feasible") == false);
    REQUIRE(j.at("violations").size() == 1);
    CHECK(j.at("violations")[0].at("component") == 3);
}

TEST_CASE("usage errors exit 64 with help on stderr") {
    const CliResult noargs = run_cli("");
    CHECK(noargs.code == 64);
    const CliResult badflag = run_cli("scores --nonsense");
    CHECK(badflag.code == 64);
    CHECK(contains(badflag.out, "--help"));
    const CliResult both = run_cli("match --x cooperator --y defector --rounds 5 --omega 0.5");
    CHECK(both.code == 64);
    const CliResult help = run_cli("--help");
    CHECK(help.code == 0);
    CHECK(contains(help.out, "tournament"));
}

TEST_CASE("match runs are seeded and reproducible") {
    const std::string args =
        "match --x random:0.3 --y adaptive:0.1,5 --rounds 50 --seed 7 --transcript";
    const CliResult a = run_cli(args);
    const CliResult b = run_cli(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(contains(a.out, "rounds = 50\n"));
    const CliResult c = run_cli(
        "match --x random:0.3 --y adaptive:0.1,5 --rounds 50 --seed 8 --transcript");
    CHECK(c.out != a.out);
}

TEST_CASE("match falls back to the env seed") {
    const CliResult env = run_cli("match --x random:0.5 --y random:0.5 --rounds 5",
                                  "IPD_SEED=99");
    CHECK(env.code == 0);
    CHECK(contains(env.out, "seed = 99\n"));
    const CliResult flag = run_cli("match --x random:0.5 --y random:0.5 --rounds 5 --seed 3",
                                   "IPD_SEED=99");
    CHECK(contains(flag.out, "seed = 3\n"));
}

TEST_CASE("match validates players and games") {
    CHECK(run_cli("match --x alternator --y cooperator").code == 3);
    CHECK(run_cli("match --x extort:2,0.45 --y cooperator --game 1.5,1.25,1,0").code == 2);
    CHECK(run_cli("match --x cooperator --y defector --game 1,3,5,0").code == 3);
}

TEST_CASE("tournament writes deterministic output files") {
    TempDir dir("ipd_cli_tournament");
    const fs::path config = dir.path / "config.json";
    {
        std::ofstream out(config);
        out << R"({"game": [5,3,1,0],
                   "players": [{"kind":"random","coop_rate":0.3},
                               {"kind":"adaptive","epsilon":0.15,"k":5},
                               {"kind":"tit_for_tat"}],
                   "length": {"fixed": 40}, "repetitions": 3, "seed": 11})";
    }
    const fs::path out1 = dir.path / "run1";
    const fs::path out2 = dir.path / "run2";
    const CliResult a = run_cli("tournament --config " + config.string() + " --output " +
                                    out1.string(),
                                "", false);
    const CliResult b = run_cli("tournament --config " + config.string() + " --output " +
                                    out2.string(),
                                "", false);
    CHECK(a.code == 0);
    CHECK(b.code == 0);
    for (const char* name : {"summary.csv", "payoff_matrix.csv", "tournament.json"}) {
        CAPTURE(name);
        const std::string c1 = slurp(out1 / name);
        const std::string c2 = slurp(out2 / name);
        CHECK(!c1.empty());
        CHECK(c1 == c2);
    }
    const std::string summary = slurp(out1 / "summary.csv");
    CHECK(summary.rfind("rank,player,median_score,mean_score,cooperation_rate,"
                        "initial_cooperation_rate,wins,draws\n",
                        0) == 0);
    CHECK(a.out == summary);  // text mode echoes the summary table

    // A different master seed changes the results.
    const fs::path out3 = dir.path / "run3";
    const CliResult c = run_cli("tournament --config " + config.string() + " --output " +
                                    out3.string() + " --seed 12",
                                "", false);
    CHECK(c.code == 0);
    CHECK(slurp(out3 / "tournament.json") != slurp(out1 / "tournament.json"));
}

TEST_CASE("tournament surfaces config problems") {
    TempDir dir("ipd_cli_tournament_bad");
    CHECK(run_cli("tournament --config " + (dir.path / "missing.json").string()).code == 3);
    const fs::path broken = dir.path / "broken.json";
    {
        std::ofstream out(broken);
        out << "{not json";
    }
    CHECK(run_cli("tournament --config " + broken.string()).code == 3);
    const fs::path lonely = dir.path / "lonely.json";
    {
        std::ofstream out(lonely);
        out << R"({"game": [5,3,1,0], "players": [{"kind":"cooperator"}]})";
    }
    CHECK(run_cli("tournament --config " + lonely.string()).code == 3);
}

TEST_CASE("replicator emits a trajectory and the threshold pair") {
    TempDir dir("ipd_cli_replicator");
    const CliResult r = run_cli("replicator --b 3 --c 1 --omega 0.9 --x0 0.1,0.2,0.7 "
                                "--horizon 100 --record-every 100 --output " +
                                dir.path.string());
    CHECK(r.code == 0);
    CHECK(contains(r.out, "defector_indifference_x3 = 0.37037037037\n"));
    CHECK(contains(r.out, "defector_indifference_x3_undiscounted = 0.333333333333\n"));

    const std::string traj = slurp(dir.path / "trajectory.csv");
    CHECK(traj.rfind("t,x1,x2,x3\n", 0) == 0);
    CHECK(contains(traj, "\n0,0.1,0.2,0.7\n"));

    const Json j = Json::parse(slurp(dir.path / "replicator.json"));
    CHECK(j.at("defector_indifference_x3").get<double>() ==
          doctest::Approx(1.0 / 2.7).epsilon(1e-11));
    bool defector_attracting = false;
    for (const Json& f : j.at("fixed_points")) {
        if (f.at("kind") == "vertex" && f.at("at") == "defector") {
            defector_attracting = f.at("stability") == "attracting";
        }
    }
    CHECK(defector_attracting);
    REQUIRE(j.at("final").size() == 3);
    CHECK(j.at("final")[1].get<double>() < 0.01);  // defectors die out from this start

    // Reruns are byte-identical.
    TempDir dir2("ipd_cli_replicator2");
    const CliResult r2 = run_cli("replicator --b 3 --c 1 --omega 0.9 --x0 0.1,0.2,0.7 "
                                 "--horizon 100 --record-every 100 --output " +
                                 dir2.path.string());
    CHECK(r2.code == 0);
    CHECK(slurp(dir2.path / "replicator.json") == slurp(dir.path / "replicator.json"));
    CHECK(slurp(dir2.path / "trajectory.csv") == slurp(dir.path / "trajectory.csv"));
}

TEST_CASE("replicator grid mode maps the basins") {
    TempDir dir("ipd_cli_replicator_grid");
    const CliResult r = run_cli("replicator --b 3 --c 1 --omega 0.9 --grid 4 "
                                "--horizon 300 --output " +
                                dir.path.string());
    CHECK(r.code == 0);
    const std::string basins = slurp(dir.path / "basins.csv");
    CHECK(basins.rfind("start_x1,start_x2,start_x3,final_x1,final_x2,final_x3\n", 0) == 0);
    long lines = 0;
    for (const char ch : basins) {
        if (ch == '\n') ++lines;
    }
    CHECK(lines == 17);  // header + 16 grid points
    const Json j = Json::parse(slurp(dir.path / "replicator.json"));
    CHECK(j.at("defectors_die_out").get<long>() + j.at("defectors_take_over").get<long>() ==
          16);
    CHECK(j.at("unresolved") == 0);

    // Below the case boundary everything drifts to defection.
    TempDir dir2("ipd_cli_replicator_grid2");
    const CliResult low = run_cli("replicator --b 3 --c 1 --omega 0.2 --grid 4 "
                                  "--horizon 300 --output " +
                                  dir2.path.string());
    CHECK(low.code == 0);
    const Json jlow = Json::parse(slurp(dir2.path / "replicator.json"));
    CHECK(jlow.at("defectors_take_over") == 16);
}

TEST_CASE("replicator validates its flags") {
    CHECK(run_cli("replicator --b 3 --c 1 --omega 0.9").code == 3);
    CHECK(run_cli("replicator --b 3 --c 1 --omega 0.9 --x0 0.1,0.2,0.7 --step 0").code == 3);
    CHECK(run_cli("replicator --b 3 --c 1 --omega 1.5 --x0 0.1,0.2,0.7").code == 3);
    CHECK(run_cli("replicator --b 1 --c 3 --omega 0.9 --x0 0.1,0.2,0.7").code == 3);
    CHECK(run_cli("replicator --b 3 --c 1 --omega 0.9 --x0 0.5,0.5,0.5").code == 3);
}

}  // TEST_SUITE
