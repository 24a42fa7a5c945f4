#include "cli.hpp"

#include "fibcon/mesh_fixtures.hpp"
#include "fibcon/surface_morse.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace fs = std::filesystem;
using fibcon::cli::run_cli;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite()
    {
        dir_ = fs::temp_directory_path() / ("fibcon_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
        auto put = [](const std::string& name, const std::string& text) { std::ofstream(dir_ / name) << text; };
        put("z2.iso", "h: 0\ntorsion: [1/2]\n");
        put("pm.iso", "h: 1\nweights: [[1,-1]]\n");
        put("pp.iso", "h: 1\nweights: [[1,1]]\n");
        put("rank.iso", "h: 1\n");
        put("inj.iso", "h: 1\nweights: [[2,-2]]\n");
        put("bad.iso", "h: 1\nweights: [[1,-1]\n");
        put("ell.qf", "1 0\n0 1\n");
        put("ff.qf", "1 0 0 0\n0 1 0 0\n0 0 -1 0\n0 0 0 -1\n\n0 0 0 1\n0 0 1 0\n0 1 0 0\n1 0 0 0\n");
        put("bad.qf", "1 2\n3 4\n");
        put("bump_z2.sys", "name=bump_z2\nn=1\ndomain=box(-3,3;-3,3)\n"
                           "g=exp(-((x-1)^2+y^2)) + exp(-((x+1)^2+y^2))\n"
                           "stabilizer_hints=[0,0:disconnected]\n");
        put("broken.sys", "n=1\ndomain=torus2\ng=cos(x\n");
        auto mesh = [](const std::string& name, const fibcon::morse::ScalarMesh& m) {
            std::ofstream f(dir_ / name);
            fibcon::morse::write_soff(f, m);
        };
        mesh("oct.soff", fibcon::morse::fixtures::octahedron());
        mesh("cos.soff", fibcon::morse::fixtures::cos_cos_torus(64));
        mesh("bump.soff", fibcon::morse::fixtures::double_bump_sphere(3));
        mesh("patch.soff", fibcon::morse::fixtures::grid_patch(4));
    }
    static void TearDownTestSuite() { fs::remove_all(dir_); }
    static std::string p(const std::string& name) { return (dir_ / name).string(); }

    static fs::path dir_;
};

fs::path Cli::dir_;

} // namespace

TEST_F(Cli, DefpolyOutputs)
{
    EXPECT_EQ(run({"defpoly", p("z2.iso")}).out, "xi=[2] N=2 tall=true\n");
    EXPECT_EQ(run({"defpoly", p("pm.iso")}).out, "xi=[1,1] N=2 tall=true\n");
    EXPECT_EQ(run({"defpoly", p("pp.iso")}).out, "xi=[1,-1] N=2 tall=false\n");
}

TEST_F(Cli, DefpolyExitCodes)
{
    EXPECT_EQ(run({"defpoly", p("z2.iso")}).code, 0);
    EXPECT_EQ(run({"defpoly", p("rank.iso")}).code, 3);
    EXPECT_EQ(run({"defpoly", p("inj.iso")}).code, 2);
    EXPECT_EQ(run({"defpoly", p("bad.iso")}).code, 2);
    EXPECT_EQ(run({"defpoly", p("missing.iso")}).code, 2);
    EXPECT_EQ(run({"defpoly"}).code, 2);
}

TEST_F(Cli, Classify)
{
    const auto e = run({"classify", p("ell.qf")});
    EXPECT_EQ(e.code, 0);
    EXPECT_EQ(e.out, "signature=1,0,0 n=1\n");
    EXPECT_EQ(run({"classify", p("ff.qf"), "--seed", "3"}).out, "signature=0,0,1 n=2\n");
    EXPECT_EQ(run({"classify", p("bad.qf")}).code, 2);
}

TEST_F(Cli, ReebSummaries)
{
    EXPECT_EQ(run({"reeb", p("oct.soff")}).out, "chi=2 genus=0 saddles=0 all_levels_connected=true\n");
    EXPECT_EQ(run({"reeb", p("cos.soff")}).out, "chi=0 genus=1 saddles=2 all_levels_connected=true\n");
    const auto b = run({"reeb", p("bump.soff"), "--dot", p("bump.dot")});
    EXPECT_EQ(b.code, 0);
    EXPECT_EQ(b.out, "chi=2 genus=0 saddles=1 all_levels_connected=false\n");
    EXPECT_EQ(read_file(p("bump.dot")).rfind("graph reeb {", 0), 0u);
    EXPECT_EQ(run({"reeb", p("patch.soff")}).code, 2);
    EXPECT_EQ(run({"reeb", p("missing.soff")}).code, 2);
}

TEST_F(Cli, Levels)
{
    const auto r = run({"levels", p("cos.soff")});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("level=-1 components=1"), std::string::npos);
    EXPECT_NE(r.out.find("critical_level=0 saddles=2"), std::string::npos);
    EXPECT_NE(run({"levels", p("bump.soff"), "--levels", "30"}).out.find("components=2"), std::string::npos);
    EXPECT_EQ(run({"levels", p("cos.soff"), "--levels", "a,b"}).code, 2);
}

TEST_F(Cli, Fibers)
{
    const auto r = run({"fibers", "torus_cos", "--levels", "0,2.5", "--res", "128", "--csv", p("labels.csv")});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("level=0 components=1"), std::string::npos);
    EXPECT_NE(r.out.find("level=2.5 components=0 cells=0"), std::string::npos);
    EXPECT_EQ(read_file(p("labels_0.csv")).rfind("cell_index,label\n", 0), 0u);
    EXPECT_EQ(read_file(p("labels_1.csv")), "cell_index,label\n");
    EXPECT_EQ(run({"fibers", "banana", "--levels", "0"}).code, 2);
    EXPECT_EQ(run({"fibers", "ff_model", "--levels", "0", "--beta", "0,1"}).code, 2);
}

TEST_F(Cli, VerifyExitCodes)
{
    EXPECT_EQ(run({"verify", "ff_model", "--levels", "-1,0,1"}).code, 0);
    const auto t = run({"verify", "torus_cos"});
    EXPECT_EQ(t.code, 4);
    EXPECT_NE(t.out.find("in one fiber"), std::string::npos);
    EXPECT_EQ(run({"verify", "double_bump"}).code, 0);
    EXPECT_EQ(run({"verify", "nosuch"}).code, 2);
    EXPECT_EQ(run({"verify", p("broken.sys")}).code, 2);
    EXPECT_EQ(run({"verify", "torus_cos", "--res", "1"}).code, 2);
    // Declaring the saddle's stabilizer disconnected predicts connected fibers,
    // which the oracle refutes.
    EXPECT_EQ(run({"verify", p("bump_z2.sys"), "--levels", "0.9"}).code, 1);
}

TEST_F(Cli, UsageErrors)
{
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"verify", "torus_cos", "--bogus"}).code, 2);
    EXPECT_EQ(run({"verify", "torus_cos", "--res", "x"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, VerifyIsDeterministic)
{
    const std::vector<std::string> args{"verify", "torus_cos", "--res", "128", "--seed", "5", "--csv", p("v.csv")};
    const auto a = run(args);
    const std::string csv_a = read_file(p("v.csv"));
    auto threaded = args;
    threaded.insert(threaded.begin(), {"--threads", "3"});
    const auto b = run(threaded);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(csv_a, read_file(p("v.csv")));
}

TEST_F(Cli, GoldenOutputs)
{
    const fs::path golden(FIBCON_GOLDEN_DIR);
    EXPECT_EQ(run({"verify", "torus_cos", "--res", "128", "--levels", "-1.5,0,1.5"}).out,
              read_file(golden / "verify_torus_cos.txt"));
    EXPECT_EQ(run({"verify", "double_bump", "--res", "256"}).out, read_file(golden / "verify_double_bump.txt"));
    run({"fibers", "double_bump", "--levels", "0.9", "--res", "64", "--csv", p("bump.csv")});
    EXPECT_EQ(read_file(p("bump.csv")), read_file(golden / "fibers_double_bump_64.csv"));
}
