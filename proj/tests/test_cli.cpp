#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "qfcover/cli.hpp"

using namespace qfcover;
using namespace qfcover::cli;

namespace {

struct Result
{
    int code;
    std::string out, err;
};

Result run_config(RunConfig const &c)
{
    std::ostringstream out, err;
    int code = run(c, out, err, "test");
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(std::string const &s)
{
    std::vector<std::string> v;
    std::istringstream in(s);
    std::string l;
    while (std::getline(in, l))
        v.push_back(l);
    return v;
}

int shell(std::string const &args, std::string *captured = nullptr)
{
    auto tmp = std::filesystem::temp_directory_path() / "qfcover_cli_out.txt";
    std::string cmd = std::string(QFCOVER_CLI_PATH) + " " + args + " > " + tmp.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    if (captured) {
        std::ifstream in(tmp);
        std::stringstream ss;
        ss << in.rdbuf();
        *captured = ss.str();
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch_dir()
{
    auto p = std::filesystem::temp_directory_path() / "qfcover_cli_test";
    std::filesystem::create_directories(p);
    return p;
}

} // namespace

TEST(Parse, ScientificNotationAndLists)
{
    EXPECT_EQ(parse_integer("1e8", "n"), 100'000'000);
    EXPECT_EQ(parse_integer("250", "n"), 250);
    EXPECT_THROW(parse_integer("1.5", "n"), ConfigError);
    EXPECT_THROW(parse_integer("12abc", "n"), ConfigError);
    RunConfig c;
    apply_option(c, "alpha", "-2,-1, 0,1.5");
    EXPECT_EQ(c.alphas, (std::vector<double>{-2, -1, 0, 1.5}));
    EXPECT_THROW(apply_option(c, "bogus", "1"), ConfigError);
}

TEST(Format, ShortestRoundTrip)
{
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(1e-20), "1e-20");
    double x = 0.1 + 0.2;
    EXPECT_EQ(std::stod(format_double(x)), x);
    EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(Phase, SchemaAndByteIdenticalOutput)
{
    RunConfig c;
    c.command = "phase";
    c.N = 100000;
    c.alphas = {-2, -1, 0, 1, 2};
    auto a = run_config(c);
    auto b = run_config(c);
    ASSERT_EQ(a.code, kOk) << a.err;
    EXPECT_EQ(a.out, b.out);
    auto ls = lines(a.out);
    ASSERT_EQ(ls.size(), 7u);
    EXPECT_EQ(ls[0], "# schema=qfcover/1");
    EXPECT_EQ(ls[1], "alpha,delta,covered,fraction,phi");
    EXPECT_EQ(a.out.find('\r'), std::string::npos);
    c.workers = 3;
    c.segment_size = 4096;
    EXPECT_EQ(run_config(c).out, a.out);
}

TEST(Classnum, NoMismatches)
{
    RunConfig c;
    c.command = "classnum";
    c.dmin = -3;
    c.dmax = -2000;
    auto r = run_config(c);
    ASSERT_EQ(r.code, kOk) << r.err;
    auto ls = lines(r.out);
    EXPECT_EQ(ls[1], "D,h_enum,h_formula,certified");
    for (std::size_t i = 2; i < ls.size(); ++i) {
        auto cells = split_list(ls[i]);
        ASSERT_EQ(cells.size(), 4u);
        EXPECT_EQ(cells[1], cells[2]) << ls[i];
        EXPECT_EQ(cells[3], "true");
    }
}

TEST(Moments, RowsForAllPropositions)
{
    RunConfig c;
    c.command = "moments";
    c.N = 20000;
    c.Delta = 100;
    c.j = 1;
    c.W = 3;
    auto r = run_config(c);
    ASSERT_EQ(r.code, kOk) << r.err;
    auto ls = lines(r.out);
    std::map<std::string, int> count;
    for (std::size_t i = 2; i < ls.size(); ++i)
        ++count[split_list(ls[i])[0]];
    EXPECT_EQ(count["5.2"], 4);
    EXPECT_EQ(count["5.3"], 12);
    EXPECT_EQ(count["5.4"], 4);
    EXPECT_EQ(count["5.5"], 1);
    EXPECT_EQ(count["variance"], 1);
}

TEST(Errors, CapsAndUnknownInput)
{
    RunConfig c;
    c.command = "phase";
    c.N = 2'000'000'000;
    EXPECT_EQ(run_config(c).code, kConfigError);
    c.N = 1000;
    c.Delta = 1e6;
    EXPECT_EQ(run_config(c).code, kConfigError);
    c.Delta = 0;
    c.command = "nope";
    EXPECT_EQ(run_config(c).code, kConfigError);
    c.command = "phase";
    c.output = "/nonexistent-dir/x.csv";
    EXPECT_EQ(run_config(c).code, kConfigError);
    c.output.clear();
    c.command = "moments";
    c.ds = {29};
    EXPECT_EQ(run_config(c).code, kConfigError);  // 29 is not in D_0
}

TEST(Output, CsvWithJsonMirror)
{
    auto dir = scratch_dir();
    RunConfig c;
    c.command = "selberg";
    c.N = 10000;
    c.ks = {1, 2, 3};
    c.output = (dir / "sel.csv").string();
    ASSERT_EQ(run_config(c).code, kOk);
    std::ifstream j(dir / "sel.json");
    auto doc = nlohmann::json::parse(j);
    EXPECT_EQ(doc["params"]["command"], "selberg");
    EXPECT_EQ(doc["rows"].size(), 3u);
    EXPECT_EQ(doc["rows"][0]["k"], 1);
    EXPECT_EQ(doc["rows"][0]["count"], 1229);
    EXPECT_EQ(doc["provenance"]["git_hash"], "test");
    EXPECT_TRUE(doc["provenance"].contains("timestamp"));
}

TEST(Binary, VerifyExitsZero)
{
    std::string out;
    EXPECT_EQ(shell("verify", &out), 0) << out;
    EXPECT_NE(out.find("checks passed"), std::string::npos);
}

TEST(Binary, FlagsOverrideConfigFile)
{
    auto dir = scratch_dir();
    auto cfg = dir / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "# phase run\nn = 1e5\nalpha = -1,0,1\n";
    }
    std::string out;
    ASSERT_EQ(shell("phase --config " + cfg.string(), &out), 0) << out;
    EXPECT_EQ(lines(out).size(), 5u);
    ASSERT_EQ(shell("phase --config " + cfg.string() + " --alpha=0", &out), 0) << out;
    EXPECT_EQ(lines(out).size(), 3u);
    EXPECT_EQ(lines(out)[2].substr(0, 2), "0,");
}

TEST(Binary, ExitCodes)
{
    EXPECT_EQ(shell("phase --n 1e12"), 2);
    EXPECT_EQ(shell("phase --frobnicate 3"), 2);
    EXPECT_EQ(shell("phase --n 1e5 --alpha -2,-1,0,1,2"), 0);
    EXPECT_EQ(shell("--help"), 0);
}
