#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = scenery::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("scenery_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        unsetenv("SCENERY_CONFIG");
    }
    void TearDown() override {
        unsetenv("SCENERY_CONFIG");
        fs::remove_all(dir);
    }
    std::string at(const std::string& name) const { return (dir / name).string(); }
    fs::path dir;
};

constexpr const char* kTiny = R"(<X3D><Scene>
  <Transform DEF='Box1'>
    <TouchSensor DEF='Touch'/>
    <Shape><Box/></Shape>
  </Transform>
  <TimeSensor DEF='Clock' cycleInterval='2'/>
  <PositionInterpolator DEF='Path' key='0 1' keyValue='0 0 0 4 0 0'/>
  <ROUTE fromNode='Touch' fromField='touchTime' toNode='Clock' toField='set_startTime'/>
  <ROUTE fromNode='Clock' fromField='fraction_changed' toNode='Path' toField='set_fraction'/>
  <ROUTE fromNode='Path' fromField='value_changed' toNode='Box1' toField='set_translation'/>
</Scene></X3D>
)";

}  // namespace

TEST_F(Cli, UsageErrors) {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {}, {"bogus"}, {"gen", "mars", "--out", "x"}, {"simulate", "a.x3d", "--until", "3"}, {"encode"}}) {
        const auto r = run_cli(args);
        EXPECT_EQ(r.code, 2);
        EXPECT_TRUE(r.out.empty());
        EXPECT_NE(r.err.find("Usage"), std::string::npos);
    }
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST_F(Cli, InvalidGeneratorParamsAreUsageErrors) {
    const auto r = run_cli({"gen", "georgia", "--out", at("g"), "--cars", "0"});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, GenCompositeWritesFiveScenesAndManifest) {
    const auto r = run_cli({"gen", "composite", "--out", at("out")});
    ASSERT_EQ(r.code, 0) << r.err;
    int x3d = 0;
    for (const auto& f : fs::directory_iterator(dir / "out")) x3d += f.path().extension() == ".x3d";
    EXPECT_EQ(x3d, 5);
    const auto manifest = json::parse(slurp(dir / "out" / "Georgia.manifest.json"));
    EXPECT_EQ(manifest["files"].size(), 5u);
    EXPECT_EQ(manifest["viewpoints"].size(), 9u);
    EXPECT_EQ(manifest["static_viewpoints"], 4);
    EXPECT_EQ(manifest["animated_viewpoints"], 5);
    EXPECT_EQ(json::parse(r.out)["written"].size(), 6u);

    // stats over the files on disk agree with the manifest
    const auto stats = run_cli({"stats", at("out/Georgia.x3d")});
    ASSERT_EQ(stats.code, 0) << stats.err;
    const auto s = json::parse(stats.out);
    EXPECT_EQ(s["shape_count"], manifest["stats"]["shape_count"]);
    EXPECT_EQ(s["total_nodes"], manifest["stats"]["total_nodes"]);
    EXPECT_EQ(s["node_count_by_kind"], manifest["stats"]["node_count_by_kind"]);
    EXPECT_TRUE(s["warnings"].empty());
}

TEST_F(Cli, PipelineComposesWithoutEdits) {
    ASSERT_EQ(run_cli({"gen", "georgia", "--out", at("p")}).code, 0);
    const auto v = run_cli({"validate", at("p/Georgia.x3d")});
    ASSERT_EQ(v.code, 0) << v.out;
    EXPECT_TRUE(json::parse(v.out)["ok"]);

    // every file goes to binary; the scene then loads with binary inlines only
    for (const char* f : {"Georgia", "TrainEngine", "TrainCar"}) {
        const auto e = run_cli({"encode", at(std::string("p/") + f + ".x3d")});
        ASSERT_EQ(e.code, 0) << e.err;
        EXPECT_LT(json::parse(e.out)["binary_bytes"].get<int>(), json::parse(e.out)["xml_bytes"].get<int>());
    }
    const auto d = run_cli({"decode", at("p/Georgia.s3db"), "-o", at("p/decoded.x3d")});
    ASSERT_EQ(d.code, 0) << d.err;
    EXPECT_EQ(run_cli({"validate", at("p/decoded.x3d")}).code, 0);
    EXPECT_EQ(run_cli({"roundtrip", at("p/decoded.x3d")}).code, 0);
    for (const char* f : {"TrainEngine.x3d", "TrainCar.x3d"}) fs::remove(dir / "p" / f);

    spit(dir / "s.jsonl", "{\"at\":0.5,\"kind\":\"touch\",\"node\":\"TrainBody\"}\n\n"
                          "{\"at\":2,\"kind\":\"bind_viewpoint\",\"viewpoint\":\"GeorgiaEngineLevel\"}\n");
    std::string traces[2];
    for (const auto& [i, scene] : {std::pair{0, "p/decoded.x3d"}, std::pair{1, "p/Georgia.s3db"}}) {
        const auto s = run_cli({"simulate", at(scene), "--script", at("s.jsonl"), "--until", "5", "--tick-rate", "10"});
        ASSERT_EQ(s.code, 0) << s.err;
        EXPECT_TRUE(s.err.empty()) << s.err;
        traces[i] = s.out;
    }
    EXPECT_EQ(traces[0], traces[1]);
    std::istringstream lines(traces[0]);
    std::string line, last;
    bool moved = false;
    while (std::getline(lines, line)) {
        const auto j = json::parse(line);
        if (j.contains("node") && j["node"] == "Train" && j["field"] == "translation") moved = true;
        last = line;
    }
    EXPECT_TRUE(moved);
    const auto summary = json::parse(last)["summary"];
    EXPECT_EQ(summary["bound_viewpoint"], "GeorgiaEngineLevel");
    EXPECT_EQ(summary["now"], 5.0);
}

TEST_F(Cli, RoundTripReportsCorruption) {
    spit(dir / "t.x3d", kTiny);
    ASSERT_EQ(run_cli({"roundtrip", at("t.x3d")}).code, 0);
    ASSERT_EQ(run_cli({"encode", at("t.x3d"), "--no-compress", "-o", at("t.s3db")}).code, 0);

    auto bytes = slurp(dir / "t.s3db");
    bytes[bytes.size() / 2] ^= 0x5a;
    spit(dir / "bad.s3db", bytes);
    const auto r = run_cli({"roundtrip", at("t.x3d"), "--binary", at("bad.s3db")});
    EXPECT_EQ(r.code, 1);
    const auto j = json::parse(r.out);
    EXPECT_FALSE(j["equal"]);
    EXPECT_FALSE(j["diff"].get<std::string>().empty());

    // a corrupted binary on its own is a format error
    EXPECT_EQ(run_cli({"decode", at("bad.s3db")}).code, 3);
}

TEST_F(Cli, ExitCodes) {
    spit(dir / "broken.x3d", "<X3D><Scene><Transform></Scene></X3D>");
    const auto p = run_cli({"parse", at("broken.x3d")});
    EXPECT_EQ(p.code, 3);
    EXPECT_NE(p.err.find("broken.x3d:1:"), std::string::npos) << p.err;
    EXPECT_EQ(run_cli({"stats", at("missing.x3d")}).code, 3);

    spit(dir / "invalid.x3d", "<X3D><Scene><LOD range='10 5'><Group/><Group/><Group/></LOD></Scene></X3D>");
    const auto v = run_cli({"validate", at("invalid.x3d")});
    EXPECT_EQ(v.code, 1);
    EXPECT_EQ(json::parse(v.out)["errors"][0]["code"], "LOD_RANGE_ORDER");

    spit(dir / "t.x3d", kTiny);
    const auto c = run_cli({"parse", at("t.x3d")});
    ASSERT_EQ(c.code, 0);
    spit(dir / "c.x3d", c.out);
    EXPECT_EQ(run_cli({"parse", at("c.x3d")}).out, c.out);
}

TEST_F(Cli, SimulateHonoursConfig) {
    spit(dir / "t.x3d", kTiny);
    spit(dir / "s.jsonl", R"({"at":0.25,"kind":"touch","node":"Box1"})");
    const std::vector<std::string> args{"simulate", at("t.x3d"), "--script", at("s.jsonl"), "--until", "3"};
    const auto full = run_cli(args);
    ASSERT_EQ(full.code, 0) << full.err;
    EXPECT_EQ(run_cli(args).out, full.out);
    EXPECT_NE(full.out.find(R"("node":"Box1","field":"translation","value":[4.0,0.0,0.0])"), std::string::npos);

    spit(dir / "cfg.json", R"({"trace_verbosity":"summary"})");
    setenv("SCENERY_CONFIG", at("cfg.json").c_str(), 1);
    const auto summary = run_cli(args);
    ASSERT_EQ(summary.code, 0);
    EXPECT_EQ(std::count(summary.out.begin(), summary.out.end(), '\n'), 1);

    spit(dir / "cfg.json", R"({"speed":2})");
    EXPECT_EQ(run_cli(args).code, 3);
    unsetenv("SCENERY_CONFIG");

    spit(dir / "bad.jsonl", R"({"at":1,"kind":"teleport"})");
    EXPECT_EQ(run_cli({"simulate", at("t.x3d"), "--script", at("bad.jsonl"), "--until", "3"}).code, 3);
    spit(dir / "late.jsonl", R"({"at":5,"kind":"advance"})");
    EXPECT_EQ(run_cli({"simulate", at("t.x3d"), "--script", at("late.jsonl"), "--until", "3"}).code, 1);
}

TEST_F(Cli, BenchKeepsCorpusOrder) {
    ASSERT_EQ(run_cli({"gen", "bench-corpus", "--out", at("bc")}).code, 0);
    const auto t = run_cli({"bench", "--corpus", at("bc"), "--table"});
    ASSERT_EQ(t.code, 0) << t.err;
    const std::vector<std::string> order{"Georgia Scene", "Savannah Scene", "Train Station", "Train Engine", "Train Car",
                                         "Average Reduction"};
    std::size_t pos = 0;
    for (const auto& label : order) {
        const auto at_label = t.out.find(label, pos);
        ASSERT_NE(at_label, std::string::npos) << label;
        pos = at_label;
    }
    const auto j = json::parse(run_cli({"bench", "--corpus", at("bc"), "--json"}).out);
    ASSERT_EQ(j["rows"].size(), 5u);
    EXPECT_EQ(j["rows"][3]["label"], "Train Engine");
    EXPECT_GE(j["average_reduction_pct"].get<double>(), 55.0);
    EXPECT_EQ(run_cli({"bench", "--corpus", at("nothing")}).code, 3);
}
