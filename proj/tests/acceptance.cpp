// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "scenery/binary.hpp"
#include "scenery/compression.hpp"
#include "scenery/interpolate.hpp"
#include "scenery/runtime.hpp"
#include "scenery/scenegen.hpp"
#include "scenery/sim_io.hpp"
#include "scenery/validate.hpp"
#include "scenery/xml.hpp"
#include "support/oracles.hpp"
#include "support/random_scene.hpp"

using namespace scenery;
using namespace scenery::fixtures;
using Clock = std::chrono::steady_clock;

namespace {

// tolerances
constexpr double kInterpTol = 1e-9;
constexpr double kColorTol = 1e-6;
constexpr double kHingeTol = 1e-4;
constexpr double kHudTol = 1e-6;
constexpr double kSizeWindow = 0.25;
constexpr auto kReportBudget = std::chrono::milliseconds(1);
constexpr auto kCompressionBudget = std::chrono::seconds(10);
constexpr auto kRoundTripBudget = std::chrono::seconds(60);
constexpr auto kFuzzPerInput = std::chrono::seconds(1);

struct Outcome {
    bool pass = true;
    std::string detail;
    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Rotation random_rotation(std::mt19937_64& rng) {
    return Rotation({uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1) + 1e-3}, uniform(rng, 0, 3.14159));
}

SimEvent event(double at, SimEventKind kind, std::string node = {}) {
    SimEvent e;
    e.at = at;
    e.kind = kind;
    e.node = std::move(node);
    return e;
}

// ------------------------------------------------------------------ 1

Outcome report_arithmetic() {
    Outcome o;
    const std::vector<SizePair> table{{"Georgia Scene", 11791, 4808},
                                      {"Savannah Scene", 98078, 37494},
                                      {"Train Station", 54717, 25481},
                                      {"Train Engine", 502209, 63766},
                                      {"Train Car", 391858, 73575}};
    compression_report(table);  // warm
    const auto t0 = Clock::now();
    const auto r = compression_report(table);
    const auto elapsed = Clock::now() - t0;
    const std::vector<std::int64_t> want{5922, 6177, 5343, 8730, 8122};
    for (std::size_t i = 0; i < want.size(); ++i)
        if (r.rows[i].reduction_hundredths != want[i])
            o.fail(r.rows[i].label + " gave " + format_hundredths(r.rows[i].reduction_hundredths));
    if (r.average_hundredths != 6859) o.fail("average " + format_hundredths(r.average_hundredths));
    if (elapsed > kReportBudget) o.fail("took longer than 1 ms");
    if (o.pass)
        o.detail = "59.22 61.77 53.43 87.30 81.22 avg " + format_hundredths(r.average_hundredths) +
                   fmt(" in %.3f ms", std::chrono::duration<double, std::milli>(elapsed).count());
    return o;
}

// ------------------------------------------------------------------ 2

Outcome compression_analogue(std::vector<CorpusEntry>& corpus) {
    Outcome o;
    const auto t0 = Clock::now();
    corpus = generate_bench_corpus({});
    std::vector<SizePair> pairs;
    for (const auto& e : corpus) {
        if (std::abs(static_cast<double>(e.xml_bytes) - e.target_bytes) > kSizeWindow * e.target_bytes)
            o.fail(e.label + fmt(" xml %zu outside window of %zu", e.xml_bytes, e.target_bytes));
        pairs.push_back({e.label, static_cast<std::int64_t>(serialize_xml(e.generated.scene).size()),
                         static_cast<std::int64_t>(encode_binary(e.generated.scene).size())});
    }
    const auto r = compression_report(pairs);
    const double elapsed = seconds_since(t0);
    std::string rows;
    for (const auto& row : r.rows) {
        const double pct = row.reduction_pct();
        const bool mesh = row.label == "Train Engine" || row.label == "Train Car";
        if (pct < 50.0) o.fail(row.label + fmt(" %.2f%% < 50%%", pct));
        if (mesh && pct < 70.0) o.fail(row.label + fmt(" %.2f%% < 70%%", pct));
        rows += fmt(" %.2f", pct);
    }
    if (r.average_reduction_pct() < 55.0) o.fail(fmt("mean %.2f%% < 55%%", r.average_reduction_pct()));
    if (elapsed > std::chrono::duration<double>(kCompressionBudget).count()) o.fail(fmt("took %.1f s", elapsed));
    if (o.pass) o.detail = "reductions" + rows + fmt(" mean %.2f%% in %.2f s", r.average_reduction_pct(), elapsed);
    return o;
}

// ------------------------------------------------------------------ 3

bool round_trips(const SceneGraph& s, std::string& why) {
    const std::string text = serialize_xml(s);
    const auto parsed = parse_xml(text);
    if (!parsed.ok()) {
        why = "reparse failed: " + parsed.diagnostics.front().message;
        return false;
    }
    if (serialize_xml(*parsed.scene) != text) {
        why = "serialize/parse/serialize is not a fixpoint";
        return false;
    }
    for (const EncodeOptions opts : {EncodeOptions{true, true}, EncodeOptions{false, false}}) {
        const auto back = decode_binary(encode_binary(*parsed.scene, opts));
        const auto again = parse_xml(serialize_xml(back));
        if (!again.ok() || !semantic_equal(*again.scene, s)) {
            why = "xml->binary->xml changed the scene";
            return false;
        }
    }
    return true;
}

Outcome round_trip(const std::vector<CorpusEntry>& corpus) {
    Outcome o;
    const auto t0 = Clock::now();
    std::string why;
    for (std::uint64_t seed = 0; seed < 1000 && o.pass; ++seed)
        if (!round_trips(random_scene(seed), why)) o.fail(fmt("seed %llu: ", static_cast<unsigned long long>(seed)) + why);
    for (const auto& e : corpus)
        if (o.pass && !round_trips(e.generated.scene, why)) o.fail(e.label + ": " + why);
    const double elapsed = seconds_since(t0);
    if (elapsed > std::chrono::duration<double>(kRoundTripBudget).count()) o.fail(fmt("took %.1f s", elapsed));
    if (o.pass) o.detail = fmt("1000 random scenes + %zu corpus files in %.2f s", corpus.size(), elapsed);
    return o;
}

// ------------------------------------------------------------------ 4

Outcome interpolator_oracles() {
    Outcome o;
    std::mt19937_64 rng(2024);
    auto keys = [&](int n) {
        std::vector<double> k;
        for (int i = 0; i < n; ++i) k.push_back(uniform(rng, 0, 1));
        std::sort(k.begin(), k.end());
        return k;
    };
    double worst_pos = 0, worst_rot = 0, worst_col = 0;
    auto mix = [](const Vec3& a, const Vec3& b, double s) { return a + (b - a) * s; };
    for (int i = 0; i < 10000; ++i) {
        const int n = 1 + static_cast<int>(rng() % 8);
        KeyframeTrack<Vec3> t{keys(n), {}};
        for (int j = 0; j < n; ++j) t.values.push_back({uniform(rng, -50, 50), uniform(rng, -50, 50), uniform(rng, -50, 50)});
        const double f = uniform(rng, -0.1, 1.1);
        worst_pos = std::max(worst_pos, (interpolate_position(t, f) - scan_oracle(t.keys, t.values, f, mix)).norm());

        const Rotation a = random_rotation(rng), b = random_rotation(rng);
        const double g = uniform(rng, 0, 1);
        const Rotation r = interpolate_orientation({{0, 1}, {a, b}}, g);
        const double total = angle_between(quat(a), quat(b));
        worst_rot = std::max({worst_rot, std::abs(angle_between(quat(a), quat(r)) - g * total),
                              std::abs(angle_between(quat(r), quat(b)) - (1 - g) * total)});

        const Color ca(uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0, 1));
        const Color cb(uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0, 1));
        const double h = uniform(rng, 0, 1);
        const auto got = interpolate_color({{0, 1}, {ca, cb}}, h);
        auto ha = rgb2hsv_oracle(ca), hb = rgb2hsv_oracle(cb);
        if (ha[1] == 0 && hb[1] != 0) ha[0] = hb[0];
        if (hb[1] == 0 && ha[1] != 0) hb[0] = ha[0];
        double d = hb[0] - ha[0];
        if (d > 180) d -= 360;
        if (d < -180) d += 360;
        const auto want = hsv2rgb_oracle(std::fmod(ha[0] + h * d + 720, 360), ha[1] + h * (hb[1] - ha[1]),
                                         ha[2] + h * (hb[2] - ha[2]));
        worst_col = std::max({worst_col, std::abs(got.r() - want[0]), std::abs(got.g() - want[1]),
                              std::abs(got.b() - want[2])});
    }
    if (worst_pos > kInterpTol) o.fail(fmt("position error %.3g", worst_pos));
    if (worst_rot > kInterpTol) o.fail(fmt("orientation angle error %.3g", worst_rot));
    if (worst_col > kColorTol) o.fail(fmt("color error %.3g", worst_col));

    const Rotation half = interpolate_orientation({{0, 1}, {Rotation({0, 0, 1}, 0), Rotation({0, 0, 1}, 1.5707963267948966)}}, 0.5);
    if (std::abs(half.angle() - 0.7853981633974483) > kInterpTol || std::abs(half.axis().z - 1) > kInterpTol)
        o.fail("slerp 90 deg bisection");
    const Color mid = interpolate_color({{0, 1}, {Color(1, 1, 0), Color(1, 1, 1)}}, 0.5);
    if (std::abs(mid.r() - 1) > kColorTol || std::abs(mid.g() - 1) > kColorTol || std::abs(mid.b() - 0.5) > kColorTol)
        o.fail("yellow-white midpoint");
    if (o.pass) o.detail = fmt("10000 samples each; max err pos %.1e rot %.1e color %.1e", worst_pos, worst_rot, worst_col);
    return o;
}

// ------------------------------------------------------------------ 5

Outcome time_sensor() {
    Outcome o;
    TimeSensorState s;
    s.cycle_interval = 12;
    s.loop = true;
    if (timesensor_fraction(s, 3).fraction != 0.25) o.fail("fraction(3) != 0.25");
    if (timesensor_fraction(s, 18).fraction != 0.5) o.fail("fraction(18, loop) != 0.5");
    s.loop = false;
    const auto end = timesensor_fraction(s, 12);
    if (end.fraction != 1.0 || !end.terminating) o.fail("non-looping end is not exactly 1.0");

    // the same through the runtime
    auto scene = parse_xml("<X3D><Scene><TimeSensor DEF='T' cycleInterval='12' startTime='0.5'/></Scene></X3D>");
    Simulation sim(std::make_shared<SceneGraph>(*scene.scene));
    const auto trace = sim.step_to(20);
    std::vector<const TraceRecord*> fr;
    const TraceRecord* last_active = nullptr;
    for (const auto& r : trace) {
        if (r.field == "fraction_changed") fr.push_back(&r);
        if (r.field == "isActive") last_active = &r;
    }
    if (fr.empty() || std::get<double>(fr.back()->value) != 1.0 || fr.back()->at != 12.5)
        o.fail("runtime run did not end with fraction 1.0 at 12.5 s");
    if (!last_active || std::get<bool>(last_active->value) || last_active->at != 12.5)
        o.fail("runtime did not deactivate at 12.5 s");
    for (const auto* r : fr)
        if (r->at >= 3.5 - 1e-12 && r->at <= 3.5 + 1e-12 && std::abs(std::get<double>(r->value) - 0.25) > 1e-12)
            o.fail("runtime fraction at 3.5 s != 0.25");
    if (o.pass) o.detail = "0.25 at 3 s, 0.5 at 18 s (loop), run ends with 1.0 then isActive FALSE";
    return o;
}

// ------------------------------------------------------------------ 6

Outcome hinge_continuity() {
    Outcome o;
    const auto g = generate_georgia({});
    Simulation sim(std::make_shared<SceneGraph>(g.scene), {}, g.resolver());
    const auto touch = std::vector<SimEvent>{event(0, SimEventKind::Touch, "TrainBody")};
    double worst = 0, swing = 0;
    int samples = 0;
    for (int k = 0; k <= 40 * 30; ++k) {
        const double t = k / 30.0;
        sim.step_to(t, k == 0 ? std::span<const SimEvent>(touch) : std::span<const SimEvent>());
        for (const auto& c : g.manifest.couplings) {
            const Eigen::Vector3d p = to_eigen(c.point);
            const auto a = transform_point(sim.world_matrix(c.front), p);
            const auto b = transform_point(sim.world_matrix(c.rear), p);
            worst = std::max(worst, (a - b).norm());
            swing = std::max(swing, std::abs(std::get<Rotation>(sim.field(c.rear, "rotation")).angle()));
        }
        ++samples;
    }
    const Vec3 end = std::get<Vec3>(sim.field("Train", "translation"));
    if (worst > kHingeTol) o.fail(fmt("coupling gap %.3g", worst));
    if (swing == 0) o.fail("cars never swung relative to each other");
    const auto& path = def_table(g.scene).at("TrainPath")->get_as<std::vector<Vec3>>("keyValue");
    if ((end - path.back()).norm() > 1e-3) o.fail("train did not reach the end of its path");
    if (g.manifest.couplings.size() != 2) o.fail("expected two couplings");
    if (o.pass) o.detail = fmt("%d samples, %zu hinges, max gap %.2e, max relative swing %.3f rad", samples,
                               g.manifest.couplings.size(), worst, swing);
    return o;
}

// ------------------------------------------------------------------ 7

Outcome dual_scene_exclusion() {
    Outcome o;
    const auto c = generate_composite({});
    const auto& vps = c.manifest.viewpoints;
    if (vps.size() != 9 || c.manifest.static_viewpoints() != 4 || c.manifest.animated_viewpoints() != 5)
        o.fail("inventory is not 9 = 4 static + 5 animated");
    const std::vector<std::string> table{"Georgia Overhead",      "Georgia Ground Level",  "Georgia Engine Level",
                                         "Georgia Moving Camera", "Savannah Overhead",     "Savannah Ground Level",
                                         "Savannah Train Station", "Savannah Incoming Train", "Savannah Outgoing Train"};
    const std::vector<bool> animated{false, true, true, true, false, false, false, true, true};
    for (std::size_t i = 0; i < vps.size() && i < table.size(); ++i)
        if (vps[i].description != table[i] || vps[i].animated != animated[i]) o.fail("row " + table[i] + " differs");

    Simulation sim(std::make_shared<SceneGraph>(c.scene), {}, c.resolver());
    if (sim.viewpoints().size() != 9) o.fail("runtime sees a different viewpoint count");
    constexpr double kDwell = 5.0;
    std::vector<SimEvent> script{event(0.0, SimEventKind::Touch, "TrainBody")};
    for (std::size_t i = 0; i < vps.size(); ++i)
        script.push_back(event(kDwell * static_cast<double>(i + 1), SimEventKind::BindViewpoint, vps[i].def));
    std::size_t next = 0;
    int savannah_switches = -1, georgia_switches = -1, crossings = 0, overlap = 0;  // -1: initial emission
    bool prev_savannah = false;
    for (int k = 0; k <= static_cast<int>(kDwell * 10 * 30); ++k) {
        const double t = k / 30.0;
        std::size_t end = next;
        while (end < script.size() && script[end].at <= t) ++end;
        for (const auto& r : sim.step_to(t, std::span(script).subspan(next, end - next))) {
            if (r.field != "level_changed") continue;
            if (r.node == "SavannahLOD") ++savannah_switches;
            if (r.node == "GeorgiaLOD") ++georgia_switches;
        }
        next = end;
        if (sim.lod_level("GeorgiaLOD") == 0u && sim.lod_level("SavannahLOD") == 0u) ++overlap;
        // at the end of each dwell, check the bound viewpoint's scene
        const double phase = std::fmod(t, kDwell);
        if (t > kDwell && std::abs(phase - (kDwell - 1.0 / 30)) < 1e-9) {
            const auto i = static_cast<std::size_t>(t / kDwell) - 1;
            const bool savannah = vps[i].def.rfind("SavannahInline.", 0) == 0;
            if (sim.bound_viewpoint() != vps[i].def) o.fail("bound " + sim.bound_viewpoint() + " instead of " + vps[i].def);
            const auto want = savannah ? 0u : 1u;
            if (sim.lod_level("SavannahLOD") != want)
                o.fail(vps[i].description + fmt(": Savannah LOD child %zu", *sim.lod_level("SavannahLOD")));
            if (sim.lod_level("GeorgiaLOD") != (savannah ? 1u : 0u)) o.fail(vps[i].description + ": Georgia LOD wrong");
            if (i > 0 && savannah != prev_savannah) ++crossings;
            prev_savannah = savannah;
        }
    }
    if (overlap) o.fail(fmt("both scenes selected at %d samples", overlap));
    if (crossings != 1 || savannah_switches != crossings || georgia_switches != crossings)
        o.fail(fmt("switch events Savannah %d Georgia %d for %d crossing(s)", savannah_switches, georgia_switches, crossings));
    if (o.pass)
        o.detail = fmt("9 viewpoints (4 static / 5 animated); %d crossing, %d Savannah + %d Georgia switch events; no overlap",
                       crossings, savannah_switches, georgia_switches);
    return o;
}

// ------------------------------------------------------------------ 8

Outcome hud_invariance() {
    Outcome o;
    const auto g = generate_georgia({});
    Simulation sim(std::make_shared<SceneGraph>(g.scene), {}, g.resolver());
    const Node* prox = def_table(g.scene).at("GeorgiaProximity");
    const Vec3 center = prox->get_as<Vec3>("center"), size = prox->get_as<Vec3>("size");
    std::mt19937_64 rng(8);
    std::optional<Eigen::Matrix4d> first;
    double worst = 0;
    sim.step_to(0);
    for (int i = 1; i <= 100; ++i) {
        SimEvent e = event(0.1 * i, SimEventKind::SetViewerPose);
        e.pose = {{center.x + uniform(rng, -0.45, 0.45) * size.x, center.y + uniform(rng, -0.45, 0.45) * size.y,
                   center.z + uniform(rng, -0.45, 0.45) * size.z},
                  random_rotation(rng)};
        sim.step_to(e.at, std::span(&e, 1));
        Eigen::Matrix4d viewer = Eigen::Matrix4d::Identity();
        viewer.topLeftCorner<3, 3>() = to_quaternion(e.pose.orientation).toRotationMatrix();
        viewer.topRightCorner<3, 1>() = to_eigen(e.pose.position);
        const Eigen::Matrix4d in_view = viewer.inverse() * sim.world_matrix("GeorgiaMenu");
        if (!first) first = in_view;
        worst = std::max(worst, (in_view - *first).cwiseAbs().maxCoeff());
    }
    if (worst > kHudTol) o.fail(fmt("menu moved by %.3g in the viewer frame", worst));
    SimEvent away = event(20, SimEventKind::SetViewerPose);
    away.pose = {{center.x + size.x, center.y, center.z}, {}};
    const auto trace = sim.step_to(25, std::span(&away, 1));
    for (const auto& r : trace)
        if (r.node == "GeorgiaHud") {
            o.fail("menu kept updating outside the region");
            break;
        }
    if (o.pass) o.detail = fmt("100 moves, max drift %.2e; no updates after exit", worst);
    return o;
}

// ------------------------------------------------------------------ 9

std::string run_trace(const GeneratedScene& c) {
    Simulation sim(std::make_shared<SceneGraph>(c.scene), {}, c.resolver());
    const auto script = parse_script(R"({"at":0.5,"kind":"touch","node":"TrainBody"}
{"at":3,"kind":"bind_viewpoint","viewpoint":"GeorgiaMovingCamera"}
{"at":9,"kind":"touch","node":"MenuSavannah"}
{"at":12,"kind":"touch","node":"SavannahInline.MenuIncoming"}
{"at":15,"kind":"reset"}
{"at":16,"kind":"set_viewer_pose","position":[0,-300,0],"orientation":[1,0,0,-1.5]})");
    std::ostringstream out;
    for (const auto& r : sim.step_to(20, script)) out << trace_line(r) << '\n';
    out << summary_line(sim) << '\n';
    return out.str();
}

Outcome determinism_and_robustness() {
    Outcome o;
    const auto c = generate_composite({});
    const auto a = run_trace(c), b = run_trace(c);
    if (a != b) o.fail("traces differ between runs");

    std::vector<std::vector<std::uint8_t>> seeds;
    for (std::uint64_t s = 0; s < 16; ++s) seeds.push_back(encode_binary(random_scene(500 + s), {s % 2 == 0, true}));
    std::mt19937_64 rng(9);
    int typed = 0, decoded = 0, other = 0;
    double slowest = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        auto bytes = seeds[static_cast<std::size_t>(trial) % seeds.size()];
        for (int e = 0, n = 1 + static_cast<int>(rng() % 6); e < n && !bytes.empty(); ++e) {
            const auto pos = rng() % bytes.size();
            switch (rng() % 4) {
                case 0: bytes[pos] = static_cast<std::uint8_t>(rng()); break;
                case 1: bytes[pos] ^= static_cast<std::uint8_t>(1u << (rng() % 8)); break;
                case 2: bytes.resize(pos); break;
                default: bytes.insert(bytes.begin() + static_cast<long>(pos), static_cast<std::uint8_t>(rng())); break;
            }
        }
        if (trial % 2 == 0 && bytes.size() >= kS3dbHeaderSize) {
            const auto len = static_cast<std::uint32_t>(bytes.size() - kS3dbHeaderSize);
            const auto crc = crc32_oracle(bytes.data() + kS3dbHeaderSize, len);
            for (int i = 0; i < 4; ++i) {
                bytes[6 + i] = static_cast<std::uint8_t>(len >> (8 * i));
                bytes[10 + i] = static_cast<std::uint8_t>(crc >> (8 * i));
            }
        }
        const auto t0 = Clock::now();
        try {
            decode_binary(bytes);
            ++decoded;
        } catch (const DecodeError&) {
            ++typed;
        } catch (...) {
            ++other;
        }
        slowest = std::max(slowest, seconds_since(t0));
    }
    if (other) o.fail(fmt("%d untyped failures", other));
    if (slowest > std::chrono::duration<double>(kFuzzPerInput).count()) o.fail(fmt("slowest input %.2f s", slowest));
    if (o.pass)
        o.detail = fmt("trace %zu bytes identical twice; 10000 fuzzed streams: %d typed errors, %d decoded, slowest %.1f ms",
                       a.size(), typed, decoded, slowest * 1e3);
    return o;
}

}  // namespace

int main() {
    std::vector<CorpusEntry> corpus;
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"report arithmetic", report_arithmetic},
        {"compression analogue", [&] { return compression_analogue(corpus); }},
        {"round-trip", [&] { return round_trip(corpus); }},
        {"interpolator oracles", interpolator_oracles},
        {"TimeSensor", time_sensor},
        {"hinge continuity", hinge_continuity},
        {"dual-scene exclusion", dual_scene_exclusion},
        {"HUD invariance", hud_invariance},
        {"determinism & robustness", determinism_and_robustness},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string("threw: ") + e.what());
        }
        failed += !o.pass;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
