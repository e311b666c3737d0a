#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <map>
#include <ostream>
#include <sstream>

#include "scenery/binary.hpp"
#include "scenery/compression.hpp"
#include "scenery/scenegen.hpp"
#include "scenery/sim_io.hpp"
#include "scenery/validate.hpp"
#include "scenery/xml.hpp"

namespace scenery {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// I/O or format problem; maps to kExitIo.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError("cannot read " + p.string());
    return {std::istreambuf_iterator<char>(in), {}};
}

void write_file(const fs::path& p, std::string_view bytes) {
    std::ofstream out(p, std::ios::binary);
    if (!out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())))
        throw InputError("cannot write " + p.string());
}

void write_file(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
    write_file(p, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

bool is_binary(const fs::path& p) { return p.extension() == ".s3db"; }

SceneGraph parse_text(const std::string& text, const std::string& name) {
    auto r = parse_xml(text);
    if (!r.ok()) {
        std::ostringstream msg;
        for (const auto& d : r.diagnostics)
            msg << name << ':' << d.line << ':' << d.column << ": " << d.code << ": " << d.message << '\n';
        throw InputError(msg.str());
    }
    return std::move(*r.scene);
}

SceneGraph decode_bytes(const std::string& bytes, const std::string& name) {
    try {
        return decode_binary(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
    } catch (const DecodeError& e) {
        throw InputError(name + ": " + std::string(to_string(e.code())) + ": " + e.what());
    }
}

SceneGraph load_scene(const fs::path& p) {
    const auto bytes = read_file(p);
    return is_binary(p) ? decode_bytes(bytes, p.string()) : parse_text(bytes, p.string());
}

// Inline urls resolve against the directory of the referencing file. A url
// naming an .x3d that is missing falls back to its .s3db sibling.
InlineResolver disk_resolver(const fs::path& base) {
    auto cache = std::make_shared<std::map<std::string, std::shared_ptr<const SceneGraph>>>();
    const fs::path dir = base.parent_path();
    return [cache, dir](const std::string& url) -> std::shared_ptr<const SceneGraph> {
        if (auto it = cache->find(url); it != cache->end()) return it->second;
        std::shared_ptr<const SceneGraph> scene;
        fs::path p = dir / url;
        if (!fs::exists(p) && p.extension() == ".x3d") p.replace_extension(".s3db");
        try {
            if (fs::exists(p)) scene = std::make_shared<const SceneGraph>(load_scene(p));
        } catch (const InputError&) {
        }
        (*cache)[url] = scene;
        return scene;
    };
}

ordered_json issue_json(const Issue& i) { return {{"code", i.code}, {"path", i.path}, {"message", i.message}}; }

ordered_json stats_json(const SceneStats& s) {
    ordered_json j;
    j["shape_count"] = s.shape_count;
    j["image_texture_count"] = s.image_texture_count;
    j["audio_clip_count"] = s.audio_clip_count;
    j["inline_count"] = s.inline_count;
    j["total_nodes"] = s.total_nodes();
    j["node_count_by_kind"] = s.node_count_by_kind;
    j["warnings"] = s.warnings;
    return j;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
    std::string what;
    std::string out;
    GenParams params;
};

ordered_json write_generated(const GeneratedScene& g, const fs::path& dir) {
    ordered_json written = ordered_json::array();
    write_file(dir / g.manifest.file, serialize_xml(g.scene));
    written.push_back(g.manifest.file);
    for (const auto& [url, scene] : g.files) {
        write_file(dir / url, serialize_xml(*scene));
        written.push_back(url);
    }
    const auto sidecar = fs::path(g.manifest.file).replace_extension(".manifest.json").string();
    write_file(dir / sidecar, manifest_json(g.manifest).dump(2) + "\n");
    written.push_back(sidecar);
    return written;
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
    a.params.check();
    const fs::path dir(a.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
    ordered_json result;
    if (a.what == "bench-corpus") {
        ordered_json entries = ordered_json::array(), files = ordered_json::array();
        for (const auto& e : generate_bench_corpus(a.params)) {
            write_file(dir / e.file, serialize_xml(e.generated.scene));
            files.push_back(e.file);
            entries.push_back({{"label", e.label},
                               {"file", e.file},
                               {"xml_bytes", e.xml_bytes},
                               {"target_bytes", e.target_bytes},
                               {"mesh_density", e.mesh_density},
                               {"within_window", e.within_window}});
        }
        write_file(dir / "corpus.json", entries.dump(2) + "\n");
        files.push_back("corpus.json");
        result["written"] = files;
        result["corpus"] = entries;
    } else {
        const GeneratedScene g = a.what == "georgia"    ? generate_georgia(a.params)
                                 : a.what == "savannah" ? generate_savannah(a.params)
                                                        : generate_composite(a.params);
        result["written"] = write_generated(g, dir);
    }
    out << result.dump() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- inspect

int cmd_parse(const std::string& file, std::ostream& out) {
    out << serialize_xml(load_scene(file));
    return kExitOk;
}

int cmd_validate(const std::string& file, std::ostream& out) {
    const auto report = validate(load_scene(file));
    ordered_json j;
    j["file"] = file;
    j["ok"] = report.ok();
    j["errors"] = ordered_json::array();
    j["warnings"] = ordered_json::array();
    for (const auto& i : report.errors) j["errors"].push_back(issue_json(i));
    for (const auto& i : report.warnings) j["warnings"].push_back(issue_json(i));
    out << j.dump() << '\n';
    return report.ok() ? kExitOk : kExitFailed;
}

int cmd_stats(const std::string& file, std::ostream& out) {
    out << stats_json(scene_stats(load_scene(file), disk_resolver(file))).dump() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- codecs

struct EncodeArgs {
    std::string file;
    std::string output;
    bool no_compress = false;
    bool no_dedup = false;
};

int cmd_encode(const EncodeArgs& a, std::ostream& out) {
    const auto text = read_file(a.file);
    const auto bytes = encode_binary(parse_text(text, a.file), {!a.no_compress, !a.no_dedup});
    const fs::path dest = a.output.empty() ? fs::path(a.file).replace_extension(".s3db") : fs::path(a.output);
    write_file(dest, bytes);
    ordered_json j;
    j["input"] = a.file;
    j["output"] = dest.string();
    j["xml_bytes"] = text.size();
    j["binary_bytes"] = bytes.size();
    out << j.dump() << '\n';
    return kExitOk;
}

int cmd_decode(const std::string& file, const std::string& output, std::ostream& out) {
    const auto xml = serialize_xml(decode_bytes(read_file(file), file));
    if (output.empty())
        out << xml;
    else
        write_file(output, xml);
    return kExitOk;
}

int cmd_roundtrip(const std::string& file, const std::string& binary, std::ostream& out) {
    ordered_json j;
    j["file"] = file;
    const SceneGraph original = load_scene(file);
    std::optional<std::string> diff;
    std::string bytes = binary.empty() ? std::string() : read_file(binary);
    if (binary.empty()) {
        const auto enc = encode_binary(original);
        bytes.assign(enc.begin(), enc.end());
    } else {
        j["binary"] = binary;
    }
    j["binary_bytes"] = bytes.size();
    try {
        const SceneGraph decoded =
            decode_binary(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
        const auto text = serialize_xml(decoded);
        auto reparsed = parse_xml(text);
        if (!reparsed.ok())
            diff = "decoded scene does not reparse: " + reparsed.diagnostics.front().message;
        else
            diff = semantic_diff(original, *reparsed.scene);
        if (!diff && serialize_xml(*reparsed.scene) != text) diff = "serialization is not a fixpoint";
    } catch (const DecodeError& e) {
        diff = "decode failed: " + std::string(to_string(e.code())) + ": " + e.what();
    }
    j["equal"] = !diff.has_value();
    if (diff) j["diff"] = *diff;
    out << j.dump() << '\n';
    return diff ? kExitFailed : kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    std::string corpus;
    bool table = false;
    bool json = false;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
    const fs::path dir(a.corpus);
    std::vector<std::pair<std::string, fs::path>> inputs;
    if (fs::exists(dir / "corpus.json")) {
        for (const auto& e : ordered_json::parse(read_file(dir / "corpus.json")))
            inputs.emplace_back(e.at("label").get<std::string>(), dir / e.at("file").get<std::string>());
    } else {
        std::error_code ec;
        for (const auto& f : fs::directory_iterator(dir, ec))
            if (f.path().extension() == ".x3d") inputs.emplace_back(f.path().stem().string(), f.path());
        if (ec) throw InputError("cannot list " + dir.string() + ": " + ec.message());
        std::sort(inputs.begin(), inputs.end());
    }
    if (inputs.empty()) throw InputError("no .x3d files in " + dir.string());
    std::vector<SizePair> pairs;
    for (const auto& [label, path] : inputs) {
        const auto text = read_file(path);
        pairs.push_back({label, static_cast<std::int64_t>(text.size()),
                         static_cast<std::int64_t>(encode_binary(parse_text(text, path.string())).size())});
    }
    const auto report = compression_report(pairs);
    out << (a.json && !a.table ? render_json(report) + "\n" : render_table(report));
    return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimArgs {
    std::string file;
    std::string script;
    double until = 0;
    std::optional<double> tick_rate;
};

int cmd_simulate(const SimArgs& a, std::ostream& out, std::ostream& err) {
    SimConfig config;
    if (const char* path = std::getenv("SCENERY_CONFIG"); path && *path) {
        try {
            config = parse_config(read_file(path));
        } catch (const SimError& e) {
            throw InputError(std::string(path) + ": " + e.what());
        }
    }
    if (a.tick_rate) config.sample_rate = *a.tick_rate;
    std::vector<SimEvent> script;
    try {
        script = parse_script(read_file(a.script));
    } catch (const SimError& e) {
        throw InputError(a.script + ": " + e.what());
    }
    Simulation sim(std::make_shared<SceneGraph>(load_scene(a.file)), config, disk_resolver(a.file));
    for (const auto& w : sim.warnings()) err << "warning: " << w << '\n';
    for (const auto& r : sim.step_to(a.until, script)) out << trace_line(r) << '\n';
    out << summary_line(sim) << '\n';
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Scene toolchain: generate, inspect, encode and simulate X3D scenes", "scenery"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a scene family and its manifest");
    gen_cmd->add_option("what", gen.what, "georgia | savannah | composite | bench-corpus")
        ->required()
        ->check(CLI::IsMember({"georgia", "savannah", "composite", "bench-corpus"}));
    gen_cmd->add_option("--out", gen.out, "Output directory")->required();
    gen_cmd->add_option("--cars", gen.params.car_count, "Cars behind the engine");
    gen_cmd->add_option("--buildings", gen.params.building_count, "Savannah building count");
    gen_cmd->add_option("--mesh-density", gen.params.mesh_density, "Points per train section mesh");
    gen_cmd->add_flag("--debug-backdrop", gen.params.include_debug_backdrop, "Add the white backdrop inline");
    gen_cmd->add_flag("--debug-cube", gen.params.include_debug_camera_cube, "Show the moving-camera marker");

    std::string file, output, binary;
    auto* parse_cmd = app.add_subcommand("parse", "Parse and print canonical XML");
    auto* validate_cmd = app.add_subcommand("validate", "Check a scene; exit 1 on errors");
    auto* stats_cmd = app.add_subcommand("stats", "Node counts with inlines expanded");
    for (auto* c : {parse_cmd, validate_cmd, stats_cmd}) c->add_option("file", file, ".x3d or .s3db")->required();

    EncodeArgs enc;
    auto* encode_cmd = app.add_subcommand("encode", "XML to binary");
    encode_cmd->add_option("file", enc.file, "Input .x3d")->required();
    encode_cmd->add_option("-o,--output", enc.output, "Output path (default: input with .s3db)");
    encode_cmd->add_flag("--no-compress", enc.no_compress, "Skip payload DEFLATE");
    encode_cmd->add_flag("--no-dedup", enc.no_dedup, "Inline every string");

    auto* decode_cmd = app.add_subcommand("decode", "Binary to XML");
    decode_cmd->add_option("file", file, "Input .s3db")->required();
    decode_cmd->add_option("-o,--output", output, "Output path (default: standard output)");

    auto* roundtrip_cmd = app.add_subcommand("roundtrip", "Check xml -> binary -> xml; exit 1 on difference");
    roundtrip_cmd->add_option("file", file, "Input .x3d or .s3db")->required();
    roundtrip_cmd->add_option("--binary", binary, "Compare against this encoding instead of a fresh one");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Compression report over a corpus directory");
    bench_cmd->add_option("--corpus", bench.corpus, "Directory of .x3d files")->required();
    bench_cmd->add_flag("--table", bench.table, "Text table (default)");
    bench_cmd->add_flag("--json", bench.json, "JSON report");

    SimArgs sim;
    double tick_rate = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a scripted session and print the event trace");
    sim_cmd->add_option("file", sim.file, "Scene (.x3d or .s3db)")->required();
    sim_cmd->add_option("--script", sim.script, "JSONL event script")->required();
    sim_cmd->add_option("--until", sim.until, "End time in seconds")->required()->check(CLI::NonNegativeNumber);
    auto* rate_opt = sim_cmd->add_option("--tick-rate", tick_rate, "Samples per second")->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }
    if (rate_opt->count()) sim.tick_rate = tick_rate;

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen, out);
        if (parse_cmd->parsed()) return cmd_parse(file, out);
        if (validate_cmd->parsed()) return cmd_validate(file, out);
        if (stats_cmd->parsed()) return cmd_stats(file, out);
        if (encode_cmd->parsed()) return cmd_encode(enc, out);
        if (decode_cmd->parsed()) return cmd_decode(file, output, out);
        if (roundtrip_cmd->parsed()) return cmd_roundtrip(file, binary, out);
        if (bench_cmd->parsed()) return cmd_bench(bench, out);
        if (sim_cmd->parsed()) return cmd_simulate(sim, out, err);
    } catch (const InputError& e) {
        err << "error: " << e.what() << (std::string_view(e.what()).ends_with('\n') ? "" : "\n");
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const SimError& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailed;
    }
    return kExitUsage;
}

}  // namespace scenery
