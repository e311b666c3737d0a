#include "scenery/binary.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <map>
#include <optional>

namespace scenery {

std::string_view to_string(DecodeErrorCode c) {
    switch (c) {
        case DecodeErrorCode::BadMagic: return "BAD_MAGIC";
        case DecodeErrorCode::BadVersion: return "BAD_VERSION";
        case DecodeErrorCode::Truncated: return "TRUNCATED";
        case DecodeErrorCode::ChecksumMismatch: return "CHECKSUM_MISMATCH";
        case DecodeErrorCode::Decompress: return "DECOMPRESS";
        case DecodeErrorCode::UnknownNodeKind: return "UNKNOWN_NODE_KIND";
        case DecodeErrorCode::BadFieldId: return "BAD_FIELD_ID";
        case DecodeErrorCode::BadStringIndex: return "BAD_STRING_INDEX";
        case DecodeErrorCode::BadValue: return "BAD_VALUE";
        case DecodeErrorCode::BadStructure: return "BAD_STRUCTURE";
        case DecodeErrorCode::TrailingData: return "TRAILING_DATA";
    }
    return "?";
}

namespace {

constexpr std::uint8_t kMagic[4] = {'S', '3', 'D', 'B'};
constexpr std::uint8_t kFlagCompressed = 0x01;
constexpr std::uint8_t kFlagDedup = 0x02;
constexpr std::size_t kMaxInflated = std::size_t{256} << 20;
constexpr int kMaxDepth = 256;

using Bytes = std::vector<std::uint8_t>;

// ---------------------------------------------------------------- writing

class Out {
public:
    void u8(std::uint8_t v) { buf.push_back(v); }

    void varint(std::uint64_t v) {
        while (v >= 0x80) {
            buf.push_back(static_cast<std::uint8_t>(v | 0x80));
            v >>= 7;
        }
        buf.push_back(static_cast<std::uint8_t>(v));
    }

    void zigzag(std::int32_t v) {
        varint((static_cast<std::uint32_t>(v) << 1) ^ static_cast<std::uint32_t>(v >> 31));
    }

    void u32le(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void u64le(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void f32(double v) { u32le(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
    void f64(double v) { u64le(std::bit_cast<std::uint64_t>(v)); }

    void append(const Bytes& b) { buf.insert(buf.end(), b.begin(), b.end()); }

    Bytes buf;
};

class Encoder {
public:
    explicit Encoder(bool dedup) : dedup_(dedup) {}

    Bytes body(const SceneGraph& scene) {
        Out meta, nodes, stmts;
        meta.varint(scene.meta.size());
        for (const auto& [k, v] : scene.meta) {
            meta.varint(str(k));
            meta.varint(str(v));
        }
        nodes.varint(scene.roots.size());
        for (const auto& r : scene.roots) node(nodes, *r);
        stmts.varint(scene.imports.size());
        for (const auto& im : scene.imports) {
            stmts.varint(str(im.inline_def));
            stmts.varint(str(im.imported_def));
            stmts.varint(str(im.as_name));
        }
        stmts.varint(scene.routes.size());
        for (const auto& r : scene.routes) {
            stmts.varint(str(r.from_node));
            stmts.varint(str(r.from_field));
            stmts.varint(str(r.to_node));
            stmts.varint(str(r.to_field));
        }
        // Kind names go through the string table too.
        std::vector<std::uint64_t> kind_names;
        for (auto k : kinds_) kind_names.push_back(str(std::string(to_string(k))));

        Out body;
        body.varint(strings_.size());
        for (const auto& s : strings_) {
            body.varint(s.size());
            body.buf.insert(body.buf.end(), s.begin(), s.end());
        }
        body.varint(kind_names.size());
        for (auto i : kind_names) body.varint(i);
        body.append(meta.buf);
        body.append(nodes.buf);
        body.append(stmts.buf);
        return std::move(body.buf);
    }

private:
    std::uint64_t str(const std::string& s) {
        if (dedup_) {
            auto [it, inserted] = index_.emplace(s, strings_.size());
            if (inserted) strings_.push_back(s);
            return it->second;
        }
        strings_.push_back(s);
        return strings_.size() - 1;
    }

    std::uint64_t token(NodeKind k) {
        for (std::size_t i = 0; i < kinds_.size(); ++i)
            if (kinds_[i] == k) return i + 1;
        kinds_.push_back(k);
        return kinds_.size();
    }

    void node(Out& o, const Node& n) {
        if (n.is_use()) {
            o.varint(0);
            o.varint(str(n.use_name()));
            return;
        }
        o.varint(token(n.kind()));
        o.varint(n.def_name().empty() ? 0 : str(n.def_name()) + 1);
        o.varint(n.fields().size());
        for (const auto& e : n.fields()) {
            o.u8(e.id);
            value(o, e.value);
        }
        o.varint(n.children().size());
        for (const auto& c : n.children()) node(o, *c);
    }

    void value(Out& o, const FieldValue& v) {
        switch (type_of(v)) {
            case FieldType::SFBool: o.u8(std::get<bool>(v) ? 1 : 0); break;
            case FieldType::SFInt32: o.zigzag(std::get<std::int32_t>(v)); break;
            case FieldType::SFFloat: o.f32(std::get<double>(v)); break;
            case FieldType::SFTime: o.f64(std::get<Time>(v).seconds); break;
            case FieldType::SFString: o.varint(str(std::get<std::string>(v))); break;
            case FieldType::SFVec3f: vec3(o, std::get<Vec3>(v)); break;
            case FieldType::SFRotation: rot(o, std::get<Rotation>(v)); break;
            case FieldType::SFColor: col(o, std::get<Color>(v)); break;
            case FieldType::MFBool: {
                const auto& l = std::get<std::vector<bool>>(v);
                o.varint(l.size());
                for (bool b : l) o.u8(b ? 1 : 0);
                break;
            }
            case FieldType::MFInt32: list(o, std::get<std::vector<std::int32_t>>(v), [&](std::int32_t x) { o.zigzag(x); }); break;
            case FieldType::MFFloat: list(o, std::get<std::vector<double>>(v), [&](double x) { o.f32(x); }); break;
            case FieldType::MFTime: list(o, std::get<std::vector<Time>>(v), [&](Time t) { o.f64(t.seconds); }); break;
            case FieldType::MFString:
                list(o, std::get<std::vector<std::string>>(v), [&](const std::string& s) { o.varint(str(s)); });
                break;
            case FieldType::MFVec3f: list(o, std::get<std::vector<Vec3>>(v), [&](const Vec3& x) { vec3(o, x); }); break;
            case FieldType::MFRotation:
                list(o, std::get<std::vector<Rotation>>(v), [&](const Rotation& x) { rot(o, x); });
                break;
            case FieldType::MFColor: list(o, std::get<std::vector<Color>>(v), [&](const Color& x) { col(o, x); }); break;
            case FieldType::SFNode: {
                const auto& p = std::get<NodePtr>(v);
                o.u8(p ? 1 : 0);
                if (p) node(o, *p);
                break;
            }
            case FieldType::MFNode:
                list(o, std::get<std::vector<NodePtr>>(v), [&](const NodePtr& p) { node(o, *p); });
                break;
        }
    }

    template <class T, class F>
    static void list(Out& o, const std::vector<T>& l, F&& f) {
        o.varint(l.size());
        for (const auto& x : l) f(x);
    }
    static void vec3(Out& o, const Vec3& v) {
        o.f32(v.x);
        o.f32(v.y);
        o.f32(v.z);
    }
    static void rot(Out& o, const Rotation& r) {
        o.f64(r.axis().x);
        o.f64(r.axis().y);
        o.f64(r.axis().z);
        o.f64(r.angle());
    }
    static void col(Out& o, const Color& c) {
        o.f32(c.r());
        o.f32(c.g());
        o.f32(c.b());
    }

    bool dedup_;
    std::vector<std::string> strings_;
    std::map<std::string, std::uint64_t> index_;
    std::vector<NodeKind> kinds_;
};

Bytes deflate_raw(const Bytes& in) {
    z_stream zs{};
    if (deflateInit2(&zs, 9, Z_DEFLATED, -15, 9, Z_DEFAULT_STRATEGY) != Z_OK)
        throw std::runtime_error("deflateInit2 failed");
    Bytes out(deflateBound(&zs, static_cast<uLong>(in.size())));
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    const auto produced = zs.total_out;
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw std::runtime_error("deflate did not finish");
    out.resize(produced);
    return out;
}

// ---------------------------------------------------------------- reading

[[noreturn]] void fail(DecodeErrorCode c, const std::string& msg) { throw DecodeError(c, msg); }

Bytes inflate_raw(std::span<const std::uint8_t> in) {
    z_stream zs{};
    if (inflateInit2(&zs, -15) != Z_OK) fail(DecodeErrorCode::Decompress, "inflateInit2 failed");
    Bytes out;
    std::uint8_t chunk[16384];
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = chunk;
        zs.avail_out = sizeof chunk;
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            fail(DecodeErrorCode::Decompress, "corrupt deflate stream");
        }
        const std::size_t got = sizeof chunk - zs.avail_out;
        if (got == 0 && rc != Z_STREAM_END && zs.avail_in == 0) {
            inflateEnd(&zs);
            fail(DecodeErrorCode::Decompress, "deflate stream ends early");
        }
        out.insert(out.end(), chunk, chunk + got);
        if (out.size() > kMaxInflated) {
            inflateEnd(&zs);
            fail(DecodeErrorCode::Decompress, "inflated body exceeds limit");
        }
    }
    const bool leftover = zs.avail_in != 0;
    inflateEnd(&zs);
    if (leftover) fail(DecodeErrorCode::TrailingData, "bytes after the deflate stream");
    return out;
}

class In {
public:
    explicit In(std::span<const std::uint8_t> b) : b_(b) {}

    std::size_t remaining() const { return b_.size() - pos_; }

    std::uint8_t u8() {
        need(1);
        return b_[pos_++];
    }

    std::uint64_t varint() {
        std::uint64_t v = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            const auto byte = u8();
            v |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
            if (!(byte & 0x80)) return v;
        }
        fail(DecodeErrorCode::BadValue, "varint longer than 10 bytes");
    }

    /// Element count whose items each take at least `min_bytes`.
    std::size_t count(std::size_t min_bytes = 1) {
        const auto n = varint();
        if (min_bytes > 0 && n > remaining() / min_bytes)
            fail(DecodeErrorCode::Truncated, "count " + std::to_string(n) + " exceeds remaining body");
        return static_cast<std::size_t>(n);
    }

    std::int32_t zigzag() {
        const auto u = varint();
        if (u > 0xFFFFFFFFull) fail(DecodeErrorCode::BadValue, "SFInt32 out of range");
        const auto v = static_cast<std::uint32_t>(u);
        return static_cast<std::int32_t>((v >> 1) ^ (~(v & 1) + 1));
    }

    std::uint32_t u32le() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b_[pos_++]) << (8 * i);
        return v;
    }

    std::uint64_t u64le() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b_[pos_++]) << (8 * i);
        return v;
    }

    double f32() { return static_cast<double>(std::bit_cast<float>(u32le())); }
    double f64() { return std::bit_cast<double>(u64le()); }

    std::string bytes(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
        pos_ += n;
        return s;
    }

private:
    void need(std::size_t n) {
        if (n > remaining()) fail(DecodeErrorCode::Truncated, "body ends early");
    }

    std::span<const std::uint8_t> b_;
    std::size_t pos_ = 0;
};

class Decoder {
public:
    explicit Decoder(std::span<const std::uint8_t> body) : in_(body) {}

    SceneGraph run() {
        SceneGraph scene;
        const auto nstr = in_.count();
        strings_.reserve(nstr);
        for (std::size_t i = 0; i < nstr; ++i) strings_.push_back(in_.bytes(in_.count(0)));
        const auto nkinds = in_.count();
        for (std::size_t i = 0; i < nkinds; ++i) {
            const auto& name = str(in_.varint());
            auto k = node_kind_from_string(name);
            if (!k) fail(DecodeErrorCode::UnknownNodeKind, "unknown node kind '" + name + "'");
            kinds_.push_back(*k);
        }
        const auto nmeta = in_.count(2);
        for (std::size_t i = 0; i < nmeta; ++i) {
            const auto& k = str(in_.varint());
            scene.meta[k] = str(in_.varint());
        }
        const auto nroots = in_.count();
        for (std::size_t i = 0; i < nroots; ++i) scene.roots.push_back(node(0));
        const auto nimports = in_.count(3);
        for (std::size_t i = 0; i < nimports; ++i) {
            Import im;
            im.inline_def = str(in_.varint());
            im.imported_def = str(in_.varint());
            im.as_name = str(in_.varint());
            scene.imports.push_back(std::move(im));
        }
        const auto nroutes = in_.count(4);
        for (std::size_t i = 0; i < nroutes; ++i) {
            Route r;
            r.from_node = str(in_.varint());
            r.from_field = str(in_.varint());
            r.to_node = str(in_.varint());
            r.to_field = str(in_.varint());
            scene.routes.push_back(std::move(r));
        }
        if (in_.remaining() != 0) fail(DecodeErrorCode::TrailingData, "bytes after the route table");
        return scene;
    }

private:
    const std::string& str(std::uint64_t i) {
        if (i >= strings_.size()) fail(DecodeErrorCode::BadStringIndex, "string index " + std::to_string(i));
        return strings_[static_cast<std::size_t>(i)];
    }

    NodePtr node(int depth) {
        if (depth > kMaxDepth) fail(DecodeErrorCode::BadStructure, "nodes nested too deeply");
        const auto tok = in_.varint();
        if (tok == 0) {
            const auto& name = str(in_.varint());
            auto it = defined_.find(name);
            if (it == defined_.end()) fail(DecodeErrorCode::BadStructure, "USE '" + name + "' before its DEF");
            return make_node(Node::use(it->second, name));
        }
        if (tok > kinds_.size()) fail(DecodeErrorCode::UnknownNodeKind, "node-kind token " + std::to_string(tok));
        Node n(kinds_[static_cast<std::size_t>(tok - 1)]);
        if (const auto def = in_.varint(); def != 0) {
            const auto& name = str(def - 1);
            if (name.empty() || !defined_.emplace(name, n.kind()).second)
                fail(DecodeErrorCode::BadStructure, "duplicate or empty DEF '" + name + "'");
            n.set_def(name);
        }
        const auto& schema = n.schema();
        const auto nfields = in_.count(2);
        for (std::size_t i = 0; i < nfields; ++i) {
            const auto id = in_.u8();
            if (id >= schema.fields.size() || !schema.fields[id].settable())
                fail(DecodeErrorCode::BadFieldId,
                     "field id " + std::to_string(id) + " on " + std::string(to_string(n.kind())));
            const auto& spec = schema.fields[id];
            if (n.find(spec.name)) fail(DecodeErrorCode::BadStructure, "field '" + std::string(spec.name) + "' repeated");
            FieldValue v = value(spec.type, depth);
            try {
                n.set(spec.name, std::move(v));
            } catch (const SchemaError& e) {
                fail(DecodeErrorCode::BadValue, e.what());
            }
        }
        const auto nchildren = in_.count();
        if (nchildren > 0 && !schema.grouping)
            fail(DecodeErrorCode::BadStructure, std::string(to_string(n.kind())) + " cannot have children");
        for (std::size_t i = 0; i < nchildren; ++i) {
            auto c = node(depth + 1);
            if (!c->schema().child_node)
                fail(DecodeErrorCode::BadStructure, std::string(to_string(c->kind())) + " is not a child node");
            n.add_child(std::move(c));
        }
        return make_node(std::move(n));
    }

    FieldValue value(FieldType t, int depth) {
        try {
            switch (t) {
                case FieldType::SFBool: return boolean();
                case FieldType::SFInt32: return in_.zigzag();
                case FieldType::SFFloat: return in_.f32();
                case FieldType::SFTime: return Time{in_.f64()};
                case FieldType::SFString: return str(in_.varint());
                case FieldType::SFVec3f: return vec3();
                case FieldType::SFRotation: return rot();
                case FieldType::SFColor: return col();
                case FieldType::MFBool: {
                    std::vector<bool> l(in_.count(1));
                    for (std::size_t i = 0; i < l.size(); ++i) l[i] = boolean();
                    return l;
                }
                case FieldType::MFInt32: return list<std::int32_t>(1, [&] { return in_.zigzag(); });
                case FieldType::MFFloat: return list<double>(4, [&] { return in_.f32(); });
                case FieldType::MFTime: return list<Time>(8, [&] { return Time{in_.f64()}; });
                case FieldType::MFString: return list<std::string>(1, [&] { return str(in_.varint()); });
                case FieldType::MFVec3f: return list<Vec3>(12, [&] { return vec3(); });
                case FieldType::MFRotation: return list<Rotation>(32, [&] { return rot(); });
                case FieldType::MFColor: return list<Color>(12, [&] { return col(); });
                case FieldType::SFNode: {
                    const auto present = boolean();
                    return present ? node(depth + 1) : NodePtr{};
                }
                case FieldType::MFNode: return list<NodePtr>(1, [&] { return node(depth + 1); });
            }
        } catch (const std::invalid_argument& e) {
            fail(DecodeErrorCode::BadValue, e.what());
        }
        fail(DecodeErrorCode::BadValue, "unknown field type");
    }

    bool boolean() {
        const auto b = in_.u8();
        if (b > 1) fail(DecodeErrorCode::BadValue, "boolean byte " + std::to_string(b));
        return b == 1;
    }

    template <class T, class F>
    std::vector<T> list(std::size_t min_bytes, F&& f) {
        const auto n = in_.count(min_bytes);
        std::vector<T> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(f());
        return out;
    }

    Vec3 vec3() {
        const double x = in_.f32();
        const double y = in_.f32();
        const double z = in_.f32();
        return {x, y, z};
    }
    Rotation rot() {
        const double x = in_.f64();
        const double y = in_.f64();
        const double z = in_.f64();
        const double a = in_.f64();
        return Rotation({x, y, z}, a);
    }
    Color col() {
        const double r = in_.f32();
        const double g = in_.f32();
        const double b = in_.f32();
        return Color(r, g, b);
    }

    In in_;
    std::vector<std::string> strings_;
    std::vector<NodeKind> kinds_;
    std::map<std::string, NodeKind, std::less<>> defined_;
};

}  // namespace

std::vector<std::uint8_t> encode_binary(const SceneGraph& scene, const EncodeOptions& opts) {
    Bytes body = Encoder(opts.string_table_dedup).body(scene);
    if (opts.compress_payload) body = deflate_raw(body);
    std::uint8_t flags = 0;
    if (opts.compress_payload) flags |= kFlagCompressed;
    if (opts.string_table_dedup) flags |= kFlagDedup;
    Out o;
    o.buf.assign(std::begin(kMagic), std::end(kMagic));
    o.u8(kS3dbVersion);
    o.u8(flags);
    o.u32le(static_cast<std::uint32_t>(body.size()));
    o.u32le(static_cast<std::uint32_t>(crc32(0L, body.data(), static_cast<uInt>(body.size()))));
    o.append(body);
    return std::move(o.buf);
}

SceneGraph decode_binary(std::span<const std::uint8_t> bytes) {
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) != 0)
        fail(DecodeErrorCode::BadMagic, "stream does not start with \"S3DB\"");
    if (bytes.size() < kS3dbHeaderSize) fail(DecodeErrorCode::Truncated, "stream shorter than the S3DB header");
    In header(bytes.first(kS3dbHeaderSize));
    header.bytes(4);
    const auto version = header.u8();
    if (version != kS3dbVersion) fail(DecodeErrorCode::BadVersion, "unsupported S3DB version " + std::to_string(version));
    const auto flags = header.u8();
    if (flags & ~(kFlagCompressed | kFlagDedup)) fail(DecodeErrorCode::BadValue, "unknown header flags");
    const auto length = header.u32le();
    const auto checksum = header.u32le();
    const auto available = bytes.size() - kS3dbHeaderSize;
    if (length > available)
        fail(DecodeErrorCode::Truncated,
             "declared body length " + std::to_string(length) + " exceeds the " + std::to_string(available) +
                 " bytes present");
    if (length < available) fail(DecodeErrorCode::TrailingData, "bytes after the declared body");
    auto body = bytes.subspan(kS3dbHeaderSize, length);
    if (crc32(0L, body.data(), static_cast<uInt>(body.size())) != checksum)
        fail(DecodeErrorCode::ChecksumMismatch, "body CRC-32 mismatch");
    if (flags & kFlagCompressed) {
        Bytes inflated = inflate_raw(body);
        return Decoder(inflated).run();
    }
    return Decoder(body).run();
}

}  // namespace scenery
