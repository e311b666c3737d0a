#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scenery/scene.hpp"

namespace scenery {

struct EncodeOptions {
    /// Pass the body through raw DEFLATE (header flag bit 0).
    bool compress_payload = true;
    /// Store each distinct string once (header flag bit 1).
    bool string_table_dedup = true;
};

enum class DecodeErrorCode {
    BadMagic,
    BadVersion,
    Truncated,
    ChecksumMismatch,
    Decompress,
    UnknownNodeKind,
    BadFieldId,
    BadStringIndex,
    BadValue,
    BadStructure,
    TrailingData,
};

std::string_view to_string(DecodeErrorCode c);

class DecodeError : public std::runtime_error {
public:
    DecodeError(DecodeErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    DecodeErrorCode code() const { return code_; }

private:
    DecodeErrorCode code_;
};

inline constexpr std::uint8_t kS3dbVersion = 1;
inline constexpr std::size_t kS3dbHeaderSize = 14;

/// S3DB1 encoding; layout in docs/binary-format.md.
std::vector<std::uint8_t> encode_binary(const SceneGraph& scene, const EncodeOptions& opts = {});

/// Inverse of encode_binary. Only DecodeError escapes; the decoder never
/// reads past the declared body length.
SceneGraph decode_binary(std::span<const std::uint8_t> bytes);

}  // namespace scenery
