#pragma once

// MAVLink v1 wire codec: 0xFE framing, size-sorted field serialization,
// X.25 checksum seeded with the per-message CRC_EXTRA byte, and an
// incremental resynchronizing stream parser.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace auvsim::mav {

enum class ScalarKind : std::uint8_t { U8, U16, U32, U64, I8, I16, I32, I64, F32, F64 };

std::size_t scalar_size(ScalarKind k);
// C-style type name ("uint32_t", "float", ...) as used by the CRC_EXTRA seed
std::string_view scalar_ctype(ScalarKind k);

struct FieldDef {
    std::string name;
    ScalarKind kind = ScalarKind::U8;
    std::uint8_t array_len = 1; // >= 1; 1 means scalar

    std::size_t wire_size() const { return scalar_size(kind) * array_len; }
};

struct MessageDef {
    std::string name; // uppercase identifier
    std::uint8_t msg_id = 0;
    std::vector<FieldDef> fields; // declaration order

    std::size_t payload_size() const;
    const FieldDef* find_field(std::string_view name) const;
};

// Throws std::invalid_argument on duplicate field names, zero-length arrays,
// or payload over 255 bytes.
void validate_def(const MessageDef& def);

// Fields sorted by scalar size descending, stable within equal sizes.
std::vector<const FieldDef*> wire_order(const MessageDef& def);

// X.25 CRC-16, init 0xFFFF, no final xor. Accumulating byte by byte equals
// accumulating the whole span.
std::uint16_t crc16_accumulate(std::span<const std::uint8_t> data, std::uint16_t acc = 0xFFFF);

// Per-message seed byte folded into every frame checksum.
std::uint8_t crc_extra(const MessageDef& def);

// Built-in message ids
namespace msgid {
inline constexpr std::uint8_t HEARTBEAT = 0;
inline constexpr std::uint8_t SCALED_PRESSURE = 29;
inline constexpr std::uint8_t ATTITUDE = 30;
inline constexpr std::uint8_t SERVO_OUTPUT_RAW = 36;
inline constexpr std::uint8_t RC_CHANNELS_OVERRIDE = 70;
inline constexpr std::uint8_t COMMAND_LONG = 76;
inline constexpr std::uint8_t COMMAND_ACK = 77;
} // namespace msgid

// MAV_CMD_COMPONENT_ARM_DISARM
inline constexpr std::uint16_t kCmdArmDisarm = 400;

class Registry {
public:
    explicit Registry(std::vector<MessageDef> defs); // validates all defs + id/name uniqueness

    // The fixed 7-message subset the simulator speaks.
    static const Registry& builtin();

    const MessageDef* by_id(std::uint8_t id) const;
    const MessageDef* by_name(std::string_view name) const;
    std::uint8_t crc_extra_for_id(std::uint8_t id) const; // precondition: id known
    const std::vector<MessageDef>& defs() const { return defs_; }

private:
    std::vector<MessageDef> defs_;
    std::int16_t id_index_[256];
    std::uint8_t crc_extra_[256];
};

// Canonical storage: unsigned kinds as uint64_t, signed as int64_t, floats as
// double (f32 values are squeezed through float precision on set, so a
// round-trip through the wire is bit-exact).
using FieldValue = std::variant<std::uint64_t, std::int64_t, double>;

struct MissingFieldValue : std::runtime_error {
    explicit MissingFieldValue(const std::string& what) : std::runtime_error(what) {}
};
struct PayloadTooLarge : std::runtime_error {
    explicit PayloadTooLarge(const std::string& what) : std::runtime_error(what) {}
};

class Message {
public:
    explicit Message(const MessageDef& def);

    const MessageDef& def() const { return *def_; }

    // Range-checked, canonicalizing setters. Throw std::out_of_range when the
    // value does not fit the field's scalar kind, std::invalid_argument for
    // unknown fields or non-integral values on integer fields.
    void set(std::string_view field, double value, std::size_t index = 0);
    void set_u64(std::string_view field, std::uint64_t value, std::size_t index = 0);
    void set_i64(std::string_view field, std::int64_t value, std::size_t index = 0);

    double as_double(std::string_view field, std::size_t index = 0) const;
    std::uint64_t as_u64(std::string_view field, std::size_t index = 0) const;
    std::int64_t as_i64(std::string_view field, std::size_t index = 0) const;
    const FieldValue& raw(std::string_view field, std::size_t index = 0) const;

    bool complete() const; // every field of the def has been set
    bool operator==(const Message& other) const;

private:
    friend std::vector<std::uint8_t> encode_frame(const Message&, std::uint8_t, std::uint8_t,
                                                  std::uint8_t);
    friend class Parser;

    std::size_t field_slot(std::string_view field, std::size_t index) const;

    const MessageDef* def_;
    std::vector<FieldValue> values_; // flattened, declaration order
    std::vector<bool> set_mask_;
};

// Emits magic 0xFE, header, little-endian payload in wire order, checksum with
// CRC_EXTRA folded in. Total length = 8 + payload_len.
// Throws MissingFieldValue / PayloadTooLarge.
std::vector<std::uint8_t> encode_frame(const Message& msg, std::uint8_t seq, std::uint8_t sys_id,
                                       std::uint8_t comp_id);

enum class DiagnosticKind : std::uint8_t {
    CrcMismatch,   // full frame present, checksum failed
    UnknownMsgId,  // msg_id not in registry; payload discarded unverified
    TruncatedFrame // payload_len disagrees with the registry's payload size
};

struct Diagnostic {
    DiagnosticKind kind;
    std::uint8_t msg_id = 0;
    std::size_t offset = 0; // byte offset into the cumulative input stream
};

struct DecodedFrame {
    std::uint8_t seq = 0;
    std::uint8_t sys_id = 0;
    std::uint8_t comp_id = 0;
    Message message;
};

// Incremental decoder. Feeding bytes in any chunking yields the same frame
// and diagnostic sequences. Faults never throw; they surface as diagnostics
// and the scanner resynchronizes on the next 0xFE.
class Parser {
public:
    explicit Parser(const Registry& registry);

    void push(std::span<const std::uint8_t> bytes);

    std::vector<DecodedFrame> take_frames();
    std::vector<Diagnostic> take_diagnostics();
    std::size_t pending_bytes() const { return buf_.size(); }

private:
    void scan();
    bool try_parse_at_head(); // true if progress was made

    const Registry* registry_;
    std::vector<std::uint8_t> buf_;
    std::size_t consumed_ = 0; // bytes discarded before buf_[0], for offsets
    std::vector<DecodedFrame> frames_;
    std::vector<Diagnostic> diags_;
};

// Golden-vector file format helpers: one frame per line, lowercase hex.
std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex); // throws std::invalid_argument
std::vector<std::vector<std::uint8_t>> parse_hex_lines(std::string_view text);

} // namespace auvsim::mav
