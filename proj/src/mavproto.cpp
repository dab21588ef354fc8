#include "auvsim/mavproto.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_set>

namespace auvsim::mav {

std::size_t scalar_size(ScalarKind k) {
    switch (k) {
    case ScalarKind::U8:
    case ScalarKind::I8: return 1;
    case ScalarKind::U16:
    case ScalarKind::I16: return 2;
    case ScalarKind::U32:
    case ScalarKind::I32:
    case ScalarKind::F32: return 4;
    case ScalarKind::U64:
    case ScalarKind::I64:
    case ScalarKind::F64: return 8;
    }
    return 0;
}

std::string_view scalar_ctype(ScalarKind k) {
    switch (k) {
    case ScalarKind::U8: return "uint8_t";
    case ScalarKind::U16: return "uint16_t";
    case ScalarKind::U32: return "uint32_t";
    case ScalarKind::U64: return "uint64_t";
    case ScalarKind::I8: return "int8_t";
    case ScalarKind::I16: return "int16_t";
    case ScalarKind::I32: return "int32_t";
    case ScalarKind::I64: return "int64_t";
    case ScalarKind::F32: return "float";
    case ScalarKind::F64: return "double";
    }
    return "";
}

std::size_t MessageDef::payload_size() const {
    std::size_t n = 0;
    for (const auto& f : fields) n += f.wire_size();
    return n;
}

const FieldDef* MessageDef::find_field(std::string_view name) const {
    for (const auto& f : fields)
        if (f.name == name) return &f;
    return nullptr;
}

void validate_def(const MessageDef& def) {
    if (def.name.empty()) throw std::invalid_argument("message def has empty name");
    std::unordered_set<std::string_view> seen;
    for (const auto& f : def.fields) {
        if (f.array_len < 1)
            throw std::invalid_argument(def.name + "." + f.name + ": array_len must be >= 1");
        if (!seen.insert(f.name).second)
            throw std::invalid_argument(def.name + ": duplicate field " + f.name);
    }
    if (def.payload_size() > 255)
        throw std::invalid_argument(def.name + ": payload exceeds 255 bytes");
}

std::vector<const FieldDef*> wire_order(const MessageDef& def) {
    std::vector<const FieldDef*> order;
    order.reserve(def.fields.size());
    for (const auto& f : def.fields) order.push_back(&f);
    std::stable_sort(order.begin(), order.end(), [](const FieldDef* a, const FieldDef* b) {
        return scalar_size(a->kind) > scalar_size(b->kind);
    });
    return order;
}

std::uint16_t crc16_accumulate(std::span<const std::uint8_t> data, std::uint16_t acc) {
    for (std::uint8_t b : data) {
        std::uint8_t t = b ^ static_cast<std::uint8_t>(acc & 0xFF);
        t ^= static_cast<std::uint8_t>(t << 4);
        acc = static_cast<std::uint16_t>((acc >> 8) ^ (t << 8) ^ (t << 3) ^ (t >> 4));
    }
    return acc;
}

static std::uint16_t crc16_str(std::string_view s, std::uint16_t acc) {
    return crc16_accumulate(
        {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}, acc);
}

std::uint8_t crc_extra(const MessageDef& def) {
    std::uint16_t acc = crc16_str(def.name, 0xFFFF);
    acc = crc16_str(" ", acc);
    for (const FieldDef* f : wire_order(def)) {
        acc = crc16_str(scalar_ctype(f->kind), acc);
        acc = crc16_str(" ", acc);
        acc = crc16_str(f->name, acc);
        acc = crc16_str(" ", acc);
        if (f->array_len > 1) {
            std::uint8_t len = f->array_len;
            acc = crc16_accumulate({&len, 1}, acc);
        }
    }
    return static_cast<std::uint8_t>((acc & 0xFF) ^ (acc >> 8));
}

Registry::Registry(std::vector<MessageDef> defs) : defs_(std::move(defs)) {
    std::fill(std::begin(id_index_), std::end(id_index_), std::int16_t{-1});
    std::unordered_set<std::string_view> names;
    for (std::size_t i = 0; i < defs_.size(); ++i) {
        const MessageDef& d = defs_[i];
        validate_def(d);
        if (id_index_[d.msg_id] != -1)
            throw std::invalid_argument("duplicate msg_id in registry: " + std::to_string(d.msg_id));
        if (!names.insert(d.name).second)
            throw std::invalid_argument("duplicate message name in registry: " + d.name);
        id_index_[d.msg_id] = static_cast<std::int16_t>(i);
        crc_extra_[d.msg_id] = crc_extra(d);
    }
}

const Registry& Registry::builtin() {
    static const Registry reg = [] {
        using K = ScalarKind;
        std::vector<MessageDef> defs;
        defs.push_back({"HEARTBEAT",
                        msgid::HEARTBEAT,
                        {{"type", K::U8},
                         {"autopilot", K::U8},
                         {"base_mode", K::U8},
                         {"custom_mode", K::U32},
                         {"system_status", K::U8},
                         {"mavlink_version", K::U8}}});
        defs.push_back({"SCALED_PRESSURE",
                        msgid::SCALED_PRESSURE,
                        {{"time_boot_ms", K::U32},
                         {"press_abs", K::F32},
                         {"press_diff", K::F32},
                         {"temperature", K::I16}}});
        defs.push_back({"ATTITUDE",
                        msgid::ATTITUDE,
                        {{"time_boot_ms", K::U32},
                         {"roll", K::F32},
                         {"pitch", K::F32},
                         {"yaw", K::F32},
                         {"rollspeed", K::F32},
                         {"pitchspeed", K::F32},
                         {"yawspeed", K::F32}}});
        MessageDef servo{"SERVO_OUTPUT_RAW", msgid::SERVO_OUTPUT_RAW, {{"time_usec", K::U32}, {"port", K::U8}}};
        for (int i = 1; i <= 8; ++i)
            servo.fields.push_back({"servo" + std::to_string(i) + "_raw", K::U16});
        defs.push_back(std::move(servo));
        MessageDef rc{"RC_CHANNELS_OVERRIDE",
                      msgid::RC_CHANNELS_OVERRIDE,
                      {{"target_system", K::U8}, {"target_component", K::U8}}};
        for (int i = 1; i <= 8; ++i)
            rc.fields.push_back({"chan" + std::to_string(i) + "_raw", K::U16});
        defs.push_back(std::move(rc));
        MessageDef cmd{"COMMAND_LONG",
                       msgid::COMMAND_LONG,
                       {{"target_system", K::U8},
                        {"target_component", K::U8},
                        {"command", K::U16},
                        {"confirmation", K::U8}}};
        for (int i = 1; i <= 7; ++i) cmd.fields.push_back({"param" + std::to_string(i), K::F32});
        defs.push_back(std::move(cmd));
        defs.push_back({"COMMAND_ACK", msgid::COMMAND_ACK, {{"command", K::U16}, {"result", K::U8}}});
        return Registry(std::move(defs));
    }();
    return reg;
}

const MessageDef* Registry::by_id(std::uint8_t id) const {
    return id_index_[id] < 0 ? nullptr : &defs_[static_cast<std::size_t>(id_index_[id])];
}

const MessageDef* Registry::by_name(std::string_view name) const {
    for (const auto& d : defs_)
        if (d.name == name) return &d;
    return nullptr;
}

std::uint8_t Registry::crc_extra_for_id(std::uint8_t id) const { return crc_extra_[id]; }

// ---- Message ----------------------------------------------------------------

static bool is_unsigned_kind(ScalarKind k) {
    return k == ScalarKind::U8 || k == ScalarKind::U16 || k == ScalarKind::U32 ||
           k == ScalarKind::U64;
}
static bool is_signed_kind(ScalarKind k) {
    return k == ScalarKind::I8 || k == ScalarKind::I16 || k == ScalarKind::I32 ||
           k == ScalarKind::I64;
}
static bool is_float_kind(ScalarKind k) {
    return k == ScalarKind::F32 || k == ScalarKind::F64;
}

static std::uint64_t unsigned_max(ScalarKind k) {
    switch (scalar_size(k)) {
    case 1: return 0xFFull;
    case 2: return 0xFFFFull;
    case 4: return 0xFFFFFFFFull;
    default: return ~0ull;
    }
}
static std::int64_t signed_min(ScalarKind k) {
    switch (scalar_size(k)) {
    case 1: return -128;
    case 2: return -32768;
    case 4: return -2147483648ll;
    default: return std::numeric_limits<std::int64_t>::min();
    }
}
static std::int64_t signed_max(ScalarKind k) {
    switch (scalar_size(k)) {
    case 1: return 127;
    case 2: return 32767;
    case 4: return 2147483647ll;
    default: return std::numeric_limits<std::int64_t>::max();
    }
}

Message::Message(const MessageDef& def) : def_(&def) {
    std::size_t n = 0;
    for (const auto& f : def.fields) n += f.array_len;
    values_.resize(n);
    set_mask_.assign(n, false);
    // canonical zero per kind
    std::size_t slot = 0;
    for (const auto& f : def.fields)
        for (std::uint8_t i = 0; i < f.array_len; ++i, ++slot) {
            if (is_unsigned_kind(f.kind))
                values_[slot] = std::uint64_t{0};
            else if (is_signed_kind(f.kind))
                values_[slot] = std::int64_t{0};
            else
                values_[slot] = 0.0;
        }
}

std::size_t Message::field_slot(std::string_view field, std::size_t index) const {
    std::size_t slot = 0;
    for (const auto& f : def_->fields) {
        if (f.name == field) {
            if (index >= f.array_len)
                throw std::out_of_range(def_->name + "." + f.name + ": index out of range");
            return slot + index;
        }
        slot += f.array_len;
    }
    throw std::invalid_argument(def_->name + ": no field named " + std::string(field));
}

void Message::set(std::string_view field, double value, std::size_t index) {
    const FieldDef* f = def_->find_field(field);
    if (!f) throw std::invalid_argument(def_->name + ": no field named " + std::string(field));
    std::size_t slot = field_slot(field, index);
    if (is_float_kind(f->kind)) {
        // squeeze through wire precision so round trips compare bit-exact
        values_[slot] = f->kind == ScalarKind::F32 ? static_cast<double>(static_cast<float>(value))
                                                   : value;
    } else if (is_unsigned_kind(f->kind)) {
        if (!(value >= 0 && value <= static_cast<double>(unsigned_max(f->kind))) ||
            value != std::floor(value))
            throw std::out_of_range(def_->name + "." + f->name + ": value out of range");
        values_[slot] = static_cast<std::uint64_t>(value);
    } else {
        if (!(value >= static_cast<double>(signed_min(f->kind)) &&
              value <= static_cast<double>(signed_max(f->kind))) ||
            value != std::floor(value))
            throw std::out_of_range(def_->name + "." + f->name + ": value out of range");
        values_[slot] = static_cast<std::int64_t>(value);
    }
    set_mask_[slot] = true;
}

void Message::set_u64(std::string_view field, std::uint64_t value, std::size_t index) {
    const FieldDef* f = def_->find_field(field);
    if (!f) throw std::invalid_argument(def_->name + ": no field named " + std::string(field));
    std::size_t slot = field_slot(field, index);
    if (is_unsigned_kind(f->kind)) {
        if (value > unsigned_max(f->kind))
            throw std::out_of_range(def_->name + "." + f->name + ": value out of range");
        values_[slot] = value;
    } else if (is_signed_kind(f->kind)) {
        if (value > static_cast<std::uint64_t>(signed_max(f->kind)))
            throw std::out_of_range(def_->name + "." + f->name + ": value out of range");
        values_[slot] = static_cast<std::int64_t>(value);
    } else {
        values_[slot] = f->kind == ScalarKind::F32
                            ? static_cast<double>(static_cast<float>(value))
                            : static_cast<double>(value);
    }
    set_mask_[slot] = true;
}

void Message::set_i64(std::string_view field, std::int64_t value, std::size_t index) {
    const FieldDef* f = def_->find_field(field);
    if (!f) throw std::invalid_argument(def_->name + ": no field named " + std::string(field));
    std::size_t slot = field_slot(field, index);
    if (is_signed_kind(f->kind)) {
        if (value < signed_min(f->kind) || value > signed_max(f->kind))
            throw std::out_of_range(def_->name + "." + f->name + ": value out of range");
        values_[slot] = value;
    } else if (is_unsigned_kind(f->kind)) {
        if (value < 0 || static_cast<std::uint64_t>(value) > unsigned_max(f->kind))
            throw std::out_of_range(def_->name + "." + f->name + ": value out of range");
        values_[slot] = static_cast<std::uint64_t>(value);
    } else {
        values_[slot] = f->kind == ScalarKind::F32
                            ? static_cast<double>(static_cast<float>(value))
                            : static_cast<double>(value);
    }
    set_mask_[slot] = true;
}

double Message::as_double(std::string_view field, std::size_t index) const {
    const FieldValue& v = values_[field_slot(field, index)];
    if (std::holds_alternative<std::uint64_t>(v))
        return static_cast<double>(std::get<std::uint64_t>(v));
    if (std::holds_alternative<std::int64_t>(v))
        return static_cast<double>(std::get<std::int64_t>(v));
    return std::get<double>(v);
}

std::uint64_t Message::as_u64(std::string_view field, std::size_t index) const {
    const FieldValue& v = values_[field_slot(field, index)];
    if (std::holds_alternative<std::uint64_t>(v)) return std::get<std::uint64_t>(v);
    if (std::holds_alternative<std::int64_t>(v)) {
        std::int64_t s = std::get<std::int64_t>(v);
        if (s < 0) throw std::out_of_range("negative value read as unsigned");
        return static_cast<std::uint64_t>(s);
    }
    return static_cast<std::uint64_t>(std::get<double>(v));
}

std::int64_t Message::as_i64(std::string_view field, std::size_t index) const {
    const FieldValue& v = values_[field_slot(field, index)];
    if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
    if (std::holds_alternative<std::uint64_t>(v))
        return static_cast<std::int64_t>(std::get<std::uint64_t>(v));
    return static_cast<std::int64_t>(std::get<double>(v));
}

const FieldValue& Message::raw(std::string_view field, std::size_t index) const {
    return values_[field_slot(field, index)];
}

bool Message::complete() const {
    return std::all_of(set_mask_.begin(), set_mask_.end(), [](bool b) { return b; });
}

bool Message::operator==(const Message& other) const {
    return def_->name == other.def_->name && def_->msg_id == other.def_->msg_id &&
           values_ == other.values_;
}

// ---- encode ------------------------------------------------------------------

static void append_le(std::vector<std::uint8_t>& out, std::uint64_t bits, std::size_t nbytes) {
    for (std::size_t i = 0; i < nbytes; ++i)
        out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFF));
}

static std::uint64_t value_bits(const FieldValue& v, ScalarKind k) {
    switch (k) {
    case ScalarKind::F32: {
        float f = static_cast<float>(std::get<double>(v));
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        return u;
    }
    case ScalarKind::F64: {
        double d = std::get<double>(v);
        std::uint64_t u;
        std::memcpy(&u, &d, 8);
        return u;
    }
    default:
        if (std::holds_alternative<std::int64_t>(v))
            return static_cast<std::uint64_t>(std::get<std::int64_t>(v)); // two's complement
        return std::get<std::uint64_t>(v);
    }
}

static FieldValue bits_to_value(std::uint64_t bits, ScalarKind k) {
    switch (k) {
    case ScalarKind::F32: {
        float f;
        std::uint32_t u = static_cast<std::uint32_t>(bits);
        std::memcpy(&f, &u, 4);
        return static_cast<double>(f);
    }
    case ScalarKind::F64: {
        double d;
        std::memcpy(&d, &bits, 8);
        return d;
    }
    case ScalarKind::I8: return static_cast<std::int64_t>(static_cast<std::int8_t>(bits));
    case ScalarKind::I16: return static_cast<std::int64_t>(static_cast<std::int16_t>(bits));
    case ScalarKind::I32: return static_cast<std::int64_t>(static_cast<std::int32_t>(bits));
    case ScalarKind::I64: return static_cast<std::int64_t>(bits);
    default: return bits & (scalar_size(k) == 8 ? ~0ull : ((1ull << (8 * scalar_size(k))) - 1));
    }
}

std::vector<std::uint8_t> encode_frame(const Message& msg, std::uint8_t seq, std::uint8_t sys_id,
                                       std::uint8_t comp_id) {
    const MessageDef& def = msg.def();
    std::size_t plen = def.payload_size();
    if (plen > 255) throw PayloadTooLarge(def.name + ": payload exceeds 255 bytes");
    if (!msg.complete()) {
        std::size_t slot = 0;
        for (const auto& f : def.fields)
            for (std::uint8_t i = 0; i < f.array_len; ++i, ++slot)
                if (!msg.set_mask_[slot])
                    throw MissingFieldValue(def.name + "." + f.name + " has no value");
    }

    std::vector<std::uint8_t> frame;
    frame.reserve(8 + plen);
    frame.push_back(0xFE);
    frame.push_back(static_cast<std::uint8_t>(plen));
    frame.push_back(seq);
    frame.push_back(sys_id);
    frame.push_back(comp_id);
    frame.push_back(def.msg_id);
    for (const FieldDef* f : wire_order(def)) {
        std::size_t base = msg.field_slot(f->name, 0);
        for (std::uint8_t i = 0; i < f->array_len; ++i)
            append_le(frame, value_bits(msg.values_[base + i], f->kind), scalar_size(f->kind));
    }
    std::uint16_t crc = crc16_accumulate({frame.data() + 1, frame.size() - 1});
    std::uint8_t extra = crc_extra(def);
    crc = crc16_accumulate({&extra, 1}, crc);
    frame.push_back(static_cast<std::uint8_t>(crc & 0xFF));
    frame.push_back(static_cast<std::uint8_t>(crc >> 8));
    return frame;
}

// ---- decode ------------------------------------------------------------------

Parser::Parser(const Registry& registry) : registry_(&registry) {}

void Parser::push(std::span<const std::uint8_t> bytes) {
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
    scan();
}

std::vector<DecodedFrame> Parser::take_frames() { return std::exchange(frames_, {}); }
std::vector<Diagnostic> Parser::take_diagnostics() { return std::exchange(diags_, {}); }

void Parser::scan() {
    while (try_parse_at_head()) {}
}

// One parse attempt at the current buffer head. Drops leading non-magic bytes
// first. Returns false when more input is needed (or buffer empty).
bool Parser::try_parse_at_head() {
    // resync: discard up to the first magic byte
    std::size_t start = 0;
    while (start < buf_.size() && buf_[start] != 0xFE) ++start;
    if (start > 0) {
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(start));
        consumed_ += start;
    }
    if (buf_.size() < 6) return false; // header not complete yet

    const std::uint8_t payload_len = buf_[1];
    const std::uint8_t msg_id = buf_[5];
    const MessageDef* def = registry_->by_id(msg_id);

    if (def && def->payload_size() != payload_len) {
        // known message with impossible length: corrupt len or id byte
        diags_.push_back({DiagnosticKind::TruncatedFrame, msg_id, consumed_});
        buf_.erase(buf_.begin()); // skip the magic, rescan inside
        consumed_ += 1;
        return true;
    }

    const std::size_t frame_len = 8u + payload_len;
    if (buf_.size() < frame_len) return false; // wait for the rest

    if (!def) {
        // no CRC_EXTRA known, cannot verify; report and discard the claimed frame
        diags_.push_back({DiagnosticKind::UnknownMsgId, msg_id, consumed_});
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(frame_len));
        consumed_ += frame_len;
        return true;
    }

    std::uint16_t crc = crc16_accumulate({buf_.data() + 1, frame_len - 3});
    std::uint8_t extra = registry_->crc_extra_for_id(msg_id);
    crc = crc16_accumulate({&extra, 1}, crc);
    const std::uint16_t rx_crc =
        static_cast<std::uint16_t>(buf_[frame_len - 2] | (buf_[frame_len - 1] << 8));
    if (crc != rx_crc) {
        diags_.push_back({DiagnosticKind::CrcMismatch, msg_id, consumed_});
        buf_.erase(buf_.begin()); // skip the magic, rescan inside the bad frame
        consumed_ += 1;
        return true;
    }

    DecodedFrame decoded{buf_[2], buf_[3], buf_[4], Message(*def)};
    std::size_t pos = 6;
    for (const FieldDef* f : wire_order(*def)) {
        std::size_t base = decoded.message.field_slot(f->name, 0);
        std::size_t width = scalar_size(f->kind);
        for (std::uint8_t i = 0; i < f->array_len; ++i) {
            std::uint64_t bits = 0;
            for (std::size_t b = 0; b < width; ++b)
                bits |= static_cast<std::uint64_t>(buf_[pos + b]) << (8 * b);
            pos += width;
            decoded.message.values_[base + i] = bits_to_value(bits, f->kind);
            decoded.message.set_mask_[base + i] = true;
        }
    }
    frames_.push_back(std::move(decoded));
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(frame_len));
    consumed_ += frame_len;
    return true;
}

// ---- hex helpers ---------------------------------------------------------------

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
    std::vector<std::uint8_t> out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]), lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

std::vector<std::vector<std::uint8_t>> parse_hex_lines(std::string_view text) {
    std::vector<std::vector<std::uint8_t>> frames;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
        while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
        if (!line.empty() && line.front() != '#') frames.push_back(from_hex(line));
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    return frames;
}

} // namespace auvsim::mav
