#pragma once

// Telemetry log: each record is an 8-byte big-endian microsecond timestamp
// followed by one raw MAVLink frame. Frames self-delimit through their
// length byte, as ground-control tlog files do.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace auvsim::sim {

struct TlogRecord {
    std::uint64_t timestamp_us = 0;
    std::vector<std::uint8_t> frame;
    bool operator==(const TlogRecord&) const = default;
};

struct CorruptLog : std::runtime_error {
    explicit CorruptLog(const std::string& what) : std::runtime_error(what) {}
};

// Throws std::invalid_argument when timestamps decrease.
std::vector<std::uint8_t> write_tlog(std::span<const TlogRecord> records);

// Throws CorruptLog on truncated records or frames that do not start 0xFE.
std::vector<TlogRecord> read_tlog(std::span<const std::uint8_t> bytes);

} // namespace auvsim::sim
