#include "auvsim/link.hpp"

#include <stdexcept>

namespace auvsim::link {

void LinkEndpoint::transmit(std::span<const std::uint8_t> frame, double now) {
    if (frame.empty()) throw std::invalid_argument("transmit: empty frame");
    std::vector<std::uint8_t> bytes(frame.begin(), frame.end());
    if (cfg_.bit_corruption_prob > 0.0 && rng_.uniform01() < cfg_.bit_corruption_prob) {
        std::uint32_t bit = rng_.next_below(static_cast<std::uint32_t>(bytes.size() * 8));
        bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    }
    // constant latency keeps the queue ordered by construction
    queue_.emplace_back(now + cfg_.latency, std::move(bytes));
}

std::vector<std::vector<std::uint8_t>> LinkEndpoint::poll(double now) {
    std::vector<std::vector<std::uint8_t>> due;
    while (!queue_.empty() && queue_.front().first <= now) {
        due.push_back(std::move(queue_.front().second));
        queue_.pop_front();
    }
    return due;
}

} // namespace auvsim::link
