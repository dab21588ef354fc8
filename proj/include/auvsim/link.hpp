#pragma once

// Simulated serial telemetry transport between companion computer and flight
// controller: fixed latency, optional seeded single-bit corruption, heartbeat
// bookkeeping and link-loss failsafe detection. One endpoint per direction.

#include <cstdint>
#include <deque>
#include <limits>
#include <span>
#include <vector>

#include "auvsim/rng.hpp"

namespace auvsim::link {

struct LinkConfig {
    double latency = 0.005;           // seconds, one way
    double bit_corruption_prob = 0.0; // per frame, [0,1]
    std::uint64_t seed = 0;
    double heartbeat_interval = 1.0; // s
    double failsafe_timeout = 3.0;   // s without heartbeat => Lost
};

enum class LinkState { Ok, Lost };

class LinkEndpoint {
public:
    explicit LinkEndpoint(const LinkConfig& cfg, double now = 0.0)
        : cfg_(cfg), rng_(cfg.seed), last_hb_rx_(now) {}

    // Enqueue a frame for delivery at now + latency. With probability
    // bit_corruption_prob exactly one uniformly chosen bit is flipped.
    void transmit(std::span<const std::uint8_t> frame, double now);

    // Frames with due_time <= now, FIFO, removed from the queue.
    std::vector<std::vector<std::uint8_t>> poll(double now);

    bool heartbeat_due(double now) const {
        return now - last_hb_tx_ >= cfg_.heartbeat_interval;
    }
    void mark_heartbeat_sent(double now) { last_hb_tx_ = now; }
    void mark_heartbeat_received(double now) { last_hb_rx_ = now; }

    LinkState failsafe_state(double now) const {
        return now - last_hb_rx_ > cfg_.failsafe_timeout ? LinkState::Lost : LinkState::Ok;
    }

    double last_heartbeat_tx() const { return last_hb_tx_; }
    double last_heartbeat_rx() const { return last_hb_rx_; }
    std::size_t in_flight() const { return queue_.size(); }
    const LinkConfig& config() const { return cfg_; }

private:
    LinkConfig cfg_;
    DetRng rng_;
    std::deque<std::pair<double, std::vector<std::uint8_t>>> queue_; // (due_time, frame)
    double last_hb_tx_ = -std::numeric_limits<double>::infinity();   // never sent
    double last_hb_rx_;
};

} // namespace auvsim::link
