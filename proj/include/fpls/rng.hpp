#pragma once

#include <cstdint>

namespace fpls {

// Counter-based generator: each draw is a stateless mix of (key, counter),
// so streams keyed by (seed, replication, role) are order-independent and
// bit-identical across platforms.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on (0,1), never exactly 0 or 1.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller.
    double next_normal();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Derives an independent stream key from (master seed, item index, role).
std::uint64_t derive_key(std::uint64_t seed, std::uint64_t index, std::uint64_t role);

}  // namespace fpls
