#include "fpls/rng.hpp"

#include <cmath>

namespace fpls {

namespace {
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return z ^ (z >> 33);
}
}  // namespace

double CounterRng::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t derive_key(std::uint64_t seed, std::uint64_t index, std::uint64_t role) {
    std::uint64_t k = mix64(seed + 0x9e3779b97f4a7c15ULL);
    k = mix64(k ^ (index + 0xbf58476d1ce4e5b9ULL));
    k = mix64(k ^ (role + 0x94d049bb133111ebULL));
    return k;
}

}  // namespace fpls
