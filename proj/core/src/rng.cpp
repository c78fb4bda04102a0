#include "trimix/rng.hpp"

#include <cmath>
#include <numbers>

#include "trimix/common.hpp"

namespace trimix {

std::string hex64(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be >= 1");
    const std::uint64_t rem = (UINT64_MAX % n + 1) % n;
    const std::uint64_t bound = UINT64_MAX - rem;
    std::uint64_t x = next_u64();
    while (x > bound) x = next_u64();
    return x % n;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

Eigen::Vector3d Rng::unit_vector() {
    const double z = uniform(-1.0, 1.0);
    const double phi = uniform(0.0, 2.0 * std::numbers::pi);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
}

Rng Rng::split(std::string_view label) const {
    return Rng(fnv1a64(label, seed_ ^ 0x5851f42d4c957f2dULL));
}

Rng Rng::split(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = seed_ ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xd1b54a32d192ed03ULL);
    return Rng(splitmix64(s));
}

} // namespace trimix
