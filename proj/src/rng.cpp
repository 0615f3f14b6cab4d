#include "pwfn/rng.hpp"

#include <cmath>

namespace pwfn {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

} // namespace

std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RngState RngState::seeded(std::uint64_t seed) {
    RngState r;
    std::uint64_t sm = seed;
    for (auto& word : r.s) {
        word = splitmix64_next(sm);
    }
    return r;
}

std::uint64_t RngState::next_u64() {
    const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
}

double RngState::next_uniform() {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return u == 0.0 ? 0x1.0p-53 : u;
}

void RngState::fill_gaussian(double* out, std::size_t n) {
    std::size_t i = 0;
    while (i < n) {
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        out[i++] = r * std::cos(kTwoPi * u2);
        if (i < n) {
            out[i++] = r * std::sin(kTwoPi * u2);
        }
    }
}

std::vector<double> RngState::gaussian(std::size_t n) {
    std::vector<double> out(n);
    fill_gaussian(out.data(), n);
    return out;
}

} // namespace pwfn
