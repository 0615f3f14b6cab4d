#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace pwfn {

// xoshiro256++ with splitmix64 seeding. Gaussians come from the trig form of
// Box-Muller, generated in pairs; the spare is dropped on odd-length fills so
// the stream position depends only on how many values were requested.
// The whole state is four u64 words, which is what checkpoints persist.
struct RngState {
    std::array<std::uint64_t, 4> s{};

    static RngState seeded(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform in [2^-53, 1): the zero draw is clamped up so log(u) stays finite.
    double next_uniform();

    void fill_gaussian(double* out, std::size_t n);
    std::vector<double> gaussian(std::size_t n);
};

std::uint64_t splitmix64_next(std::uint64_t& state);

} // namespace pwfn
