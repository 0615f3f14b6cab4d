#pragma once

#include <cstdint>
#include <vector>

namespace pwfn {

// R = {0} U {±2^-k : j <= k <= b}. Centers are kept as signed integer
// multiples of 2^-b so generation and dedup are exact; doubles only appear
// at the boundary.
struct BaseSetConfig {
    int precision_b = 8;
    int top_j = 0;

    void validate() const;
    std::size_t element_count() const { return 2 * (precision_b - top_j + 1) + 1; }
    double scale() const; // 2^-b
};

struct Codebook {
    int order_omega = 1;
    BaseSetConfig base;
    std::vector<std::int64_t> centers_int; // sorted ascending; value = int * 2^-b
    std::vector<double> centers;           // same order

    std::size_t size() const { return centers.size(); }
};

inline constexpr std::size_t kCodebookCap = std::size_t{1} << 20;

std::vector<double> generate_base_set(const BaseSetConfig& cfg);

// All sums of <= omega distinct elements of R, deduplicated, sorted. Throws
// NumericError when the projected subset count exceeds cap (order too high
// for the precision).
Codebook generate_additive_set(const BaseSetConfig& cfg, int omega,
                               std::size_t cap = kCodebookCap);

struct Witness {
    bool representable = false;
    std::vector<double> elements; // sorted descending; lexicographically smallest
};

Witness is_representable(double value, const BaseSetConfig& cfg, int omega,
                         std::size_t cap = kCodebookCap);

} // namespace pwfn
