#include "pwfn/codebook.hpp"
#include "pwfn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace pwfn {

void BaseSetConfig::validate() const {
    if (precision_b < 0) throw ConfigError("codebook: precision_b must be non-negative");
    if (top_j < 0) throw ConfigError("codebook: top_j must be non-negative");
    if (top_j > precision_b) throw ConfigError("codebook: top_j must not exceed precision_b");
}

double BaseSetConfig::scale() const {
    return std::ldexp(1.0, -precision_b);
}

namespace {

// Base elements as multiples of 2^-b, sorted descending by value, so DFS over
// ascending indices builds value-descending subsets.
std::vector<std::int64_t> base_ints_desc(const BaseSetConfig& cfg) {
    std::vector<std::int64_t> r;
    for (int k = cfg.top_j; k <= cfg.precision_b; ++k) {
        r.push_back(std::int64_t{1} << (cfg.precision_b - k));
    }
    // r is descending positive; append 0 and the mirrored negatives.
    std::vector<std::int64_t> full = r;
    full.push_back(0);
    for (auto it = r.rbegin(); it != r.rend(); ++it) full.push_back(-*it);
    return full;
}

void check_cap(std::size_t n_elements, int omega, std::size_t cap) {
    // Projected subset count: sum of C(n, s) for s <= min(omega, n).
    const std::size_t limit = std::min<std::size_t>(omega, n_elements);
    double total = 1.0; // empty subset
    double binom = 1.0;
    for (std::size_t s = 1; s <= limit; ++s) {
        binom *= static_cast<double>(n_elements - s + 1) / static_cast<double>(s);
        total += binom;
        if (total > static_cast<double>(cap)) {
            throw NumericError("codebook: order " + std::to_string(omega) + " over base of " +
                               std::to_string(n_elements) + " elements exceeds the center cap");
        }
    }
}

struct SumVisitor {
    const std::vector<std::int64_t>& elems;
    int max_size;
    std::vector<std::int64_t> stack;

    template <typename Fn>
    void dfs(std::size_t start, std::int64_t sum, Fn&& record) {
        for (std::size_t i = start; i < elems.size(); ++i) {
            stack.push_back(elems[i]);
            record(sum + elems[i], stack);
            if (static_cast<int>(stack.size()) < max_size) {
                dfs(i + 1, sum + elems[i], record);
            }
            stack.pop_back();
        }
    }
};

} // namespace

std::vector<double> generate_base_set(const BaseSetConfig& cfg) {
    cfg.validate();
    std::vector<std::int64_t> ints = base_ints_desc(cfg);
    std::sort(ints.begin(), ints.end());
    std::vector<double> out;
    out.reserve(ints.size());
    for (std::int64_t k : ints) out.push_back(static_cast<double>(k) * cfg.scale());
    return out;
}

Codebook generate_additive_set(const BaseSetConfig& cfg, int omega, std::size_t cap) {
    cfg.validate();
    if (omega < 1) throw ConfigError("codebook: order omega must be >= 1");
    const std::vector<std::int64_t> elems = base_ints_desc(cfg);
    check_cap(elems.size(), omega, cap);

    std::vector<std::int64_t> sums;
    SumVisitor vis{elems, std::min<int>(omega, static_cast<int>(elems.size())), {}};
    vis.dfs(0, 0, [&](std::int64_t s, const std::vector<std::int64_t>&) { sums.push_back(s); });
    std::sort(sums.begin(), sums.end());
    sums.erase(std::unique(sums.begin(), sums.end()), sums.end());

    Codebook cb;
    cb.order_omega = omega;
    cb.base = cfg;
    cb.centers_int = std::move(sums);
    cb.centers.reserve(cb.centers_int.size());
    for (std::int64_t k : cb.centers_int) {
        cb.centers.push_back(static_cast<double>(k) * cfg.scale());
    }
    return cb;
}

Witness is_representable(double value, const BaseSetConfig& cfg, int omega, std::size_t cap) {
    cfg.validate();
    if (omega < 1) throw ConfigError("codebook: order omega must be >= 1");
    Witness w;
    // Exact multiple-of-2^-b check; anything off-grid can never be a subset sum.
    const double scaled = std::ldexp(value, cfg.precision_b);
    if (!std::isfinite(scaled) || scaled != std::floor(scaled) ||
        std::fabs(scaled) > 9.0e15) {
        return w;
    }
    const std::int64_t target = static_cast<std::int64_t>(scaled);
    const std::vector<std::int64_t> elems = base_ints_desc(cfg);
    check_cap(elems.size(), omega, cap);

    // Keep the lexicographically smallest witness under descending-value list
    // comparison, e.g. 0.75 -> {0.5, 0.25}, not {1, -0.25}.
    std::vector<std::int64_t> best;
    bool found = false;
    SumVisitor vis{elems, std::min<int>(omega, static_cast<int>(elems.size())), {}};
    vis.dfs(0, 0, [&](std::int64_t s, const std::vector<std::int64_t>& subset) {
        if (s != target) return;
        if (!found || std::lexicographical_compare(subset.begin(), subset.end(),
                                                   best.begin(), best.end())) {
            best = subset;
            found = true;
        }
    });
    if (found) {
        w.representable = true;
        w.elements.reserve(best.size());
        for (std::int64_t k : best) w.elements.push_back(static_cast<double>(k) * cfg.scale());
    }
    return w;
}

} // namespace pwfn
