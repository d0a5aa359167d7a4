#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

namespace bsc::detail {

// Indices of the k best entries: score descending, then id ascending.
// Selection is serial over the complete score array, so results do not
// depend on how the scores were computed (chunked, parallel, ...).
template <typename Score>
std::vector<std::size_t> top_k_by_score(const std::vector<Score>& scores,
                                        const std::vector<std::string>& ids,
                                        std::size_t k) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto better = [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return ids[a] < ids[b];
    };
    if (k < order.size()) {
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                          order.end(), better);
        order.resize(k);
    } else {
        std::sort(order.begin(), order.end(), better);
    }
    return order;
}

}  // namespace bsc::detail
