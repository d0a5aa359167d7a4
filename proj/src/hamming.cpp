#include "bsc/hamming.h"

#include "topk.h"

#include <bit>
#include <cstddef>

namespace bsc {

PackedCode pack(std::span<const std::int8_t> code) {
    PackedCode packed;
    packed.nbits = static_cast<std::uint32_t>(code.size());
    packed.words.assign((code.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < code.size(); ++i) {
        if (code[i] == 1) {
            packed.words[i >> 6] |= std::uint64_t{1} << (i & 63);
        } else if (code[i] != -1) {
            throw std::invalid_argument("pack: code entries must be +1 or -1");
        }
    }
    return packed;
}

std::vector<std::int8_t> unpack(const PackedCode& code) {
    std::vector<std::int8_t> out(code.nbits);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (code.words[i >> 6] >> (i & 63)) & 1 ? 1 : -1;
    }
    return out;
}

int hamming(const PackedCode& a, const PackedCode& b) {
    if (a.nbits != b.nbits) {
        throw std::invalid_argument("hamming: code length mismatch");
    }
    int dist = 0;
    for (std::size_t w = 0; w < a.words.size(); ++w) {
        dist += std::popcount(a.words[w] ^ b.words[w]);
    }
    return dist;
}

int inner_product(const PackedCode& a, const PackedCode& b) {
    return static_cast<int>(a.nbits) - 2 * hamming(a, b);
}

void BinaryIndex::add(std::string id, PackedCode code) {
    if (code.nbits != nbits) {
        throw std::invalid_argument("BinaryIndex: code length " + std::to_string(code.nbits) +
                                    " does not match index length " + std::to_string(nbits));
    }
    ids.push_back(std::move(id));
    codes.push_back(std::move(code));
}

std::vector<HammingHit> search(const BinaryIndex& index, const PackedCode& query,
                               std::size_t k, Execution exec) {
    if (index.size() == 0) {
        throw std::invalid_argument("search: empty index");
    }
    if (k > index.size()) {
        throw std::invalid_argument("search: k exceeds index size");
    }
    if (query.nbits != index.nbits) {
        throw std::invalid_argument("search: query code length mismatch");
    }

    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(index.size());
    std::vector<int> scores(index.size());

    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            scores[i] = inner_product(index.codes[i], query);
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            scores[i] = inner_product(index.codes[i], query);
        }
    }

    std::vector<HammingHit> out;
    out.reserve(k);
    for (std::size_t idx : detail::top_k_by_score(scores, index.ids, k)) {
        out.push_back({index.ids[idx], scores[idx]});
    }
    return out;
}

}  // namespace bsc
