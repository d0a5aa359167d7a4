#pragma once

#include "bsc/types.h"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bsc {

/// A +-1 code packed into 64-bit words: bit i (LSB-first within word i/64)
/// is 1 exactly when code position i is +1. Unused tail bits stay zero.
struct PackedCode {
    std::vector<std::uint64_t> words;
    std::uint32_t nbits = 0;
};

PackedCode pack(std::span<const std::int8_t> code);
std::vector<std::int8_t> unpack(const PackedCode& code);

int hamming(const PackedCode& a, const PackedCode& b);

/// Inner product of the underlying +-1 vectors: nbits - 2 * hamming(a, b).
int inner_product(const PackedCode& a, const PackedCode& b);

/// Packed video codes with parallel ids; immutable once built, searched by
/// exhaustive scan.
struct BinaryIndex {
    std::uint32_t nbits = 0;
    std::vector<PackedCode> codes;
    std::vector<std::string> ids;

    std::size_t size() const { return codes.size(); }
    void add(std::string id, PackedCode code);
};

struct HammingHit {
    std::string video_id;
    int score;
};

/// Top-k by binary inner product descending (equivalently Hamming distance
/// ascending), ties by ascending id.
std::vector<HammingHit> search(const BinaryIndex& index, const PackedCode& query,
                               std::size_t k, Execution exec = Execution::Parallel);

}  // namespace bsc
