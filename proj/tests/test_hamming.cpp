#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bsc/hamming.h"
#include "bsc/ibc.h"
#include "bsc/rand.h"

#include <cstdint>

using bsc::PackedCode;
using bsc::SignCode;

namespace {

SignCode random_code(bsc::Rng& rng, int bits) {
    SignCode code(bits);
    for (int b = 0; b < bits; ++b) code[b] = rng.uniform() < 0.5 ? -1 : 1;
    return code;
}

SignCode from_mask(std::uint32_t mask, int bits) {
    SignCode code(bits);
    for (int b = 0; b < bits; ++b) code[b] = (mask >> b) & 1 ? 1 : -1;
    return code;
}

}  // namespace

TEST_CASE("pack fixes the bit order: position i -> bit i, LSB first") {
    SignCode all_plus{1, 1, 1, 1};
    PackedCode packed = bsc::pack(all_plus);
    CHECK(packed.nbits == 4);
    CHECK(packed.words.size() == 1);
    CHECK(packed.words[0] == 0b1111);

    SignCode all_minus{-1, -1};
    CHECK(bsc::pack(all_minus).words[0] == 0b00);

    SignCode mixed{1, -1, 1};
    CHECK(bsc::pack(mixed).words[0] == 0b101);

    SignCode bad{1, 0, -1};
    CHECK_THROWS_AS(bsc::pack(bad), std::invalid_argument);
}

TEST_CASE("pack/unpack round trip, including non-word-aligned lengths") {
    bsc::Rng rng(5);
    for (int bits : {1, 7, 63, 64, 65, 128, 130}) {
        SignCode code = random_code(rng, bits);
        PackedCode packed = bsc::pack(code);
        CHECK(bsc::unpack(packed) == code);
        // Unused tail bits stay zero.
        if (bits % 64 != 0) {
            CHECK((packed.words.back() >> (bits % 64)) == 0);
        }
    }
}

TEST_CASE("inner_product closed forms") {
    bsc::Rng rng(7);
    SignCode a = random_code(rng, 64);
    PackedCode pa = bsc::pack(a);
    CHECK(bsc::inner_product(pa, pa) == 64);

    SignCode negated(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) negated[i] = -a[i];
    CHECK(bsc::inner_product(pa, bsc::pack(negated)) == -64);

    PackedCode x = bsc::pack(SignCode{1, 1, -1, 1});
    PackedCode y = bsc::pack(SignCode{1, -1, -1, 1});
    CHECK(bsc::hamming(x, y) == 1);
    CHECK(bsc::inner_product(x, y) == 2);

    CHECK_THROWS_AS(bsc::inner_product(pa, x), std::invalid_argument);
}

TEST_CASE("inner_product = r - 2*hamming, exhaustively for r <= 8") {
    for (int r = 1; r <= 8; ++r) {
        for (std::uint32_t ma = 0; ma < (1u << r); ++ma) {
            for (std::uint32_t mb = 0; mb < (1u << r); ++mb) {
                SignCode a = from_mask(ma, r);
                SignCode b = from_mask(mb, r);
                int dense = 0;
                for (int i = 0; i < r; ++i) dense += a[i] * b[i];
                PackedCode pa = bsc::pack(a), pb = bsc::pack(b);
                REQUIRE(bsc::inner_product(pa, pb) == dense);
                REQUIRE(bsc::inner_product(pa, pb) == r - 2 * bsc::hamming(pa, pb));
            }
        }
    }
}

TEST_CASE("inner_product matches the dense +-1 oracle at r = 64 and 128") {
    bsc::Rng rng(11);
    for (int r : {64, 128}) {
        for (int trial = 0; trial < 500; ++trial) {
            SignCode a = random_code(rng, r);
            SignCode b = random_code(rng, r);
            int dense = 0;
            for (int i = 0; i < r; ++i) dense += a[i] * b[i];
            CHECK(bsc::inner_product(bsc::pack(a), bsc::pack(b)) == dense);
        }
    }
}

TEST_CASE("BinaryIndex add validates code lengths") {
    bsc::BinaryIndex index;
    index.nbits = 8;
    CHECK_THROWS_AS(index.add("v", bsc::pack(SignCode{1, -1})), std::invalid_argument);
}

TEST_CASE("search basics and error paths") {
    bsc::Rng rng(13);
    bsc::BinaryIndex index;
    index.nbits = 16;
    SignCode stored = random_code(rng, 16);
    index.add("only", bsc::pack(stored));

    auto hits = bsc::search(index, bsc::pack(stored), 1);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].video_id == "only");
    CHECK(hits[0].score == 16);

    CHECK_THROWS_AS(bsc::search(index, bsc::pack(random_code(rng, 16)), 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(bsc::search(index, bsc::pack(random_code(rng, 8)), 1),
                    std::invalid_argument);
    bsc::BinaryIndex empty;
    empty.nbits = 16;
    CHECK_THROWS_AS(bsc::search(empty, bsc::pack(stored), 0), std::invalid_argument);
}

TEST_CASE("an exact query code ranks its video first with score r") {
    bsc::Rng rng(17);
    bsc::BinaryIndex index;
    index.nbits = 32;
    std::vector<SignCode> codes;
    for (int i = 0; i < 50; ++i) {
        codes.push_back(random_code(rng, 32));
        char id[8];
        std::snprintf(id, sizeof(id), "v%03d", i);
        index.add(id, bsc::pack(codes.back()));
    }
    auto hits = bsc::search(index, bsc::pack(codes[31]), 1);
    CHECK(hits[0].video_id == "v031");
    CHECK(hits[0].score == 32);
}

TEST_CASE("search matches the dense ranking oracle on 1000 codes") {
    bsc::Rng rng(19);
    bsc::BinaryIndex index;
    index.nbits = 64;
    std::vector<SignCode> codes;
    for (int i = 0; i < 1000; ++i) {
        codes.push_back(random_code(rng, 64));
        char id[8];
        std::snprintf(id, sizeof(id), "v%04d", i);
        index.add(id, bsc::pack(codes.back()));
    }
    SignCode probe = random_code(rng, 64);

    std::vector<std::pair<int, std::string>> oracle_scores;
    for (int i = 0; i < 1000; ++i) {
        int dense = 0;
        for (int b = 0; b < 64; ++b) dense += probe[b] * codes[i][b];
        oracle_scores.emplace_back(dense, index.ids[i]);
    }
    // Descending score, ascending id -- the library tie rule.
    std::sort(oracle_scores.begin(), oracle_scores.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    auto hits = bsc::search(index, bsc::pack(probe), 100);
    auto serial = bsc::search(index, bsc::pack(probe), 100, bsc::Execution::Serial);
    for (std::size_t i = 0; i < hits.size(); ++i) {
        CHECK(hits[i].video_id == oracle_scores[i].second);
        CHECK(hits[i].score == oracle_scores[i].first);
        CHECK(hits[i].video_id == serial[i].video_id);
    }
}

TEST_CASE("search ordering equals ascending Hamming distance with the same tie rule") {
    bsc::Rng rng(23);
    bsc::BinaryIndex index;
    index.nbits = 12;
    // Duplicates force ties.
    SignCode shared = random_code(rng, 12);
    index.add("b_dup", bsc::pack(shared));
    index.add("a_dup", bsc::pack(shared));
    for (int i = 0; i < 20; ++i) {
        index.add("m" + std::to_string(100 + i), bsc::pack(random_code(rng, 12)));
    }
    SignCode probe = random_code(rng, 12);
    auto hits = bsc::search(index, bsc::pack(probe), index.size());
    for (std::size_t i = 0; i + 1 < hits.size(); ++i) {
        CHECK(hits[i].score >= hits[i + 1].score);
        if (hits[i].score == hits[i + 1].score) {
            CHECK(hits[i].video_id < hits[i + 1].video_id);
        }
    }
}
