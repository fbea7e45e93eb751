#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace survey {

/// 32-bit PRNG with a single word of state (mulberry-style mixer). The
/// browser runner reimplements this generator without 64-bit arithmetic, so
/// the exact mixing sequence is a cross-component contract frozen by
/// tests/golden/prng_vectors.json. Do not alter it.
class Prng {
public:
    explicit Prng(std::uint32_t seed) : state_(seed) {}

    std::uint32_t next_u32() {
        state_ += 0x6D2B79F5u;
        std::uint32_t z = state_;
        z = (z ^ (z >> 15)) * (z | 1u);
        z ^= z + (z ^ (z >> 7)) * (z | 61u);
        return z ^ (z >> 14);
    }

    /// Uniform in [0, n), n > 0. Modulo bias is accepted.
    std::uint32_t next_below(std::uint32_t n) { return next_u32() % n; }

    /// Uniform in [0, 1).
    double next_unit() { return next_u32() / 4294967296.0; }

    std::uint32_t state() const { return state_; }

private:
    std::uint32_t state_;
};

/// FNV-1a hash of a respondent id; the per-session randomization seed.
/// Same id, same seed, same survey instance.
constexpr std::uint32_t seed_from_id(std::string_view id) {
    std::uint32_t h = 2166136261u;
    for (char c : id) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 16777619u;
    }
    return h;
}

/// In-place Fisher-Yates. Consumes len-1 draws; none for fewer than two
/// items.
template <typename T>
void fisher_yates(std::vector<T>& items, Prng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = rng.next_below(static_cast<std::uint32_t>(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace survey
