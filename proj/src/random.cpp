#include "tsmote/random.hpp"

namespace tsmote {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng derive_stream(std::uint64_t seed, std::string_view tag, std::initializer_list<std::uint64_t> indices) {
    // FNV-1a over the tag keeps distinct purposes on distinct streams.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::uint64_t state = mix64(seed ^ mix64(h));
    for (std::uint64_t i : indices) state = mix64(state ^ mix64(i + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(state), static_cast<std::uint32_t>(state >> 32),
                      static_cast<std::uint32_t>(mix64(state)),
                      static_cast<std::uint32_t>(mix64(state) >> 32)};
    return Rng(seq);
}

double uniform01(Rng& rng) {
    // 53 random bits -> [0, 1)
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(rng);
}

} // namespace tsmote
