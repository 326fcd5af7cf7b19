#pragma once

#include <array>
#include <cstdint>

namespace sagbell {

/// Philox4x32-10 counter-based generator.
///
/// Stateless: every 128-bit block is a pure function of (counter, key), so
/// any draw can be addressed directly. The sampler keys the generator with
/// the run seed and uses the counter words for (shot index, draw slot),
/// which makes parallel batch generation and serial generation produce
/// identical streams by construction.
class Philox4x32 {
public:
    using Counter = std::array<uint32_t, 4>;
    using Key = std::array<uint32_t, 2>;

    static Counter block(Counter counter, Key key) {
        for (int round = 0; round < 10; ++round) {
            counter = bumped(counter, key);
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return counter;
    }

    /// Double in [0, 1) from the block addressed by (key, counter), using 53
    /// bits of the first two output words.
    static double uniform01(Counter counter, Key key) {
        Counter out = block(counter, key);
        uint64_t bits = (static_cast<uint64_t>(out[1]) << 32) | out[0];
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

    static Key key_from_seed(uint64_t seed) {
        return Key{static_cast<uint32_t>(seed & 0xFFFFFFFFu),
                   static_cast<uint32_t>(seed >> 32)};
    }

private:
    static void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
        uint64_t p = static_cast<uint64_t>(a) * static_cast<uint64_t>(b);
        hi = static_cast<uint32_t>(p >> 32);
        lo = static_cast<uint32_t>(p & 0xFFFFFFFFu);
    }

    static Counter bumped(const Counter& c, const Key& k) {
        uint32_t hi0, lo0, hi1, lo1;
        mulhilo(0xD2511F53u, c[0], hi0, lo0);
        mulhilo(0xCD9E8D57u, c[2], hi1, lo1);
        return Counter{hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

}  // namespace sagbell
