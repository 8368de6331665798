#pragma once

#include <complex>
#include <cstdint>

namespace nlmsa {

// xoshiro256++ with splitmix64 seeding. Hand-rolled so that streams are
// reproducible bit-for-bit across platforms and standard-library versions
// (std::normal_distribution is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform on (0, 1]: never zero, safe under log().
    double uniform_pos();

    // Standard normal via Box-Muller; one cached value between calls.
    double normal();

    // Circular complex gaussian CN(0,1): real/imag each N(0, 1/2).
    std::complex<double> cnormal();

private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Derives provably distinct substream seeds from (master_seed, index) by a
// 64-bit mix; results depend only on the pair, never on execution order.
struct RngSeedPolicy {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_seed(std::uint64_t index) const;
    Rng stream(std::uint64_t index) const { return Rng(stream_seed(index)); }
};

}  // namespace nlmsa
