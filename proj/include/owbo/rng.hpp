#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace owbo {

// Deterministic random stream. The engine is mt19937_64 (bit-exact across
// platforms); all distributions are generated in-house because the standard
// library leaves distribution algorithms unspecified.
//
// Substreams are derived from the parent's key alone, never from its draw
// position, so substream(i) is invariant to how much of the parent (or of
// sibling substreams) has been consumed.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    Rng substream(std::uint64_t index) const;

    std::uint64_t next_u64();

    // uniform on [0,1) with 53-bit resolution
    double uniform();
    double uniform(double a, double b);

    // standard normal, Box-Muller (pairs cached)
    double normal();

    // unbiased integer on {0,...,n-1}
    std::uint64_t uniform_below(std::uint64_t n);

    Eigen::VectorXd uniform_vector(int d);
    Eigen::VectorXd normal_vector(int d);

    // Fisher-Yates
    std::vector<int> permutation(int n);

private:
    std::uint64_t key_;
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace owbo
