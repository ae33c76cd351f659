#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace kcoll {

/// Independent deterministic random stream for one Monte-Carlo path.
///
/// The engine is seeded from (master_seed, path_index) through std::seed_seq,
/// so a path's draws depend only on those two numbers and never on which
/// worker runs it.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t path_index);

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t path_index() const { return path_index_; }

    double normal() { return normal_(engine_); }
    void fill_normal(std::span<double> out);

private:
    std::uint64_t master_seed_;
    std::uint64_t path_index_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace kcoll
