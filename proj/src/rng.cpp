#include "kcoll/rng.hpp"

namespace kcoll {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t master_seed, std::uint64_t path_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(path_index),
                      static_cast<std::uint32_t>(path_index >> 32),
                      0x6b636f6cu};
    return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t path_index)
    : master_seed_(master_seed),
      path_index_(path_index),
      engine_(seeded_engine(master_seed, path_index)) {}

void RngStream::fill_normal(std::span<double> out) {
    for (double& v : out) v = normal_(engine_);
}

}  // namespace kcoll
