#pragma once

#include "catinsight/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace catinsight {

/// Rows drawn from a few blocks, each with its own dominant value per column,
/// plus uniformly random noise rows. Inside block b the columns listed in
/// `implications[b]` always carry the dominant value, so they co-occur.
struct PlantedBlocksSpec {
    std::size_t rows = 1000;
    std::size_t columns = 8;
    std::size_t blocks = 2;
    std::size_t noise_values = 6;    // shared non-dominant values per column
    double noise_row_fraction = 0.05;
    double cell_noise = 0.1;         // chance a free cell leaves its block pattern
    std::size_t implication_size = 3;
    std::uint64_t seed = 7;
};

struct PlantedBlocks {
    Dataset dataset;
    std::vector<int> block;                          // per row; -1 for noise rows
    std::vector<std::vector<std::size_t>> implications; // forced columns per block

    // Value carried by block b's dominant pattern.
    static std::string dominant_value(std::size_t block);
};

PlantedBlocks make_planted_blocks(const PlantedBlocksSpec& spec);

} // namespace catinsight
