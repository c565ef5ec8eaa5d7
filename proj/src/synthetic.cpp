#include "catinsight/synthetic.hpp"

#include "catinsight/error.hpp"

#include <algorithm>
#include <random>

namespace catinsight {

namespace {

// Portable draws: libstdc++/libc++ distributions differ, raw engine output does not.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : engine_(seed) {}

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

} // namespace

std::string PlantedBlocks::dominant_value(std::size_t block) {
    return "p" + std::to_string(block);
}

PlantedBlocks make_planted_blocks(const PlantedBlocksSpec& spec) {
    if (spec.blocks == 0 || spec.columns == 0 || spec.noise_values == 0) {
        throw ConfigError("planted blocks: blocks, columns and noise_values must be positive");
    }
    if (spec.implication_size > spec.columns) {
        throw ConfigError("planted blocks: implication_size exceeds the column count");
    }
    Draw draw(spec.seed);
    PlantedBlocks out;
    for (std::size_t c = 0; c < spec.columns; ++c) {
        out.dataset.schema.push_back(ColumnSchema{"c" + std::to_string(c), ColumnKind::categorical,
                                                  std::nullopt});
    }
    for (std::size_t b = 0; b < spec.blocks; ++b) {
        std::vector<std::size_t> forced;
        for (std::size_t k = 0; k < spec.implication_size; ++k) {
            forced.push_back((b * spec.implication_size + k) % spec.columns);
        }
        std::sort(forced.begin(), forced.end());
        out.implications.push_back(std::move(forced));
    }

    const auto noise_rows = static_cast<std::size_t>(
        static_cast<double>(spec.rows) * spec.noise_row_fraction + 0.5);
    const std::size_t block_rows = spec.rows - std::min(noise_rows, spec.rows);

    auto noise_value = [&] { return "n" + std::to_string(draw.below(spec.noise_values)); };
    for (std::size_t r = 0; r < block_rows; ++r) {
        const std::size_t b = r * spec.blocks / std::max<std::size_t>(block_rows, 1);
        const auto& forced = out.implications[b];
        std::vector<std::string> row(spec.columns);
        for (std::size_t c = 0; c < spec.columns; ++c) {
            const bool is_forced = std::binary_search(forced.begin(), forced.end(), c);
            row[c] = (!is_forced && draw.unit() < spec.cell_noise) ? noise_value()
                                                                    : PlantedBlocks::dominant_value(b);
        }
        out.dataset.rows.push_back(std::move(row));
        out.block.push_back(static_cast<int>(b));
    }
    const std::size_t pool = spec.noise_values + spec.blocks;
    for (std::size_t r = block_rows; r < spec.rows; ++r) {
        std::vector<std::string> row(spec.columns);
        for (auto& cell : row) {
            const auto k = draw.below(pool);
            cell = k < spec.noise_values ? "n" + std::to_string(k)
                                         : PlantedBlocks::dominant_value(k - spec.noise_values);
        }
        out.dataset.rows.push_back(std::move(row));
        out.block.push_back(-1);
    }

    // Shuffle so row ids carry no block information.
    for (std::size_t i = out.dataset.rows.size(); i > 1; --i) {
        const std::size_t j = draw.below(i);
        std::swap(out.dataset.rows[i - 1], out.dataset.rows[j]);
        std::swap(out.block[i - 1], out.block[j]);
    }
    return out;
}

} // namespace catinsight
