#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vistok {

struct pack_item {
    std::string id;
    int64_t length = 0;
};

struct packed_batch {
    std::vector<std::vector<pack_item>> bins;
    int64_t budget = 0;
};

struct pack_stats {
    size_t bin_count = 0;
    std::vector<double> fill_ratios;
    double waste = 0.0;  // 1 - total length / (bins * budget)
};

struct pack_error : std::runtime_error {
    enum class kind { invalid_item, invalid_budget, item_exceeds_budget };
    pack_error(kind k, const std::string& msg, std::string item = {})
        : std::runtime_error(msg), which(k), item_id(std::move(item)) {}
    kind which;
    std::string item_id;
};

// First-fit decreasing: items sorted by length descending (ties by ascending
// id) go into the first bin with room, else open a new bin. Independent of
// input order and never splits an item.
packed_batch pack(std::vector<pack_item> items, int64_t budget);

pack_stats bin_stats(const packed_batch& batch);

}  // namespace vistok
