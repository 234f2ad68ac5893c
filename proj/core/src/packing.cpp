#include "vistok/packing.hpp"

#include <algorithm>

namespace vistok {

packed_batch pack(std::vector<pack_item> items, int64_t budget) {
    if (budget < 1)
        throw pack_error(pack_error::kind::invalid_budget, "budget must be >= 1");
    for (const auto& it : items) {
        if (it.length < 1)
            throw pack_error(pack_error::kind::invalid_item,
                             "item '" + it.id + "' has non-positive length", it.id);
        if (it.length > budget)
            throw pack_error(pack_error::kind::item_exceeds_budget,
                             "item '" + it.id + "' is longer than the budget", it.id);
    }

    std::sort(items.begin(), items.end(), [](const pack_item& a, const pack_item& b) {
        if (a.length != b.length) return a.length > b.length;
        return a.id < b.id;
    });

    packed_batch batch;
    batch.budget = budget;
    std::vector<int64_t> loads;
    for (auto& it : items) {
        size_t slot = loads.size();
        for (size_t b = 0; b < loads.size(); ++b) {
            if (loads[b] + it.length <= budget) {
                slot = b;
                break;
            }
        }
        if (slot == loads.size()) {
            loads.push_back(0);
            batch.bins.emplace_back();
        }
        loads[slot] += it.length;
        batch.bins[slot].push_back(std::move(it));
    }
    return batch;
}

pack_stats bin_stats(const packed_batch& batch) {
    if (batch.budget < 1)
        throw pack_error(pack_error::kind::invalid_budget, "budget must be >= 1");
    pack_stats st;
    st.bin_count = batch.bins.size();
    int64_t total = 0;
    for (const auto& bin : batch.bins) {
        int64_t load = 0;
        for (const auto& it : bin) load += it.length;
        total += load;
        st.fill_ratios.push_back(static_cast<double>(load) / static_cast<double>(batch.budget));
    }
    st.waste = batch.bins.empty()
                   ? 0.0
                   : 1.0 - static_cast<double>(total) /
                               (static_cast<double>(st.bin_count) * static_cast<double>(batch.budget));
    return st;
}

}  // namespace vistok
