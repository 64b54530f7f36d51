#include "dandelion/observation.hpp"

#include <algorithm>
#include <tuple>

namespace dandelion {

void ObservationLog::append(std::span<const Observation> obs) {
    records_.insert(records_.end(), obs.begin(), obs.end());
    sorted_ = false;
}

void ObservationLog::finalize() {
    if (sorted_) return;
    std::sort(records_.begin(), records_.end(), [](const Observation& a, const Observation& b) {
        return std::tie(a.time, a.tx, a.deliverer, a.spy) < std::tie(b.time, b.tx, b.deliverer, b.spy);
    });
    sorted_ = true;
}

std::vector<const Observation*> ObservationLog::first_records(std::size_t tx_count) const {
    std::vector<const Observation*> first(tx_count, nullptr);
    for (const auto& rec : records_) {
        if (rec.tx >= tx_count) continue;
        const Observation*& slot = first[rec.tx];
        if (slot == nullptr) {
            slot = &rec;
        } else if (rec.time == slot->time &&
                   std::tie(rec.deliverer, rec.spy) < std::tie(slot->deliverer, slot->spy)) {
            slot = &rec;
        }
    }
    return first;
}

}  // namespace dandelion
