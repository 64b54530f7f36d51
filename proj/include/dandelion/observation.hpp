#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dandelion/topology.hpp"

namespace dandelion {

using TxId = std::uint32_t;

enum class Phase : std::uint8_t { stem, fluff };

// One adversarial sighting: `spy` received `tx` from honest `deliverer` at `time`.
struct Observation {
    TxId tx = 0;
    NodeId deliverer = kNoNode;
    NodeId spy = kNoNode;
    double time = 0.0;
    Phase phase = Phase::stem;

    friend bool operator==(const Observation&, const Observation&) = default;
};

// Everything the adversary saw in one trial, ordered by (time, tx, deliverer, spy).
class ObservationLog {
  public:
    bool graph_known = false;
    bool routing_known = false;

    void add(const Observation& obs) { records_.push_back(obs); sorted_ = false; }
    void append(std::span<const Observation> obs);

    // Sorts records; estimators call this themselves, so it is cheap to call twice.
    void finalize();

    std::span<const Observation> records() const { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    // Earliest record per transaction (ties: lowest deliverer, then lowest spy);
    // nullptr for unobserved transactions. Requires finalize().
    std::vector<const Observation*> first_records(std::size_t tx_count) const;

    friend bool operator==(const ObservationLog& a, const ObservationLog& b) {
        return a.records_ == b.records_;
    }

  private:
    std::vector<Observation> records_;
    bool sorted_ = true;
};

}  // namespace dandelion
