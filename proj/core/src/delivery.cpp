#include "iiab/delivery.hpp"

#include <map>
#include <stdexcept>

namespace iiab {

bool strict_majority(const ReceiveView& view, const Payload& target) {
    std::size_t heard = view.heard_of().size();
    if (heard == 0) throw std::invalid_argument("strict_majority: no senders heard");
    return 2 * view.count_delivering(target) > heard;
}

std::optional<Value> plurality_unique(const ReceiveView& view) {
    // Count senders per value. In the IIAB form a sender may deliver several
    // distinct values on one link; each distinct value counts that sender
    // once.
    std::map<Value, std::size_t> counts;
    if (view.is_noeq()) {
        for (const auto& [p, e] : view.noeq().entries()) {
            if (!e.has_value()) continue;
            if (const Value* v = e->as_value()) ++counts[*v];
        }
    } else {
        for (const auto& [p, msgs] : view.links()) {
            std::set<Value> seen;
            for (const Payload& m : msgs)
                if (const Value* v = m.as_value()) seen.insert(*v);
            for (const Value& v : seen) ++counts[v];
        }
    }
    const Value* best = nullptr;
    std::size_t best_count = 0;
    bool tie = false;
    for (const auto& [v, n] : counts) {
        if (n > best_count) {
            best = &v;
            best_count = n;
            tie = false;
        } else if (n == best_count && best_count > 0) {
            tie = true;
        }
    }
    if (!best || tie) return std::nullopt;
    return *best;
}

}  // namespace iiab
