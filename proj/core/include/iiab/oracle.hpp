#pragma once

#include <map>
#include <set>

#include "iiab/ids.hpp"

namespace iiab {

// One round's draw from the leader-election oracle. The coin succeeds with
// probability 1/2; on success all per-processor leaders equal a single
// well-behaved l_r.
struct OracleDraw {
    Round round;
    bool success = false;
    std::map<ProcessorId, ProcessorId> leaders;  // l_p^r per materialized p

    ProcessorId leader_for(ProcessorId p) const {
        auto it = leaders.find(p);
        return it == leaders.end() ? p : it->second;
    }
};

// The adversarial choices the oracle guarantee leaves open: which
// well-behaved leader everyone gets on success, and arbitrary per-processor
// leaders on failure.
class OraclePolicy {
public:
    virtual ~OraclePolicy() = default;

    // Must return a member of `well_behaved`; the engine aborts otherwise.
    virtual ProcessorId pick_leader_on_success(Round r,
                                               const std::set<ProcessorId>& well_behaved) = 0;

    virtual std::map<ProcessorId, ProcessorId> assign_leaders_on_failure(
        Round r, const std::set<ProcessorId>& materialized) = 0;
};

}  // namespace iiab
