#pragma once

#include <map>
#include <memory>
#include <set>
#include <vector>

#include "iiab/ledger.hpp"
#include "iiab/oracle.hpp"
#include "iiab/payload.hpp"
#include "iiab/schedule.hpp"

namespace iiab {

// Per-round link history: history[round][receiver][sender] = payload set.
using LinkMap = std::map<ProcessorId, std::map<ProcessorId, std::set<Payload>>>;
using LinkHistory = std::map<Round, LinkMap>;

// Everything the adversary may observe when choosing its round-r move.
// Under a rushing adversary (the default) honest_sends holds the current
// round's well-behaved broadcasts; in non-rushing mode it is empty.
struct RoundObservation {
    Round round;
    const ParticipationSchedule& schedule;
    const std::set<ProcessorId>& materialized;
    const std::map<ProcessorId, std::vector<Payload>>& honest_sends;
    const Ledger& ledger;
    const OracleDraw& draw;
    const LinkHistory& history;
};

// A decision procedure producing injected messages per impersonated
// processor. Strategies must be pure functions of (seed, observation):
// no hidden state, so exhaustive enumeration and replay are exact.
class AdversaryStrategy {
public:
    virtual ~AdversaryStrategy() = default;
    virtual AdversaryDecision decide(const RoundObservation& obs) = 0;
};

}  // namespace iiab
