#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "iiab/ids.hpp"

namespace iiab {

// One round of the participation partition. well_behaved() is derived:
// W_r = O_r \ F_r.
struct RoundParticipation {
    std::set<ProcessorId> online;        // O_r
    std::set<ProcessorId> impersonated;  // F_r

    std::set<ProcessorId> well_behaved() const {
        std::set<ProcessorId> w;
        std::set_difference(online.begin(), online.end(), impersonated.begin(),
                            impersonated.end(), std::inserter(w, w.begin()));
        return w;
    }
};

// Per-round (O_r, F_r) assignment up to a finite horizon. Invariants:
// O_r finite and nonempty, F_r subset of O_r, and |F_r| < |W_r| for every
// round (hence W_r nonempty).
struct ParticipationSchedule {
    std::vector<RoundParticipation> rounds;  // index 0 holds round 1

    Round horizon() const { return Round{static_cast<std::uint32_t>(rounds.size())}; }

    const RoundParticipation& at(Round r) const { return rounds.at(r.index - 1); }

    // Union of all scheduled online sets; the engine adds observers on top.
    std::set<ProcessorId> scheduled_processors() const {
        std::set<ProcessorId> all;
        for (const auto& rp : rounds) all.insert(rp.online.begin(), rp.online.end());
        return all;
    }
};

struct ScheduleViolation {
    Round round;
    std::string description;
};

// Checks every ParticipationSchedule invariant; violations are data, not
// failures. An empty result means the schedule is valid.
std::vector<ScheduleViolation> validate_schedule(const ParticipationSchedule& schedule);

// True iff F_r is a subset of F_{r+1} for every r below the horizon.
bool is_growing(const ParticipationSchedule& schedule);

// Canonical JSON document for experiment input:
//   {"horizon": N, "rounds": [{"online": [...], "impersonated": [...]}, ...]}
std::string schedule_to_json(const ParticipationSchedule& schedule);
ParticipationSchedule schedule_from_json(const std::string& text);

}  // namespace iiab
