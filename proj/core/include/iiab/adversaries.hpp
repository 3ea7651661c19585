#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "iiab/adversary.hpp"
#include "iiab/noeq.hpp"
#include "iiab/oracle.hpp"
#include "iiab/schedule.hpp"

namespace iiab {

// Injects nothing, ever.
class SilentAdversary final : public AdversaryStrategy {
public:
    AdversaryDecision decide(const RoundObservation&) override { return {}; }
};

// Replays a fixed per-round move list; rounds beyond the script are silent.
// This is how checker behavior scripts are re-executed.
class ScriptedAdversary final : public AdversaryStrategy {
public:
    explicit ScriptedAdversary(std::map<Round, AdversaryDecision> script)
        : script_(std::move(script)) {}

    AdversaryDecision decide(const RoundObservation& obs) override {
        auto it = script_.find(obs.round);
        return it == script_.end() ? AdversaryDecision{} : it->second;
    }

    const std::map<Round, AdversaryDecision>& script() const { return script_; }

private:
    std::map<Round, AdversaryDecision> script_;
};

// Rushing echo-splitter: each round, for each impersonated processor, echoes
// one honest processor's message to the first half of the receivers and a
// different honest message to the rest. Signed honest payloads are re-signed
// under the impersonated id (their content is already on the ledger, so the
// forgery is valid); bare payloads are echoed verbatim. With fewer than two
// distinct honest messages this degenerates to a uniform echo.
class EquivocatorSplitAdversary final : public AdversaryStrategy {
public:
    AdversaryDecision decide(const RoundObservation& obs) override;
};

// Oracle worst case within the guarantee: on success the lowest-id
// well-behaved processor (the one least likely to have committed); on
// failure pairwise-disagreeing leaders via rotation.
class LeaderWithholderPolicy final : public OraclePolicy {
public:
    ProcessorId pick_leader_on_success(Round, const std::set<ProcessorId>& well_behaved) override {
        return *well_behaved.begin();
    }

    std::map<ProcessorId, ProcessorId> assign_leaders_on_failure(
        Round, const std::set<ProcessorId>& materialized) override {
        std::vector<ProcessorId> ids(materialized.begin(), materialized.end());
        std::map<ProcessorId, ProcessorId> out;
        for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]] = ids[(i + 1) % ids.size()];
        return out;
    }
};

// Scripted no-equivocation shapes, validated at construction against the
// declared receiver universe. Used to replay enumerated behaviors.
class NoEqScriptedStrategy final : public NoEqAdversaryStrategy {
public:
    // universe: all materialized processors (shape receivers are the
    // universe minus the impersonated sender).
    NoEqScriptedStrategy(std::map<Round, NoEqAdversaryDecision> script,
                         std::set<ProcessorId> universe);

    NoEqAdversaryDecision decide(const NoEqRoundObservation& obs) override {
        auto it = script_.find(obs.round);
        return it == script_.end() ? NoEqAdversaryDecision{} : it->second;
    }

    const std::map<Round, NoEqAdversaryDecision>& script() const { return script_; }

private:
    std::map<Round, NoEqAdversaryDecision> script_;
};

class NoEqSilentStrategy final : public NoEqAdversaryStrategy {
public:
    NoEqAdversaryDecision decide(const NoEqRoundObservation&) override { return {}; }
};

// --------------------------------------------------------------------------
// Schedule generators. Every generated schedule passes validate_schedule;
// unsatisfiable parameters throw std::invalid_argument.
// --------------------------------------------------------------------------

// O_r = {1..n}, F_r = {1..f} for every round.
ParticipationSchedule constant_schedule(std::uint32_t n, std::uint32_t f, std::uint32_t horizon);

// Constant O_r = {1..n}; F grows by one processor every `step` rounds up to
// `max_f`, starting empty.
ParticipationSchedule growing_adversary_schedule(std::uint32_t n, std::uint32_t max_f,
                                                 std::uint32_t step, std::uint32_t horizon);

// Pre-R rounds churn through disjoint filler sets around an always-online
// core; from round R on, participation is constant at O_R = {1..n}.
// F_r = {1..f} from `impersonation_start` on (growing: empty before).
ParticipationSchedule stabilizing_schedule(std::uint32_t stabilization_round, std::uint32_t n,
                                           std::uint32_t f, std::uint32_t impersonation_start,
                                           std::uint32_t horizon);

// Maximal churn: every round a fresh window of `window` ids never seen
// before, plus an always-online impersonated core of `pinned_f` ids. With
// pinned_f = 0 no processor is online in more than one round.
ParticipationSchedule churn_schedule(std::uint32_t window, std::uint32_t pinned_f,
                                     std::uint32_t horizon);

// --------------------------------------------------------------------------
// Registry used by the experiment config.
// --------------------------------------------------------------------------

std::shared_ptr<AdversaryStrategy> make_adversary(const std::string& name);
std::shared_ptr<OraclePolicy> make_oracle_policy(const std::string& name);

}  // namespace iiab
