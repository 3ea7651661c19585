#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "iiab/adversary.hpp"
#include "iiab/ledger.hpp"
#include "iiab/oracle.hpp"
#include "iiab/protocol.hpp"
#include "iiab/schedule.hpp"
#include "iiab/trace.hpp"

namespace iiab {

// Fail-stop diagnostic: a strategy or protocol broke a model rule, or the
// run hit an internal contract breach. Violating strategies abort the run
// rather than being silently clipped.
struct EngineAbort : std::runtime_error {
    explicit EngineAbort(const std::string& what) : std::runtime_error(what) {}
};

struct EngineOptions {
    bool rushing = true;         // adversary observes current-round honest sends
    bool record_trace = false;   // accumulate JSON-lines records
    bool keep_history = true;    // retain per-round link maps after the round
    bool decision_outputs = false;  // outputs are consensus decisions; trace both
};

struct RecordedOutput {
    Round round;
    Payload payload;
};

// Draws one round's leaders: a fair coin from `rng`, then the policy's
// choice within the oracle guarantee. On success the chosen leader must be
// well-behaved this round.
OracleDraw draw_leaders(std::mt19937_64& rng, Round r, const ParticipationSchedule& schedule,
                        OraclePolicy& policy, const std::set<ProcessorId>& materialized);

// Executes IIAB rounds: send phase (well-behaved sends plus validated
// adversary injections), receive phase (every materialized processor,
// online or not, receives all messages addressed to it), signed-message
// ledger enforcement, and the per-round leader draw.
//
// A run is a deterministic function of (schedule, protocols, adversary,
// oracle policy, seed). Copying an engine deep-copies protocol state, so
// checkers can snapshot and branch.
class Engine {
public:
    Engine(std::shared_ptr<const ParticipationSchedule> schedule,
           std::map<ProcessorId, std::unique_ptr<Protocol>> protocols,
           std::shared_ptr<AdversaryStrategy> adversary, std::shared_ptr<OraclePolicy> oracle,
           std::uint64_t seed, EngineOptions options = {});

    Engine(const Engine& other);
    Engine& operator=(const Engine&) = delete;
    Engine(Engine&&) = default;
    Engine& operator=(Engine&&) = default;

    // Runs one full round (send, inject, receive). Throws EngineAbort on
    // any model-rule violation.
    void run_round();

    // Runs rounds until the horizon or until `stop` returns true (checked
    // after each round). Null `stop` runs to the horizon.
    void run(const std::function<bool(const Engine&)>& stop = nullptr);

    Round next_round() const { return Round{completed_ + 1}; }
    bool finished() const { return completed_ >= schedule_->horizon().index; }

    const ParticipationSchedule& schedule() const { return *schedule_; }
    const std::set<ProcessorId>& materialized() const { return materialized_; }
    const Ledger& ledger() const { return ledger_; }
    const LinkHistory& history() const { return history_; }
    const std::map<ProcessorId, RecordedOutput>& outputs() const { return outputs_; }
    const std::map<Round, OracleDraw>& draws() const { return draws_; }
    Trace& trace() { return trace_; }
    const Trace& trace() const { return trace_; }
    const EngineOptions& options() const { return options_; }

    const Protocol& protocol(ProcessorId p) const { return *protocols_.at(p); }
    Protocol& protocol(ProcessorId p) { return *protocols_.at(p); }

    // Rebuilds the receive view a processor saw in a past round. Requires
    // keep_history.
    ReceiveView view_of(Round r, ProcessorId receiver) const;

    void set_adversary(std::shared_ptr<AdversaryStrategy> adversary) {
        adversary_ = std::move(adversary);
    }

private:
    void validate_honest_send(ProcessorId sender, Round r, const Payload& p) const;

    std::shared_ptr<const ParticipationSchedule> schedule_;
    std::map<ProcessorId, std::unique_ptr<Protocol>> protocols_;
    std::shared_ptr<AdversaryStrategy> adversary_;
    std::shared_ptr<OraclePolicy> oracle_;
    EngineOptions options_;
    std::mt19937_64 rng_;

    std::set<ProcessorId> materialized_;
    std::uint32_t completed_ = 0;
    Ledger ledger_;
    std::map<ProcessorId, Ledger> received_;  // per processor: signed messages received
    std::map<ProcessorId, RecordedOutput> outputs_;
    std::map<Round, OracleDraw> draws_;
    LinkHistory history_;
    Trace trace_;
};

}  // namespace iiab
