#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <variant>
#include <vector>

#include "iiab/delivery.hpp"
#include "iiab/engine.hpp"
#include "iiab/oracle.hpp"
#include "iiab/schedule.hpp"
#include "iiab/trace.hpp"

namespace iiab {

// The adversary's per-round move for one impersonated processor in the
// no-equivocation model. Receiver sets range over the materialized
// processors other than the impersonated sender itself.
//
//   silent        nothing on any channel
//   uniform(m)    m to every receiver
//   split(m, S)   m to S, lambda to the complement; S nonempty and proper
//   lambda_only(L) lambda to L, nothing to the rest; L may be the full set
struct NoEqShape {
    enum class Kind { silent, uniform, split, lambda_only };
    Kind kind = Kind::silent;
    std::optional<Payload> message;     // uniform, split
    std::set<ProcessorId> recipients;   // split: gets m; lambda_only: gets lambda

    static NoEqShape silent() { return {}; }
    static NoEqShape uniform(Payload m) { return {Kind::uniform, std::move(m), {}}; }
    static NoEqShape split(Payload m, std::set<ProcessorId> s) {
        return {Kind::split, std::move(m), std::move(s)};
    }
    static NoEqShape lambda_only(std::set<ProcessorId> l) {
        return {Kind::lambda_only, std::nullopt, std::move(l)};
    }

    bool operator==(const NoEqShape&) const = default;
};

// Exactly one shape per impersonated processor per round.
struct NoEqAdversaryDecision {
    std::map<ProcessorId, NoEqShape> shapes;
};

struct NoEqRoundObservation {
    Round round;
    const ParticipationSchedule& schedule;
    const std::set<ProcessorId>& materialized;
    const std::map<ProcessorId, Payload>& honest_broadcasts;  // this round, rushing
    const OracleDraw& draw;
};

class NoEqAdversaryStrategy {
public:
    virtual ~NoEqAdversaryStrategy() = default;
    virtual NoEqAdversaryDecision decide(const NoEqRoundObservation& obs) = 0;
};

struct NoEqContext {
    Round round;  // no-eq round index within this instance
    ProcessorId self;
    ProcessorId leader;
};

// A protocol written against the no-equivocation contract: each online
// processor broadcasts exactly one payload per round and consumes one
// NoEqDelivery. The same protocol object runs on the native no-eq engine
// or on the two-IIAB-rounds-per-round simulation adapter.
class NoEqProtocol {
public:
    virtual ~NoEqProtocol() = default;

    virtual Payload broadcast(const NoEqContext& ctx) const = 0;
    virtual std::optional<Payload> deliver(const NoEqContext& ctx, const NoEqDelivery& d) = 0;

    virtual std::unique_ptr<NoEqProtocol> clone() const = 0;
};

// Executes no-equivocation rounds natively, enforcing the delivery shapes
// of the model directly: a well-behaved online sender's payload reaches
// every materialized receiver; an impersonated sender's links follow the
// adversary's validated shape; offline senders are absent.
class NoEqEngine {
public:
    NoEqEngine(std::shared_ptr<const ParticipationSchedule> schedule,
               std::map<ProcessorId, std::unique_ptr<NoEqProtocol>> protocols,
               std::shared_ptr<NoEqAdversaryStrategy> adversary,
               std::shared_ptr<OraclePolicy> oracle, std::uint64_t seed,
               bool record_trace = false);

    NoEqEngine(const NoEqEngine& other);
    NoEqEngine(NoEqEngine&&) = default;

    void run_round();
    void run();

    Round next_round() const { return Round{completed_ + 1}; }
    bool finished() const { return completed_ >= schedule_->horizon().index; }

    const std::set<ProcessorId>& materialized() const { return materialized_; }
    const std::map<ProcessorId, RecordedOutput>& outputs() const { return outputs_; }
    // Deliveries of a completed round, per receiver.
    const std::map<ProcessorId, NoEqDelivery>& deliveries(Round r) const {
        return delivery_log_.at(r);
    }
    const std::map<Round, std::map<ProcessorId, NoEqDelivery>>& delivery_log() const {
        return delivery_log_;
    }
    Trace& trace() { return trace_; }

    void set_adversary(std::shared_ptr<NoEqAdversaryStrategy> adversary) {
        adversary_ = std::move(adversary);
    }

private:
    std::shared_ptr<const ParticipationSchedule> schedule_;
    std::map<ProcessorId, std::unique_ptr<NoEqProtocol>> protocols_;
    std::shared_ptr<NoEqAdversaryStrategy> adversary_;
    std::shared_ptr<OraclePolicy> oracle_;
    bool record_trace_;
    std::mt19937_64 rng_;

    std::set<ProcessorId> materialized_;
    std::uint32_t completed_ = 0;
    std::map<ProcessorId, RecordedOutput> outputs_;
    std::map<Round, std::map<ProcessorId, NoEqDelivery>> delivery_log_;
    std::map<Round, OracleDraw> draws_;
    Trace trace_;
};

// Cross-processor delivery pattern for one subject, mapped to the model's
// case list. The pattern is evaluated over receivers other than the subject
// itself (the self-link is engine-internal).
enum class DeliveryCase { none_heard = 1, all_same = 2, message_or_lambda = 3, lambda_or_silent = 4, invalid = 0 };

DeliveryCase classify_delivery_profile(const std::map<ProcessorId, NoEqDelivery>& deliveries,
                                       ProcessorId subject);

}  // namespace iiab
