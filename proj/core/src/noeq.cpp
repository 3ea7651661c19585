#include "iiab/noeq.hpp"

#include <nlohmann/json.hpp>

#include "iiab/json_io.hpp"

namespace iiab {

using nlohmann::json;

NoEqEngine::NoEqEngine(std::shared_ptr<const ParticipationSchedule> schedule,
                       std::map<ProcessorId, std::unique_ptr<NoEqProtocol>> protocols,
                       std::shared_ptr<NoEqAdversaryStrategy> adversary,
                       std::shared_ptr<OraclePolicy> oracle, std::uint64_t seed, bool record_trace)
    : schedule_(std::move(schedule)),
      protocols_(std::move(protocols)),
      adversary_(std::move(adversary)),
      oracle_(std::move(oracle)),
      record_trace_(record_trace),
      rng_(seed) {
    auto violations = validate_schedule(*schedule_);
    if (!violations.empty())
        throw EngineAbort("invalid schedule: " + violations.front().description + " in " +
                          to_string(violations.front().round));
    for (const auto& [p, _] : protocols_) materialized_.insert(p);
    for (ProcessorId p : schedule_->scheduled_processors())
        if (!materialized_.count(p))
            throw EngineAbort("scheduled processor " + to_string(p) + " has no protocol");
}

NoEqEngine::NoEqEngine(const NoEqEngine& other)
    : schedule_(other.schedule_),
      adversary_(other.adversary_),
      oracle_(other.oracle_),
      record_trace_(other.record_trace_),
      rng_(other.rng_),
      materialized_(other.materialized_),
      completed_(other.completed_),
      outputs_(other.outputs_),
      delivery_log_(other.delivery_log_),
      draws_(other.draws_) {
    for (const auto& [p, proto] : other.protocols_) protocols_.emplace(p, proto->clone());
}

namespace {

void validate_shape(const NoEqShape& shape, ProcessorId owner,
                    const std::set<ProcessorId>& receivers) {
    auto check_subset = [&](const std::set<ProcessorId>& s) {
        for (ProcessorId p : s)
            if (!receivers.count(p))
                throw EngineAbort("shape for " + to_string(owner) + " names non-receiver " +
                                  to_string(p));
    };
    switch (shape.kind) {
    case NoEqShape::Kind::silent:
        return;
    case NoEqShape::Kind::uniform:
        if (!shape.message) throw EngineAbort("uniform shape without message");
        return;
    case NoEqShape::Kind::split:
        if (!shape.message) throw EngineAbort("split shape without message");
        check_subset(shape.recipients);
        if (shape.recipients.empty() || shape.recipients.size() >= receivers.size())
            throw EngineAbort("split recipient set for " + to_string(owner) +
                              " must be nonempty and proper");
        return;
    case NoEqShape::Kind::lambda_only:
        check_subset(shape.recipients);
        return;
    }
}

}  // namespace

void NoEqEngine::run_round() {
    if (finished()) throw EngineAbort("run_round past schedule horizon");
    const Round r{completed_ + 1};
    const RoundParticipation& rp = schedule_->at(r);
    const std::set<ProcessorId> well_behaved = rp.well_behaved();

    OracleDraw draw = draw_leaders(rng_, r, *schedule_, *oracle_, materialized_);
    draws_[r] = draw;

    std::map<ProcessorId, Payload> broadcasts;
    for (ProcessorId p : rp.online) {
        NoEqContext ctx{r, p, draw.leader_for(p)};
        broadcasts.emplace(p, protocols_.at(p)->broadcast(ctx));
    }

    NoEqRoundObservation obs{r, *schedule_, materialized_, broadcasts, draw};
    NoEqAdversaryDecision decision =
        adversary_ ? adversary_->decide(obs) : NoEqAdversaryDecision{};
    for (const auto& [owner, shape] : decision.shapes) {
        if (!rp.impersonated.count(owner))
            throw EngineAbort("no-eq decision names non-impersonated " + to_string(owner));
        std::set<ProcessorId> receivers = materialized_;
        receivers.erase(owner);
        validate_shape(shape, owner, receivers);
    }

    std::map<ProcessorId, NoEqDelivery> deliveries;
    for (ProcessorId q : materialized_) deliveries[q] = NoEqDelivery{};

    for (ProcessorId p : rp.online) {
        if (well_behaved.count(p)) {
            const Payload& m = broadcasts.at(p);
            for (ProcessorId q : materialized_) deliveries[q].set_message(p, m);
            continue;
        }
        // Impersonated: the adversary's shape replaces p's own broadcast.
        std::set<ProcessorId> receivers = materialized_;
        receivers.erase(p);
        auto it = decision.shapes.find(p);
        const NoEqShape shape = it == decision.shapes.end() ? NoEqShape::silent() : it->second;
        switch (shape.kind) {
        case NoEqShape::Kind::silent:
            break;
        case NoEqShape::Kind::uniform:
            for (ProcessorId q : receivers) deliveries[q].set_message(p, *shape.message);
            break;
        case NoEqShape::Kind::split:
            for (ProcessorId q : receivers) {
                if (shape.recipients.count(q))
                    deliveries[q].set_message(p, *shape.message);
                else
                    deliveries[q].set_lambda(p);
            }
            break;
        case NoEqShape::Kind::lambda_only:
            for (ProcessorId q : shape.recipients) deliveries[q].set_lambda(p);
            break;
        }
    }

    for (ProcessorId q : materialized_) {
        NoEqContext ctx{r, q, draw.leader_for(q)};
        std::optional<Payload> out = protocols_.at(q)->deliver(ctx, deliveries.at(q));
        if (out) {
            if (outputs_.count(q))
                throw EngineAbort(to_string(q) + " produced a second output in " + to_string(r));
            outputs_[q] = RecordedOutput{r, *out};
            if (record_trace_) {
                json rec{{"type", "output"},
                         {"round", r.index},
                         {"processor", q.value},
                         {"output", json::parse(payload_to_json(*out))}};
                trace_.append(rec.dump());
            }
        }
    }

    delivery_log_[r] = std::move(deliveries);
    ++completed_;
}

void NoEqEngine::run() {
    while (!finished()) run_round();
}

DeliveryCase classify_delivery_profile(const std::map<ProcessorId, NoEqDelivery>& deliveries,
                                       ProcessorId subject) {
    std::size_t receivers = 0, heard = 0, lambdas = 0;
    std::set<Payload> messages;
    for (const auto& [receiver, d] : deliveries) {
        if (receiver == subject) continue;
        ++receivers;
        if (!d.heard(subject)) continue;
        ++heard;
        if (d.is_lambda(subject))
            ++lambdas;
        else
            messages.insert(*d.message(subject));
    }
    if (heard == 0) return DeliveryCase::none_heard;
    if (messages.size() > 1) return DeliveryCase::invalid;
    if (heard == receivers) {
        if (lambdas == 0) return DeliveryCase::all_same;
        return DeliveryCase::message_or_lambda;
    }
    // Some receivers did not hear of the subject at all: only lambdas may
    // coexist with silence.
    if (messages.empty()) return DeliveryCase::lambda_or_silent;
    return DeliveryCase::invalid;
}

}  // namespace iiab
