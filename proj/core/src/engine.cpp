#include "iiab/engine.hpp"

#include <nlohmann/json.hpp>

#include <functional>

#include "iiab/base64.hpp"
#include "iiab/json_io.hpp"

namespace iiab {

using nlohmann::json;

namespace {

json payload_json(const Payload& p) { return json::parse(payload_to_json(p)); }

json leaders_json(const OracleDraw& draw) {
    json obj = json::object();
    for (const auto& [p, l] : draw.leaders) obj[std::to_string(p.value)] = l.value;
    return obj;
}

}  // namespace

OracleDraw draw_leaders(std::mt19937_64& rng, Round r, const ParticipationSchedule& schedule,
                        OraclePolicy& policy, const std::set<ProcessorId>& materialized) {
    OracleDraw draw;
    draw.round = r;
    draw.success = (rng() & 1) != 0;
    const std::set<ProcessorId> well_behaved = schedule.at(r).well_behaved();
    if (draw.success) {
        ProcessorId leader = policy.pick_leader_on_success(r, well_behaved);
        if (!well_behaved.count(leader))
            throw EngineAbort("oracle policy picked " + to_string(leader) +
                              " outside W in " + to_string(r));
        for (ProcessorId p : materialized) draw.leaders[p] = leader;
    } else {
        draw.leaders = policy.assign_leaders_on_failure(r, materialized);
    }
    return draw;
}

Engine::Engine(std::shared_ptr<const ParticipationSchedule> schedule,
               std::map<ProcessorId, std::unique_ptr<Protocol>> protocols,
               std::shared_ptr<AdversaryStrategy> adversary, std::shared_ptr<OraclePolicy> oracle,
               std::uint64_t seed, EngineOptions options)
    : schedule_(std::move(schedule)),
      protocols_(std::move(protocols)),
      adversary_(std::move(adversary)),
      oracle_(std::move(oracle)),
      options_(options),
      rng_(seed) {
    auto violations = validate_schedule(*schedule_);
    if (!violations.empty())
        throw EngineAbort("invalid schedule: " + violations.front().description + " in " +
                          to_string(violations.front().round));
    for (const auto& [p, _] : protocols_) materialized_.insert(p);
    for (ProcessorId p : schedule_->scheduled_processors()) {
        if (!materialized_.count(p))
            throw EngineAbort("scheduled processor " + to_string(p) + " has no protocol");
    }
}

Engine::Engine(const Engine& other)
    : schedule_(other.schedule_),
      adversary_(other.adversary_),
      oracle_(other.oracle_),
      options_(other.options_),
      rng_(other.rng_),
      materialized_(other.materialized_),
      completed_(other.completed_),
      ledger_(other.ledger_),
      received_(other.received_),
      outputs_(other.outputs_),
      draws_(other.draws_),
      history_(other.history_),
      trace_(other.trace_) {
    for (const auto& [p, proto] : other.protocols_) protocols_.emplace(p, proto->clone());
}

void Engine::validate_honest_send(ProcessorId sender, Round r, const Payload& p) const {
    for_each_signed(p, [&](const SignedMessage& m) {
        if (m.signer == sender && m.round == r) return;
        auto it = received_.find(sender);
        if (m.round < r && it != received_.end() && it->second.sent_before(m, r)) return;
        throw EngineAbort("well-behaved " + to_string(sender) + " sent unjustified " +
                          to_string(m.signer) + "@" + to_string(m.round) + " in " + to_string(r));
    });
}

void Engine::run_round() {
    if (finished()) throw EngineAbort("run_round past schedule horizon");
    const Round r{completed_ + 1};
    const RoundParticipation& rp = schedule_->at(r);
    const std::set<ProcessorId> well_behaved = rp.well_behaved();

    // Leader oracle. Drawn every round so rng consumption is uniform across
    // protocols; protocols that ignore the oracle are unaffected.
    OracleDraw draw = draw_leaders(rng_, r, *schedule_, *oracle_, materialized_);
    draws_[r] = draw;
    if (options_.record_trace) {
        json rec{{"type", "oracle"},
                 {"round", r.index},
                 {"success", draw.success},
                 {"leaders", leaders_json(draw)}};
        trace_.append(rec.dump());
    }

    // Send phase: well-behaved online sends are broadcast; impersonated
    // processors' outgoing messages are discarded.
    std::map<ProcessorId, std::vector<Payload>> honest_sends;
    for (ProcessorId p : rp.online) {
        if (!well_behaved.count(p)) continue;
        ProtocolContext ctx{r, p, draw.leader_for(p)};
        std::vector<Payload> sends = protocols_.at(p)->on_send(ctx);
        for (const Payload& m : sends) validate_honest_send(p, r, m);
        if (!sends.empty()) honest_sends.emplace(p, std::move(sends));
    }

    LinkMap inbox;  // receiver -> sender -> payload set
    for (const auto& [sender, payloads] : honest_sends)
        for (ProcessorId q : materialized_)
            inbox[q][sender].insert(payloads.begin(), payloads.end());

    // Adversary move, validated fail-stop.
    static const std::map<ProcessorId, std::vector<Payload>> kNoSends;
    RoundObservation obs{r,       *schedule_,
                         materialized_, options_.rushing ? honest_sends : kNoSends,
                         ledger_, draw,
                         history_};
    AdversaryDecision decision = adversary_ ? adversary_->decide(obs) : AdversaryDecision{};
    auto violations = validate_injection(ledger_, r, rp.impersonated, decision);
    if (!violations.empty()) {
        const InjectionViolation& v = violations.front();
        throw EngineAbort("invalid injection in " + to_string(r) + " on link (" +
                          to_string(v.impersonated) + "," + to_string(v.receiver) +
                          "): " + v.reason + " [" + std::to_string(violations.size()) +
                          " violation(s)]");
    }
    for (const auto& [owner, links] : decision.injections) {
        for (const auto& [receiver, payloads] : links) {
            if (!materialized_.count(receiver))
                throw EngineAbort("injection targets unknown processor " + to_string(receiver));
            inbox[receiver][owner].insert(payloads.begin(), payloads.end());
        }
    }

    // Ledger and per-processor received bookkeeping cover every signed
    // message appearing on any link this round, at any nesting depth.
    for (const auto& [receiver, links] : inbox) {
        for (const auto& [sender, payloads] : links) {
            for (const Payload& m : payloads) {
                ledger_.record_all(m, r);
                received_[receiver].record_all(m, r);
            }
        }
    }

    if (options_.record_trace) {
        // One record per (round, link, message), ordered by (from, to).
        std::map<std::pair<ProcessorId, ProcessorId>, const std::set<Payload>*> flat;
        for (const auto& [receiver, links] : inbox)
            for (const auto& [sender, payloads] : links)
                flat[{sender, receiver}] = &payloads;
        for (const auto& [link, payloads] : flat) {
            for (const Payload& m : *payloads) {
                json rec{{"type", "message"},
                         {"round", r.index},
                         {"from", link.first.value},
                         {"to", link.second.value},
                         {"payload", payload_json(m)}};
                trace_.append(rec.dump());
            }
        }
    }

    // Receive phase: every materialized processor, online or not, receives
    // all messages addressed to it and may produce an irrevocable output.
    for (ProcessorId q : materialized_) {
        ReceiveView::LinkMap links;
        auto it = inbox.find(q);
        if (it != inbox.end()) links = it->second;
        ReceiveView view = ReceiveView::iiab(r, q, std::move(links));
        ProtocolContext ctx{r, q, draw.leader_for(q)};
        std::optional<Payload> out = protocols_.at(q)->on_receive(ctx, view);
        if (out) {
            if (outputs_.count(q))
                throw EngineAbort(to_string(q) + " produced a second output in " + to_string(r));
            outputs_[q] = RecordedOutput{r, *out};
            if (options_.record_trace) {
                json rec{{"type", "output"},
                         {"round", r.index},
                         {"processor", q.value},
                         {"output", payload_json(*out)}};
                trace_.append(rec.dump());
                if (options_.decision_outputs && out->as_value()) {
                    json dec{{"type", "decision"},
                             {"round", r.index},
                             {"processor", q.value},
                             {"decision", base64_encode(out->as_value()->bytes)}};
                    trace_.append(dec.dump());
                }
            }
        }
    }

    if (options_.keep_history) history_[r] = std::move(inbox);
    ++completed_;
}

void Engine::run(const std::function<bool(const Engine&)>& stop) {
    while (!finished()) {
        run_round();
        if (stop && stop(*this)) return;
    }
}

ReceiveView Engine::view_of(Round r, ProcessorId receiver) const {
    auto it = history_.find(r);
    if (it == history_.end()) throw EngineAbort("view_of: no history for " + to_string(r));
    ReceiveView::LinkMap links;
    auto jt = it->second.find(receiver);
    if (jt != it->second.end()) links = jt->second;
    return ReceiveView::iiab(r, receiver, std::move(links));
}

}  // namespace iiab
