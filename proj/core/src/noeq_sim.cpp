#include "iiab/noeq_sim.hpp"

#include <nlohmann/json.hpp>

#include "iiab/json_io.hpp"

namespace iiab {

using nlohmann::json;

std::optional<Payload> SimulatedNoEqAdapter::on_receive(const ProtocolContext& ctx,
                                                        const ReceiveView& view) {
    if (!in_round_b_) {
        relay_.observe_round_a(view);
        leader_a_ = ctx.leader;
        in_round_b_ = true;
        return std::nullopt;
    }
    NoEqDelivery d = relay_.simulate_delivery(view);
    if (sink_) {
        for (ProcessorId subject : universe_) {
            json rec{{"type", "simulated_delivery"},
                     {"round", ctx.round.index},
                     {"noeq_round", noeq_round_},
                     {"receiver", ctx.self.value},
                     {"subject", subject.value}};
            if (!d.heard(subject)) {
                rec["outcome"] = "none";
            } else if (d.is_lambda(subject)) {
                rec["outcome"] = "lambda";
            } else {
                rec["outcome"] = "msg";
                rec["payload"] = json::parse(payload_to_json(*d.message(subject)));
            }
            sink_->append(rec.dump());
        }
    }
    last_delivery_ = d;
    NoEqContext nctx{Round{noeq_round_}, ctx.self, leader_a_};
    in_round_b_ = false;
    ++noeq_round_;
    return inner_->deliver(nctx, d);
}

}  // namespace iiab
