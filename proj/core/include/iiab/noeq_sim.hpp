#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "iiab/noeq.hpp"
#include "iiab/protocol.hpp"
#include "iiab/trace.hpp"

namespace iiab {

// Per-processor state of the two-round simulation of one no-equivocation
// round (round A broadcasts <p,rA,m>, round B forwards claims, end of
// round B simulates deliveries). Round fields carry global IIAB rounds so
// the ledger's replay rule stays sound across composed phases.
class ClaimRelay {
public:
    static Payload wrap_broadcast(ProcessorId self, Round g, Payload m) {
        return sign(self, g, std::move(m));
    }

    // Round-A receive: remember, per sender, the signed messages
    // <sender, g_a, m> received directly on that sender's link.
    void observe_round_a(const ReceiveView& view) {
        forwards_.clear();
        round_a_ = view.round();
        for (const auto& [sender, payloads] : view.links()) {
            for (const Payload& p : payloads) {
                const SignedMessage* m = p.as_signed();
                if (m && m->signer == sender && m->round == view.round()) forwards_.push_back(p);
            }
        }
    }

    // Round-B send: a claim <self, g_b, <q, g_a, m>> per remembered message.
    std::vector<Payload> claims(ProcessorId self, Round g_b) const {
        std::vector<Payload> out;
        out.reserve(forwards_.size());
        for (const Payload& f : forwards_) out.push_back(sign(self, g_b, f));
        return out;
    }

    // End of round B: for each subject with at least one claim received,
    // deliver m iff the m-claimants form a strict majority of the senders
    // heard of in round B and no claim asserts a different message for the
    // subject; otherwise deliver lambda. Subjects without claims are absent.
    NoEqDelivery simulate_delivery(const ReceiveView& view_b) const {
        const Round g_b = view_b.round();
        const Round g_a = round_a_;
        std::size_t heard_b = view_b.heard_of().size();
        // subject -> message -> claimant set
        std::map<ProcessorId, std::map<Payload, std::set<ProcessorId>>> claims;
        for (const auto& [sender, payloads] : view_b.links()) {
            for (const Payload& p : payloads) {
                const SignedMessage* outer = p.as_signed();
                if (!outer || outer->signer != sender || outer->round != g_b) continue;
                const SignedMessage* inner = outer->content.as_signed();
                if (!inner || inner->round != g_a) continue;
                claims[inner->signer][inner->content].insert(sender);
            }
        }
        NoEqDelivery d;
        for (const auto& [subject, by_message] : claims) {
            if (by_message.size() == 1) {
                const auto& [m, claimants] = *by_message.begin();
                if (2 * claimants.size() > heard_b) {
                    d.set_message(subject, m);
                    continue;
                }
            }
            d.set_lambda(subject);
        }
        return d;
    }

    Round round_a() const { return round_a_; }

private:
    std::vector<Payload> forwards_;
    Round round_a_{1};
};

// Runs a NoEqProtocol on the raw IIAB engine, two IIAB rounds per no-eq
// round. Exposes the same contract as the native engine, so protocol code
// is written once and executed on either backend. The leader reported for
// a simulated no-eq round is the draw of its first (round-A) IIAB round:
// on oracle success that leader is well-behaved in round A, which is what
// makes its broadcast arrive everywhere as case 2.
class SimulatedNoEqAdapter final : public Protocol {
public:
    // `sink` (with `universe`, the materialized set) enables per-subject
    // simulated_delivery trace records; clones share the sink, so only wire
    // one up for straight-line traced runs.
    SimulatedNoEqAdapter(std::unique_ptr<NoEqProtocol> inner, std::uint32_t first_noeq_round = 1,
                         Trace* sink = nullptr, std::set<ProcessorId> universe = {})
        : inner_(std::move(inner)),
          noeq_round_(first_noeq_round),
          sink_(sink),
          universe_(std::move(universe)) {}

    std::vector<Payload> on_send(const ProtocolContext& ctx) const override {
        if (!in_round_b_) {
            NoEqContext nctx{Round{noeq_round_}, ctx.self, ctx.leader};
            return {ClaimRelay::wrap_broadcast(ctx.self, ctx.round, inner_->broadcast(nctx))};
        }
        return relay_.claims(ctx.self, ctx.round);
    }

    std::optional<Payload> on_receive(const ProtocolContext& ctx, const ReceiveView& view) override;

    std::unique_ptr<Protocol> clone() const override {
        auto copy =
            std::make_unique<SimulatedNoEqAdapter>(inner_->clone(), noeq_round_, sink_, universe_);
        copy->in_round_b_ = in_round_b_;
        copy->leader_a_ = leader_a_;
        copy->relay_ = relay_;
        copy->last_delivery_ = last_delivery_;
        return copy;
    }

    const NoEqProtocol& inner() const { return *inner_; }
    NoEqProtocol& inner() { return *inner_; }
    // Delivery computed at the most recent completed no-eq round.
    const std::optional<NoEqDelivery>& last_delivery() const { return last_delivery_; }
    bool mid_round() const { return in_round_b_; }

private:
    std::unique_ptr<NoEqProtocol> inner_;
    std::uint32_t noeq_round_;
    Trace* sink_;
    std::set<ProcessorId> universe_;
    bool in_round_b_ = false;
    ProcessorId leader_a_{};
    ClaimRelay relay_;
    std::optional<NoEqDelivery> last_delivery_;
};

}  // namespace iiab
