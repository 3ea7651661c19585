#include "iiab/protocols.hpp"

#include <map>

namespace iiab {

namespace {

const char* kProposeCommitTag = "propose-commit";
const char* kNoCommitTag = "no-commit";
const char* kCommitTag = "commit";
const char* kAdoptTag = "adopt";

Payload tagged(const char* tag, const Value& v) {
    return Payload{std::vector<Payload>{value_payload(tag), Payload{v}}};
}

std::optional<Value> untag(const char* tag, const Payload& p) {
    const auto* l = p.as_list();
    if (!l || l->size() != 2) return std::nullopt;
    const Value* t = (*l)[0].as_value();
    const Value* v = (*l)[1].as_value();
    if (!t || !v || t->as_string() != tag) return std::nullopt;
    return *v;
}

// Senders per exact payload in a no-eq round.
std::map<Payload, std::size_t> payload_counts(const NoEqDelivery& d) {
    std::map<Payload, std::size_t> counts;
    for (const auto& [p, e] : d.entries())
        if (e.has_value()) ++counts[*e];
    return counts;
}

}  // namespace

Payload encode_propose_commit(const Value& v) { return tagged(kProposeCommitTag, v); }
Payload encode_no_commit() { return value_payload(kNoCommitTag); }
std::optional<Value> decode_propose_commit(const Payload& p) { return untag(kProposeCommitTag, p); }
bool is_no_commit(const Payload& p) {
    const Value* v = p.as_value();
    return v && v->as_string() == kNoCommitTag;
}

Payload encode_commit_adopt(const CommitAdoptOutput& o) {
    return tagged(o.kind == CommitAdoptOutput::Kind::commit ? kCommitTag : kAdoptTag, o.value);
}

std::optional<CommitAdoptOutput> decode_commit_adopt(const Payload& p) {
    if (auto v = untag(kCommitTag, p))
        return CommitAdoptOutput{CommitAdoptOutput::Kind::commit, *v};
    if (auto v = untag(kAdoptTag, p))
        return CommitAdoptOutput{CommitAdoptOutput::Kind::adopt, *v};
    return std::nullopt;
}

// --------------------------------------------------------------------------
// Commit-adopt
// --------------------------------------------------------------------------

Payload CommitAdoptProtocol::broadcast(const NoEqContext&) const {
    if (deliveries_ == 0) return Payload{input_};
    return proposal_ ? encode_propose_commit(*proposal_) : encode_no_commit();
}

std::optional<Payload> CommitAdoptProtocol::deliver(const NoEqContext&, const NoEqDelivery& d) {
    const std::size_t heard = d.heard_of().size();
    if (deliveries_ == 0) {
        // A value heard from a strict majority (at most one payload can
        // qualify, since each sender delivers at most one message).
        for (const auto& [m, n] : payload_counts(d)) {
            if (2 * n > heard && m.as_value()) {
                proposal_ = *m.as_value();
                break;
            }
        }
        ++deliveries_;
        return std::nullopt;
    }

    // Output rule, end of round 2.
    std::optional<CommitAdoptOutput> out;
    std::map<Value, std::size_t> pc_counts;
    for (const auto& [m, n] : payload_counts(d)) {
        if (auto v = decode_propose_commit(m)) {
            pc_counts[*v] += n;
            if (2 * n > heard) out = CommitAdoptOutput{CommitAdoptOutput::Kind::commit, *v};
        }
    }
    if (!out) {
        // Unique plurality among the propose-commit values received; a
        // committing processor's value beats every rival everywhere, which
        // is what makes this case agree with case (i).
        const Value* best = nullptr;
        std::size_t best_n = 0;
        bool tie = false;
        for (const auto& [v, n] : pc_counts) {
            if (n > best_n) {
                best = &v;
                best_n = n;
                tie = false;
            } else if (n == best_n && best_n > 0) {
                tie = true;
            }
        }
        if (best && !tie)
            out = CommitAdoptOutput{CommitAdoptOutput::Kind::adopt, *best};
        else
            out = CommitAdoptOutput{CommitAdoptOutput::Kind::adopt, input_};
    }
    ++deliveries_;
    result_ = out;
    return encode_commit_adopt(*out);
}

// --------------------------------------------------------------------------
// Probabilistic conciliator
// --------------------------------------------------------------------------

Payload ProbaConciliatorProtocol::broadcast(const NoEqContext& ctx) const {
    if (deliveries_ < 2) return ca_.broadcast(ctx);
    return encode_commit_adopt(*ca_.result());
}

std::optional<Payload> ProbaConciliatorProtocol::deliver(const NoEqContext& ctx,
                                                         const NoEqDelivery& d) {
    if (deliveries_ < 2) {
        ca_.deliver(ctx, d);
        ++deliveries_;
        return std::nullopt;
    }

    const std::size_t heard = d.heard_of().size();
    std::optional<Value> out;
    for (const auto& [m, n] : payload_counts(d)) {
        if (2 * n > heard) {
            if (auto o = decode_commit_adopt(m);
                o && o->kind == CommitAdoptOutput::Kind::commit)
                out = o->value;
            break;  // at most one payload can hold a strict majority
        }
    }
    if (!out) {
        if (const Payload* from_leader = d.message(ctx.leader)) {
            if (auto o = decode_commit_adopt(*from_leader)) out = o->value;
        }
    }
    if (!out) out = input_;
    ++deliveries_;
    result_ = out;
    return Payload{*out};
}

// --------------------------------------------------------------------------
// Deterministic conciliator
// --------------------------------------------------------------------------

namespace {

struct ParsedChain {
    ProcessorId origin;
    Value value;
};

// Accepts exactly the round-r relay form: nested signed messages with
// consecutive rounds from `outer` down to `first`, pairwise-distinct
// signers, and a bare value innermost.
std::optional<ParsedChain> parse_chain(const Payload& p, Round outer, Round first) {
    if (outer < first) return std::nullopt;
    std::set<ProcessorId> seen;
    const Payload* cur = &p;
    ProcessorId origin{};
    for (std::uint32_t r = outer.index; r >= first.index; --r) {
        const SignedMessage* m = cur->as_signed();
        if (!m || m->round.index != r || seen.count(m->signer)) return std::nullopt;
        seen.insert(m->signer);
        origin = m->signer;
        cur = &m->content;
    }
    const Value* v = cur->as_value();
    if (!v) return std::nullopt;
    return ParsedChain{origin, *v};
}

}  // namespace

Value DetConciliatorProtocol::candidate() const {
    if (e_.empty())
        throw EngineAbort("deterministic conciliator has empty e at candidate time");
    std::set<ProcessorId> origins;
    std::map<Value, std::set<ProcessorId>> support;
    for (const auto& [origin, v] : e_) {
        origins.insert(origin);
        support[v].insert(origin);
    }
    for (const auto& [v, supp] : support) {
        if (2 * supp.size() > origins.size()) return v;  // smallest qualifying value
    }
    return support.begin()->first;  // smallest value appearing in e
}

std::vector<Payload> DetConciliatorProtocol::on_send(const ProtocolContext& ctx) const {
    const std::uint32_t lr = local_round(ctx.round);
    if (lr == 1) return {sign(ctx.self, ctx.round, Payload{input_})};
    if (lr <= n_) {
        std::vector<Payload> out;
        out.reserve(relay_.size());
        for (const Payload& chain : relay_) out.push_back(sign(ctx.self, ctx.round, chain));
        return out;
    }
    if (lr == n_ + 1) return {Payload{candidate()}};
    throw EngineAbort("deterministic conciliator driven outside its window");
}

std::optional<Payload> DetConciliatorProtocol::on_receive(const ProtocolContext& ctx,
                                                          const ReceiveView& view) {
    const std::uint32_t lr = local_round(ctx.round);
    if (lr <= n_) {
        std::vector<Payload> next_relay;
        for (const auto& [sender, payloads] : view.links()) {
            (void)sender;  // chains authenticate via signatures, not links
            for (const Payload& p : payloads) {
                if (auto chain = parse_chain(p, ctx.round, start_)) {
                    e_.emplace(chain->origin, chain->value);
                    if (lr < n_) next_relay.push_back(p);
                }
            }
        }
        relay_ = std::move(next_relay);
        return std::nullopt;
    }
    if (lr != n_ + 1) throw EngineAbort("deterministic conciliator driven outside its window");

    // Final round: adopt a strict-majority value if one exists, else the
    // own candidate.
    const std::size_t heard = view.heard_of().size();
    std::map<Value, std::size_t> counts;
    for (const auto& [sender, payloads] : view.links()) {
        std::set<Value> seen;
        for (const Payload& p : payloads)
            if (const Value* v = p.as_value()) seen.insert(*v);
        for (const Value& v : seen) ++counts[v];
    }
    std::optional<Value> out;
    for (const auto& [v, n] : counts) {
        if (2 * n > heard) {
            out = v;  // smallest qualifying value under hand-built views
            break;
        }
    }
    if (!out) out = candidate();
    result_ = out;
    return Payload{*out};
}

// --------------------------------------------------------------------------
// Generic consensus composition
// --------------------------------------------------------------------------

ConsensusProtocol::ConsensusProtocol(ConsensusKind kind, ProcessorId self, Value input)
    : kind_(kind), self_(self), value_(std::move(input)) {
    if (kind_ == ConsensusKind::probabilistic) {
        layout_ = std::make_unique<ProbaLayout>();
        noeq_phase_ = std::make_unique<SimulatedNoEqAdapter>(
            std::make_unique<ProbaConciliatorProtocol>(value_), 1);
    } else {
        layout_ = std::make_unique<DetLayout>();
        det_phase_ = std::make_unique<DetConciliatorProtocol>(2, Round{1}, value_);
    }
}

ConsensusProtocol::ConsensusProtocol(const ConsensusProtocol& other)
    : kind_(other.kind_),
      self_(other.self_),
      value_(other.value_),
      decision_(other.decision_),
      decision_reported_(other.decision_reported_) {
    layout_ = kind_ == ConsensusKind::probabilistic
                  ? std::unique_ptr<PhaseLayout>(std::make_unique<ProbaLayout>())
                  : std::unique_ptr<PhaseLayout>(std::make_unique<DetLayout>());
    if (other.noeq_phase_) {
        auto cloned = other.noeq_phase_->clone();
        noeq_phase_.reset(static_cast<SimulatedNoEqAdapter*>(cloned.release()));
    }
    if (other.det_phase_) {
        auto cloned = other.det_phase_->clone();
        det_phase_.reset(static_cast<DetConciliatorProtocol*>(cloned.release()));
    }
}

bool ConsensusProtocol::in_conciliator(std::uint32_t g, std::uint32_t n) const {
    return g < layout_->commit_adopt_start(n);
}

std::vector<Payload> ConsensusProtocol::on_send(const ProtocolContext& ctx) const {
    const std::uint32_t g = ctx.round.index;
    const std::uint32_t n = layout_->segment_of(g);
    if (kind_ == ConsensusKind::deterministic && in_conciliator(g, n))
        return det_phase_->on_send(ctx);
    return noeq_phase_->on_send(ctx);
}

std::optional<Payload> ConsensusProtocol::on_receive(const ProtocolContext& ctx,
                                                     const ReceiveView& view) {
    const std::uint32_t g = ctx.round.index;
    const std::uint32_t n = layout_->segment_of(g);
    const bool conciliating = in_conciliator(g, n);

    if (kind_ == ConsensusKind::deterministic && conciliating)
        det_phase_->on_receive(ctx, view);
    else
        noeq_phase_->on_receive(ctx, view);

    if (conciliating && g + 1 == layout_->commit_adopt_start(n)) {
        // Conciliator done; its output feeds CA[n].
        if (kind_ == ConsensusKind::deterministic) {
            value_ = *det_phase_->result();
            det_phase_.reset();
        } else {
            const auto& conc = static_cast<const ProbaConciliatorProtocol&>(noeq_phase_->inner());
            value_ = *conc.result();
        }
        // Proba segments tile the whole run with no-eq rounds, so CA keeps
        // the global numbering; the deterministic composition interleaves
        // native rounds, so its CA instances number locally.
        const std::uint32_t first_noeq = kind_ == ConsensusKind::probabilistic
                                             ? (layout_->commit_adopt_start(n) + 1) / 2
                                             : 1;
        noeq_phase_ = std::make_unique<SimulatedNoEqAdapter>(
            std::make_unique<CommitAdoptProtocol>(value_), first_noeq);
        return std::nullopt;
    }

    if (!conciliating && g == layout_->segment_end(n)) {
        // CA[n] done: a commit decides; the output value (committed or
        // adopted) feeds C[n+1] either way.
        const auto& ca = static_cast<const CommitAdoptProtocol&>(noeq_phase_->inner());
        const CommitAdoptOutput out = *ca.result();
        value_ = out.value;
        if (out.kind == CommitAdoptOutput::Kind::commit && !decision_) decision_ = out.value;

        if (kind_ == ConsensusKind::deterministic) {
            noeq_phase_.reset();
            det_phase_ = std::make_unique<DetConciliatorProtocol>(
                1u << (n + 1), Round{layout_->conciliator_start(n + 1)}, value_);
        } else {
            noeq_phase_ = std::make_unique<SimulatedNoEqAdapter>(
                std::make_unique<ProbaConciliatorProtocol>(value_),
                (layout_->conciliator_start(n + 1) + 1) / 2);
        }
        if (decision_ && !decision_reported_) {
            decision_reported_ = true;
            return Payload{*decision_};
        }
    }
    return std::nullopt;
}

}  // namespace iiab
