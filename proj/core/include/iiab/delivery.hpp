#pragma once

#include <map>
#include <optional>
#include <set>

#include "iiab/payload.hpp"

namespace iiab {

// What one processor received in one round of the no-equivocation model:
// per sender, either a message or the failure notification lambda. A sender
// absent from the map was not heard of at all. Lambda is a sentinel disjoint
// from every payload, represented as an empty optional.
class NoEqDelivery {
public:
    void set_message(ProcessorId sender, Payload m) { entries_[sender] = std::move(m); }
    void set_lambda(ProcessorId sender) { entries_[sender] = std::nullopt; }

    bool heard(ProcessorId sender) const { return entries_.count(sender) > 0; }
    bool is_lambda(ProcessorId sender) const {
        auto it = entries_.find(sender);
        return it != entries_.end() && !it->second.has_value();
    }
    // Null when the sender was not heard of or delivered lambda.
    const Payload* message(ProcessorId sender) const {
        auto it = entries_.find(sender);
        if (it == entries_.end() || !it->second.has_value()) return nullptr;
        return &*it->second;
    }

    std::set<ProcessorId> heard_of() const {
        std::set<ProcessorId> s;
        for (const auto& [p, _] : entries_) s.insert(p);
        return s;
    }

    const std::map<ProcessorId, std::optional<Payload>>& entries() const { return entries_; }

    bool operator==(const NoEqDelivery&) const = default;

private:
    std::map<ProcessorId, std::optional<Payload>> entries_;
};

// What one processor received in one round. IIAB form: per sender, the set
// of messages received on that link. No-eq form: a NoEqDelivery. heard_of()
// is the set of senders with a nonempty entry; strict-majority queries are
// evaluated against heard_of only.
class ReceiveView {
public:
    using LinkMap = std::map<ProcessorId, std::set<Payload>>;

    static ReceiveView iiab(Round r, ProcessorId receiver, LinkMap links) {
        ReceiveView v;
        v.round_ = r;
        v.receiver_ = receiver;
        v.links_ = std::move(links);
        // Drop empty link entries: an empty set means "not heard of".
        for (auto it = v.links_.begin(); it != v.links_.end();)
            it = it->second.empty() ? v.links_.erase(it) : std::next(it);
        return v;
    }

    static ReceiveView no_eq(Round r, ProcessorId receiver, NoEqDelivery d) {
        ReceiveView v;
        v.round_ = r;
        v.receiver_ = receiver;
        v.noeq_ = std::move(d);
        return v;
    }

    Round round() const { return round_; }
    ProcessorId receiver() const { return receiver_; }
    bool is_noeq() const { return noeq_.has_value(); }
    const NoEqDelivery& noeq() const { return *noeq_; }
    const LinkMap& links() const { return links_; }

    std::set<ProcessorId> heard_of() const {
        if (noeq_) return noeq_->heard_of();
        std::set<ProcessorId> s;
        for (const auto& [p, msgs] : links_)
            if (!msgs.empty()) s.insert(p);
        return s;
    }

    // True iff `sender` delivered exactly `m` this round (among possibly
    // several messages in the IIAB form). Lambda never matches.
    bool delivered(ProcessorId sender, const Payload& m) const {
        if (noeq_) {
            const Payload* got = noeq_->message(sender);
            return got && *got == m;
        }
        auto it = links_.find(sender);
        return it != links_.end() && it->second.count(m) > 0;
    }

    // Number of senders that delivered exactly `m`.
    std::size_t count_delivering(const Payload& m) const {
        std::size_t n = 0;
        if (noeq_) {
            for (const auto& [p, e] : noeq_->entries())
                if (e.has_value() && *e == m) ++n;
        } else {
            for (const auto& [p, msgs] : links_)
                if (msgs.count(m)) ++n;
        }
        return n;
    }

private:
    Round round_{1};
    ProcessorId receiver_{};
    LinkMap links_;
    std::optional<NoEqDelivery> noeq_;
};

// True iff strictly more than half of the senders the view heard of
// delivered exactly `target`. Lambda entries count toward the denominator
// but never toward any numerator. Throws std::invalid_argument when the
// view heard of nobody (unreachable in engine-produced views since W_r is
// never empty; reachable on hand-built views).
bool strict_majority(const ReceiveView& view, const Payload& target);

// The value received from at least one sender and from strictly more
// senders than every other value; nothing on ties or when no bare value was
// delivered. Non-value payloads and lambda are ignored.
std::optional<Value> plurality_unique(const ReceiveView& view);

}  // namespace iiab
