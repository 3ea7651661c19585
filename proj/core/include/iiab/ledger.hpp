#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "iiab/payload.hpp"

namespace iiab {

// Record of every signed message that has appeared on any link, at any
// nesting depth, tagged with the earliest round it appeared. Monotone:
// entries are only added. This is what enforces the replay-only forgery
// rule: the adversary may send <p,r',m> only if it impersonates p with
// r' = the current round, or the message already appears here with an
// earlier round.
class Ledger {
public:
    // Records `msg` (and nothing else; callers walk nested occurrences) as
    // appearing in `r` unless an earlier round is already recorded.
    void record(const SignedMessage& msg, Round r) {
        auto [it, inserted] = earliest_.emplace(msg, r);
        if (!inserted && r < it->second) it->second = r;
    }

    void record_all(const Payload& p, Round r) {
        for_each_signed(p, [&](const SignedMessage& m) { record(m, r); });
    }

    // Earliest round the message appeared on a link, if ever.
    const Round* earliest(const SignedMessage& msg) const {
        auto it = earliest_.find(msg);
        return it == earliest_.end() ? nullptr : &it->second;
    }

    bool sent_before(const SignedMessage& msg, Round r) const {
        const Round* e = earliest(msg);
        return e && *e < r;
    }

    std::size_t size() const { return earliest_.size(); }

    const std::map<SignedMessage, Round>& entries() const { return earliest_; }

private:
    std::map<SignedMessage, Round> earliest_;
};

struct InjectionViolation {
    ProcessorId impersonated;  // link owner the message was injected for
    ProcessorId receiver;
    SignedMessage message;  // the offending (possibly nested) signed message
    std::string reason;
};

// Per impersonated processor, per outgoing link, the finite set of messages
// the adversary injects this round.
struct AdversaryDecision {
    std::map<ProcessorId, std::map<ProcessorId, std::vector<Payload>>> injections;

    bool empty() const { return injections.empty(); }
};

// Checks every signed message occurring at any nesting depth in any
// injected payload: valid iff (signer impersonated this round and the
// message round is the current round) or the ledger has it with an earlier
// round. Also rejects injections on behalf of processors outside
// `impersonated`. Violations are data; the engine aborts on any.
std::vector<InjectionViolation> validate_injection(const Ledger& ledger, Round round,
                                                   const std::set<ProcessorId>& impersonated,
                                                   const AdversaryDecision& decision);

}  // namespace iiab
