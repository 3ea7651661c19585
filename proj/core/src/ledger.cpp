#include "iiab/ledger.hpp"

namespace iiab {

std::vector<InjectionViolation> validate_injection(const Ledger& ledger, Round round,
                                                   const std::set<ProcessorId>& impersonated,
                                                   const AdversaryDecision& decision) {
    std::vector<InjectionViolation> out;
    for (const auto& [owner, links] : decision.injections) {
        if (!impersonated.count(owner)) {
            for (const auto& [receiver, payloads] : links) {
                for (const Payload& p : payloads) {
                    (void)p;
                    out.push_back({owner, receiver,
                                   SignedMessage{owner, round, Payload{}},
                                   to_string(owner) + " is not impersonated this round"});
                }
            }
            continue;
        }
        for (const auto& [receiver, payloads] : links) {
            for (const Payload& p : payloads) {
                for_each_signed(p, [&](const SignedMessage& m) {
                    bool fresh_ok = impersonated.count(m.signer) > 0 && m.round == round;
                    bool replay_ok = ledger.sent_before(m, round);
                    if (!fresh_ok && !replay_ok) {
                        out.push_back({owner, receiver, m,
                                       "signed message neither freshly forgeable (" +
                                           to_string(m.signer) + "@" + to_string(m.round) +
                                           ") nor sent in a previous round"});
                    }
                });
            }
        }
    }
    return out;
}

}  // namespace iiab
