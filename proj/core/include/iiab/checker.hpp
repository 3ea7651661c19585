#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iiab/engine.hpp"
#include "iiab/noeq.hpp"
#include "iiab/protocols.hpp"

namespace iiab {

// Raised when an enumeration request exceeds the tractability envelope.
// The message carries the size estimate.
struct EnvelopeExceeded : std::runtime_error {
    explicit EnvelopeExceeded(const std::string& what) : std::runtime_error(what) {}
};

// --------------------------------------------------------------------------
// No-equivocation behavior enumeration
// --------------------------------------------------------------------------

// All semantically distinct shapes one impersonated sender can play toward
// `receivers` with messages drawn from `messages`, each delivery pattern
// exactly once: silent; lambda_only(L) for nonempty L; uniform(m);
// split(m, S) for proper nonempty S.
std::vector<NoEqShape> enumerate_shapes(const std::set<ProcessorId>& receivers,
                                        const std::vector<Payload>& messages);

// Closed form for the count above: 2^R * (1 + u) - u.
std::uint64_t shape_count_closed_form(std::size_t n_receivers, std::size_t n_messages);

// A complete adversary behavior: one shape per (round, impersonated
// processor).
using NoEqBehavior = std::map<Round, NoEqAdversaryDecision>;

struct NoEqEnumeration {
    ParticipationSchedule schedule;
    std::set<ProcessorId> universe;
    // Per round (index 0 = round 1): the candidate message pool.
    std::vector<std::vector<Payload>> message_pool;
};

std::uint64_t noeq_behavior_count(const NoEqEnumeration& inst);

// Yields every behavior exactly once. Refuses oversized instances.
void enumerate_noeq_behaviors(const NoEqEnumeration& inst,
                              const std::function<void(const NoEqBehavior&)>& fn);

// --------------------------------------------------------------------------
// Property checks (Lemma 1, Theorems 2 and 3 of the no-eq round structure)
// --------------------------------------------------------------------------

// Lemma: with P_m the senders delivering m to p, P_m lies inside
// H_p ∩ H_p', and if P_m is a strict majority of H_p it is a strict
// majority of H_p ∩ H_p'. Only sound on model-valid views.
bool check_lemma1(const NoEqDelivery& view_p, const NoEqDelivery& view_p2, const Payload& m);

// At most one message value attains a strict majority anywhere this round.
bool check_thm2(const std::map<ProcessorId, NoEqDelivery>& views);

enum class Thm3Verdict { holds, violated, not_applicable };

// If some processor received m1 from a strict majority and no well-behaved
// processor broadcast m2, every processor receives m2 from strictly fewer
// senders than m1. Vacuous instances report not_applicable, never success.
Thm3Verdict check_thm3(const std::map<ProcessorId, NoEqDelivery>& views,
                       const std::set<Payload>& honest_broadcasts, const Payload& m1,
                       const Payload& m2);

// --------------------------------------------------------------------------
// Exhaustive task checks
// --------------------------------------------------------------------------

struct CheckViolation {
    std::string property;
    std::string behavior;  // replayable behavior script, JSON
    std::string witness;
};

struct CheckReport {
    std::uint64_t behaviors_checked = 0;
    std::map<std::string, std::uint64_t> counters;
    std::vector<std::string> assumptions;
    std::vector<CheckViolation> violations;

    bool ok() const { return violations.empty(); }
    void merge(const CheckReport& other);
    std::string to_json() const;
};

// IIAB behavior scripts (for the IIAB-side checks): concrete injections per
// round, replayable through ScriptedAdversary.
std::string iiab_script_to_json(const std::map<Round, AdversaryDecision>& script);
std::map<Round, AdversaryDecision> iiab_script_from_json(const std::string& text);
std::string noeq_behavior_to_json(const NoEqBehavior& behavior);
NoEqBehavior noeq_behavior_from_json(const std::string& text);

// Commit-adopt under every no-eq adversary behavior: every processor
// outputs commit/adopt; commit(v) anywhere forces {commit(v), adopt(v)}
// everywhere; unanimous input v forces commit(v) everywhere.
CheckReport check_commit_adopt_exhaustive(const std::set<ProcessorId>& online,
                                          const std::set<ProcessorId>& impersonated,
                                          const std::map<ProcessorId, Value>& inputs,
                                          const std::vector<Value>& alphabet);

// One no-eq round, every behavior, every (m1, m2) pair: Lemma 1, Theorem 2,
// Theorem 3, with explicit not-applicable accounting.
CheckReport check_theorem_sweep(const std::set<ProcessorId>& online,
                                const std::set<ProcessorId>& impersonated,
                                const std::map<ProcessorId, Value>& inputs,
                                const std::vector<Value>& alphabet);

// Deterministic conciliator (parameter N) under every valid IIAB injection
// within the instance: all outputs equal, and never-impersonated processors
// hold equal e-sets at the end of round N. `impersonated_from` is the round
// the (single) impersonated processor x joins F.
CheckReport check_det_conciliator_exhaustive(std::uint32_t n_rounds, std::uint32_t n_processors,
                                             ProcessorId x, std::uint32_t impersonated_from,
                                             const std::map<ProcessorId, Value>& inputs,
                                             unsigned threads = 1);

// Algorithm-1 conformance: every valid IIAB injection over the two
// simulation rounds (alphabet-restricted; `reduced` additionally collapses
// redundant junk branches and uses a single fresh symbol) yields simulated
// delivery profiles that classify to the model's cases 1-4, with every
// round-A well-behaved payload arriving as case 2; each profile is also
// reproduced on the native no-eq engine, and no two simulated views hold
// strict majorities for different payloads.
CheckReport check_simulation_conformance(const std::set<ProcessorId>& online, ProcessorId x,
                                         const std::map<ProcessorId, Value>& inputs,
                                         const std::vector<Value>& alphabet, bool reduced,
                                         unsigned threads = 1);

// Trivial protocols used as harnesses in sweeps and tests.
class OneShotBroadcast final : public Protocol {
public:
    explicit OneShotBroadcast(Value v) : value_(std::move(v)) {}
    std::vector<Payload> on_send(const ProtocolContext& ctx) const override {
        return ctx.round.index == 1 ? std::vector<Payload>{Payload{value_}}
                                    : std::vector<Payload>{};
    }
    std::optional<Payload> on_receive(const ProtocolContext&, const ReceiveView&) override {
        return std::nullopt;
    }
    std::unique_ptr<Protocol> clone() const override {
        return std::make_unique<OneShotBroadcast>(*this);
    }

private:
    Value value_;
};

class NoEqBroadcastOnce final : public NoEqProtocol {
public:
    explicit NoEqBroadcastOnce(Value v) : value_(std::move(v)) {}
    Payload broadcast(const NoEqContext&) const override { return Payload{value_}; }
    std::optional<Payload> deliver(const NoEqContext&, const NoEqDelivery&) override {
        return std::nullopt;
    }
    std::unique_ptr<NoEqProtocol> clone() const override {
        return std::make_unique<NoEqBroadcastOnce>(*this);
    }

private:
    Value value_;
};

}  // namespace iiab
