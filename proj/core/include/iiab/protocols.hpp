#pragma once

#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "iiab/noeq.hpp"
#include "iiab/noeq_sim.hpp"
#include "iiab/protocol.hpp"

namespace iiab {

// ---------------------------------------------------------------------------
// Wire encodings shared by the task protocols. Tags are bare values; tagged
// messages are two-element lists, so they can never collide with an input
// value broadcast on its own.
// ---------------------------------------------------------------------------

Payload encode_propose_commit(const Value& v);
Payload encode_no_commit();
std::optional<Value> decode_propose_commit(const Payload& p);
bool is_no_commit(const Payload& p);

struct CommitAdoptOutput {
    enum class Kind { commit, adopt };
    Kind kind = Kind::adopt;
    Value value;

    bool operator==(const CommitAdoptOutput&) const = default;
};

Payload encode_commit_adopt(const CommitAdoptOutput& o);
std::optional<CommitAdoptOutput> decode_commit_adopt(const Payload& p);

// ---------------------------------------------------------------------------
// Commit-adopt over 2 no-eq rounds.
// Round 1: broadcast the input. Round 2: broadcast propose-commit(v) if some
// v was heard from a strict majority, else no-commit. Output: commit(v) on a
// strict majority of propose-commit(v); else adopt the unique plurality
// value among the propose-commit messages received; else adopt own input.
// ---------------------------------------------------------------------------
class CommitAdoptProtocol final : public NoEqProtocol {
public:
    explicit CommitAdoptProtocol(Value input) : input_(std::move(input)) {}

    Payload broadcast(const NoEqContext& ctx) const override;
    std::optional<Payload> deliver(const NoEqContext& ctx, const NoEqDelivery& d) override;

    std::unique_ptr<NoEqProtocol> clone() const override {
        return std::make_unique<CommitAdoptProtocol>(*this);
    }

    const std::optional<CommitAdoptOutput>& result() const { return result_; }
    const Value& input() const { return input_; }

private:
    Value input_;
    int deliveries_ = 0;
    std::optional<Value> proposal_;  // round-1 strict-majority value, if any
    std::optional<CommitAdoptOutput> result_;
};

// ---------------------------------------------------------------------------
// Probabilistic conciliator over 3 no-eq rounds: commit-adopt, then one
// round broadcasting the commit-adopt output. Output rules: (1) a value
// committed by a strict majority; (2) else the leader's commit/adopt value;
// (3) else the external input.
// ---------------------------------------------------------------------------
class ProbaConciliatorProtocol final : public NoEqProtocol {
public:
    explicit ProbaConciliatorProtocol(Value input) : input_(input), ca_(std::move(input)) {}

    Payload broadcast(const NoEqContext& ctx) const override;
    std::optional<Payload> deliver(const NoEqContext& ctx, const NoEqDelivery& d) override;

    std::unique_ptr<NoEqProtocol> clone() const override {
        return std::make_unique<ProbaConciliatorProtocol>(*this);
    }

    const std::optional<Value>& result() const { return result_; }

private:
    Value input_;
    CommitAdoptProtocol ca_;
    int deliveries_ = 0;
    std::optional<Value> result_;
};

// ---------------------------------------------------------------------------
// Deterministic conciliator: Dolev-Strong relay for N rounds plus one
// candidate-exchange round, run natively on IIAB rounds (it needs signed
// relay chains, not non-equivocation).
//
// e_p collects (origin, value) pairs: one chain of the form
// <p_r,r,<...<p_1,1,v>>> with pairwise-distinct signers contributes the
// pair (p_1, v). A given origin may end up paired with several values when
// the adversary equivocated for it in round 1; keeping all pairs is what
// makes the relay argument close (every pair any well-behaved processor
// holds spreads to everyone within one round), so never-impersonated
// processors converge to equal sets by the end of round N.
// ---------------------------------------------------------------------------
class DetConciliatorProtocol final : public Protocol {
public:
    DetConciliatorProtocol(std::uint32_t n_rounds, Round start, Value input)
        : n_(n_rounds), start_(start), input_(std::move(input)) {}

    std::vector<Payload> on_send(const ProtocolContext& ctx) const override;
    std::optional<Payload> on_receive(const ProtocolContext& ctx,
                                      const ReceiveView& view) override;

    std::unique_ptr<Protocol> clone() const override {
        return std::make_unique<DetConciliatorProtocol>(*this);
    }

    std::uint32_t local_round(Round global) const { return global.index - start_.index + 1; }
    const std::set<std::pair<ProcessorId, Value>>& extracted() const { return e_; }
    const std::optional<Value>& result() const { return result_; }

    // Candidate rule: the smallest value supported by a strict majority of
    // the origins appearing in e_p, else the smallest value in e_p.
    Value candidate() const;

private:
    std::uint32_t n_;
    Round start_;
    Value input_;
    std::set<std::pair<ProcessorId, Value>> e_;
    std::vector<Payload> relay_;  // non-repeating chains received last round
    std::optional<Value> result_;
};

// ---------------------------------------------------------------------------
// Generic consensus: an infinite alternation C[1], CA[1], C[2], CA[2], ...
// Phase boundaries are functions of the global round only, so processors
// that were offline stay synchronized. The first commit becomes the
// irrevocable decision; later phases keep executing but cannot change it.
// ---------------------------------------------------------------------------

struct PhaseLayout {
    // Global round of the first round of C[n] / CA[n], both 1-based.
    virtual ~PhaseLayout() = default;
    virtual std::uint32_t conciliator_start(std::uint32_t n) const = 0;
    virtual std::uint32_t conciliator_rounds(std::uint32_t n) const = 0;
    virtual std::uint32_t commit_adopt_rounds() const = 0;

    std::uint32_t commit_adopt_start(std::uint32_t n) const {
        return conciliator_start(n) + conciliator_rounds(n);
    }
    std::uint32_t segment_end(std::uint32_t n) const {
        return commit_adopt_start(n) + commit_adopt_rounds() - 1;
    }
    // The segment index containing global round g.
    std::uint32_t segment_of(std::uint32_t g) const {
        std::uint32_t n = 1;
        while (segment_end(n) < g) ++n;
        return n;
    }
};

// Probabilistic composition: every phase runs on simulated no-eq rounds.
// C[n] = 3 no-eq rounds (6 IIAB), CA[n] = 2 no-eq rounds (4 IIAB): 10 IIAB
// rounds per segment.
struct ProbaLayout final : PhaseLayout {
    std::uint32_t conciliator_start(std::uint32_t n) const override { return 10 * (n - 1) + 1; }
    std::uint32_t conciliator_rounds(std::uint32_t) const override { return 6; }
    std::uint32_t commit_adopt_rounds() const override { return 4; }
};

// Deterministic composition: C[n] is the deterministic conciliator with
// N = 2^n run natively (2^n + 1 IIAB rounds); CA[n] runs on simulated no-eq
// rounds (4 IIAB rounds).
struct DetLayout final : PhaseLayout {
    std::uint32_t conciliator_start(std::uint32_t n) const override {
        std::uint32_t g = 1;
        for (std::uint32_t i = 1; i < n; ++i) g += conciliator_rounds(i) + 4;
        return g;
    }
    std::uint32_t conciliator_rounds(std::uint32_t n) const override { return (1u << n) + 1; }
    std::uint32_t commit_adopt_rounds() const override { return 4; }
};

enum class ConsensusKind { probabilistic, deterministic };

class ConsensusProtocol final : public Protocol {
public:
    ConsensusProtocol(ConsensusKind kind, ProcessorId self, Value input);
    ConsensusProtocol(const ConsensusProtocol& other);

    std::vector<Payload> on_send(const ProtocolContext& ctx) const override;
    std::optional<Payload> on_receive(const ProtocolContext& ctx,
                                      const ReceiveView& view) override;

    std::unique_ptr<Protocol> clone() const override {
        return std::make_unique<ConsensusProtocol>(*this);
    }

    const std::optional<Value>& decision() const { return decision_; }
    const Value& current_value() const { return value_; }
    const PhaseLayout& layout() const { return *layout_; }

private:
    bool in_conciliator(std::uint32_t g, std::uint32_t n) const;

    ConsensusKind kind_;
    ProcessorId self_;
    Value value_;  // input to the current/next phase
    std::unique_ptr<PhaseLayout> layout_;
    std::unique_ptr<SimulatedNoEqAdapter> noeq_phase_;  // active simulated phase, if any
    std::unique_ptr<DetConciliatorProtocol> det_phase_;
    std::optional<Value> decision_;
    bool decision_reported_ = false;
};

}  // namespace iiab
