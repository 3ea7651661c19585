#include "iiab/adversaries.hpp"

#include <algorithm>
#include <stdexcept>

namespace iiab {

AdversaryDecision EquivocatorSplitAdversary::decide(const RoundObservation& obs) {
    const RoundParticipation& rp = obs.schedule.at(obs.round);
    if (rp.impersonated.empty() || obs.honest_sends.empty()) return {};

    // One representative payload per honest sender, in sender order.
    std::vector<Payload> honest;
    for (const auto& [sender, payloads] : obs.honest_sends) {
        if (payloads.empty()) continue;
        Payload m = *std::min_element(payloads.begin(), payloads.end());
        if (std::find(honest.begin(), honest.end(), m) == honest.end())
            honest.push_back(std::move(m));
    }
    if (honest.empty()) return {};

    AdversaryDecision decision;
    for (ProcessorId p : rp.impersonated) {
        auto echo = [&](const Payload& m) -> Payload {
            if (const SignedMessage* s = m.as_signed(); s && s->round == obs.round)
                return sign(p, obs.round, s->content);
            return m;
        };
        const Payload first = echo(honest.front());
        const Payload second = echo(honest.size() > 1 ? honest[1] : honest.front());
        std::vector<ProcessorId> receivers;
        for (ProcessorId q : obs.materialized)
            if (q != p) receivers.push_back(q);
        const std::size_t half = (receivers.size() + 1) / 2;
        for (std::size_t i = 0; i < receivers.size(); ++i)
            decision.injections[p][receivers[i]].push_back(i < half ? first : second);
    }
    return decision;
}

NoEqScriptedStrategy::NoEqScriptedStrategy(std::map<Round, NoEqAdversaryDecision> script,
                                           std::set<ProcessorId> universe)
    : script_(std::move(script)) {
    for (const auto& [r, decision] : script_) {
        for (const auto& [owner, shape] : decision.shapes) {
            std::set<ProcessorId> receivers = universe;
            receivers.erase(owner);
            auto in_receivers = [&](const std::set<ProcessorId>& s) {
                return std::all_of(s.begin(), s.end(),
                                   [&](ProcessorId q) { return receivers.count(q) > 0; });
            };
            switch (shape.kind) {
            case NoEqShape::Kind::silent:
                break;
            case NoEqShape::Kind::uniform:
                if (!shape.message)
                    throw std::invalid_argument("script: uniform shape without message");
                break;
            case NoEqShape::Kind::split:
                if (!shape.message || shape.recipients.empty() ||
                    shape.recipients.size() >= receivers.size() ||
                    !in_receivers(shape.recipients))
                    throw std::invalid_argument("script: invalid split shape in " + to_string(r));
                break;
            case NoEqShape::Kind::lambda_only:
                if (!in_receivers(shape.recipients))
                    throw std::invalid_argument("script: invalid lambda_only shape in " +
                                                to_string(r));
                break;
            }
        }
    }
}

namespace {

std::set<ProcessorId> id_range(std::uint32_t from, std::uint32_t count) {
    std::set<ProcessorId> s;
    for (std::uint32_t i = 0; i < count; ++i) s.insert(pid(from + i));
    return s;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("schedule generator: " + what);
}

}  // namespace

ParticipationSchedule constant_schedule(std::uint32_t n, std::uint32_t f, std::uint32_t horizon) {
    require(horizon >= 1, "horizon must be at least 1");
    require(f * 2 < n, "need |F| < |W|");
    ParticipationSchedule s;
    RoundParticipation rp{id_range(1, n), id_range(1, f)};
    s.rounds.assign(horizon, rp);
    return s;
}

ParticipationSchedule growing_adversary_schedule(std::uint32_t n, std::uint32_t max_f,
                                                 std::uint32_t step, std::uint32_t horizon) {
    require(horizon >= 1 && step >= 1, "horizon and step must be at least 1");
    require(max_f * 2 < n, "need |F| < |W|");
    ParticipationSchedule s;
    for (std::uint32_t r = 1; r <= horizon; ++r) {
        std::uint32_t f = std::min(max_f, (r - 1) / step);
        s.rounds.push_back({id_range(1, n), id_range(1, f)});
    }
    return s;
}

ParticipationSchedule stabilizing_schedule(std::uint32_t stabilization_round, std::uint32_t n,
                                           std::uint32_t f, std::uint32_t impersonation_start,
                                           std::uint32_t horizon) {
    require(stabilization_round >= 1 && horizon >= stabilization_round, "bad rounds");
    require(f * 2 < n, "need |F| < |W|");
    require(f == 0 || impersonation_start >= 1, "bad impersonation start");
    ParticipationSchedule s;
    std::uint32_t next_filler = n + 1;
    for (std::uint32_t r = 1; r <= horizon; ++r) {
        RoundParticipation rp;
        if (r >= stabilization_round) {
            rp.online = id_range(1, n);
        } else {
            // Always-online core {1..f}, plus a disjoint filler window.
            rp.online = id_range(1, f);
            for (ProcessorId q : id_range(next_filler, n - f)) rp.online.insert(q);
            next_filler += n - f;
        }
        if (f > 0 && r >= impersonation_start) rp.impersonated = id_range(1, f);
        s.rounds.push_back(std::move(rp));
    }
    return s;
}

ParticipationSchedule churn_schedule(std::uint32_t window, std::uint32_t pinned_f,
                                     std::uint32_t horizon) {
    require(horizon >= 1, "horizon must be at least 1");
    require(pinned_f < window, "need |F| < |W|");
    ParticipationSchedule s;
    std::uint32_t next_filler = pinned_f + 1;
    for (std::uint32_t r = 1; r <= horizon; ++r) {
        RoundParticipation rp;
        rp.online = id_range(1, pinned_f);
        for (ProcessorId q : id_range(next_filler, window)) rp.online.insert(q);
        next_filler += window;
        rp.impersonated = id_range(1, pinned_f);
        s.rounds.push_back(std::move(rp));
    }
    return s;
}

std::shared_ptr<AdversaryStrategy> make_adversary(const std::string& name) {
    if (name == "silent") return std::make_shared<SilentAdversary>();
    if (name == "equivocator_split") return std::make_shared<EquivocatorSplitAdversary>();
    throw std::invalid_argument("unknown adversary strategy: " + name);
}

std::shared_ptr<OraclePolicy> make_oracle_policy(const std::string& name) {
    if (name == "leader_withholder") return std::make_shared<LeaderWithholderPolicy>();
    throw std::invalid_argument("unknown oracle policy: " + name);
}

}  // namespace iiab
