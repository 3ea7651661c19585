#include "iiab/checker.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "iiab/adversaries.hpp"
#include "iiab/json_io.hpp"
#include "iiab/noeq_sim.hpp"

namespace iiab {

using nlohmann::json;

// --------------------------------------------------------------------------
// Shape enumeration
// --------------------------------------------------------------------------

namespace {

std::vector<std::set<ProcessorId>> subsets_of(const std::set<ProcessorId>& s, bool skip_empty,
                                              bool skip_full) {
    std::vector<ProcessorId> ids(s.begin(), s.end());
    std::vector<std::set<ProcessorId>> out;
    const std::size_t total = std::size_t{1} << ids.size();
    for (std::size_t mask = 0; mask < total; ++mask) {
        if (skip_empty && mask == 0) continue;
        if (skip_full && mask + 1 == total) continue;
        std::set<ProcessorId> sub;
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (mask & (std::size_t{1} << i)) sub.insert(ids[i]);
        out.push_back(std::move(sub));
    }
    return out;
}

}  // namespace

std::vector<NoEqShape> enumerate_shapes(const std::set<ProcessorId>& receivers,
                                        const std::vector<Payload>& messages) {
    std::vector<NoEqShape> out;
    out.push_back(NoEqShape::silent());
    for (auto& l : subsets_of(receivers, /*skip_empty=*/true, /*skip_full=*/false))
        out.push_back(NoEqShape::lambda_only(std::move(l)));
    for (const Payload& m : messages) {
        out.push_back(NoEqShape::uniform(m));
        for (auto& s : subsets_of(receivers, /*skip_empty=*/true, /*skip_full=*/true))
            out.push_back(NoEqShape::split(m, std::move(s)));
    }
    return out;
}

std::uint64_t shape_count_closed_form(std::size_t n_receivers, std::size_t n_messages) {
    const std::uint64_t two_r = std::uint64_t{1} << n_receivers;
    return two_r * (1 + n_messages) - n_messages;
}

std::uint64_t noeq_behavior_count(const NoEqEnumeration& inst) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < inst.schedule.rounds.size(); ++i) {
        const auto& rp = inst.schedule.rounds[i];
        for (ProcessorId p : rp.impersonated) {
            (void)p;
            count *= shape_count_closed_form(inst.universe.size() - 1,
                                             inst.message_pool.at(i).size());
        }
    }
    return count;
}

void enumerate_noeq_behaviors(const NoEqEnumeration& inst,
                              const std::function<void(const NoEqBehavior&)>& fn) {
    if (inst.universe.size() > 5 || inst.schedule.rounds.size() > 3)
        throw EnvelopeExceeded("no-eq enumeration envelope is n <= 5 processors, <= 3 rounds");
    for (const auto& pool : inst.message_pool)
        if (pool.size() > 8) throw EnvelopeExceeded("no-eq message pool larger than 8");
    const std::uint64_t estimate = noeq_behavior_count(inst);
    if (estimate > 50'000'000)
        throw EnvelopeExceeded("no-eq enumeration would visit " + std::to_string(estimate) +
                               " behaviors");

    // Flatten (round, owner) slots, each with its shape list.
    struct Slot {
        Round round;
        ProcessorId owner;
        std::vector<NoEqShape> shapes;
    };
    std::vector<Slot> slots;
    for (std::uint32_t i = 0; i < inst.schedule.rounds.size(); ++i) {
        const Round r{i + 1};
        for (ProcessorId p : inst.schedule.rounds[i].impersonated) {
            std::set<ProcessorId> receivers = inst.universe;
            receivers.erase(p);
            slots.push_back({r, p, enumerate_shapes(receivers, inst.message_pool[i])});
        }
    }

    NoEqBehavior behavior;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == slots.size()) {
            fn(behavior);
            return;
        }
        for (const NoEqShape& shape : slots[i].shapes) {
            behavior[slots[i].round].shapes[slots[i].owner] = shape;
            rec(i + 1);
        }
        behavior[slots[i].round].shapes.erase(slots[i].owner);
        if (behavior[slots[i].round].shapes.empty()) behavior.erase(slots[i].round);
    };
    rec(0);
}

// --------------------------------------------------------------------------
// Lemma 1 / Theorem 2 / Theorem 3
// --------------------------------------------------------------------------

namespace {

std::size_t count_in(const NoEqDelivery& d, const Payload& m) {
    std::size_t n = 0;
    for (const auto& [p, e] : d.entries())
        if (e.has_value() && *e == m) ++n;
    return n;
}

std::optional<Payload> majority_payload(const NoEqDelivery& d) {
    const std::size_t heard = d.entries().size();
    std::map<Payload, std::size_t> counts;
    for (const auto& [p, e] : d.entries())
        if (e.has_value()) ++counts[*e];
    for (const auto& [m, n] : counts)
        if (2 * n > heard) return m;
    return std::nullopt;
}

}  // namespace

bool check_lemma1(const NoEqDelivery& view_p, const NoEqDelivery& view_p2, const Payload& m) {
    std::set<ProcessorId> pm;
    for (const auto& [q, e] : view_p.entries())
        if (e.has_value() && *e == m) pm.insert(q);
    const std::set<ProcessorId> hp = view_p.heard_of();
    const std::set<ProcessorId> hp2 = view_p2.heard_of();
    std::set<ProcessorId> common;
    std::set_intersection(hp.begin(), hp.end(), hp2.begin(), hp2.end(),
                          std::inserter(common, common.begin()));
    for (ProcessorId q : pm)
        if (!common.count(q)) return false;
    if (2 * pm.size() > hp.size() && 2 * pm.size() <= common.size()) return false;
    return true;
}

bool check_thm2(const std::map<ProcessorId, NoEqDelivery>& views) {
    std::set<Payload> winners;
    for (const auto& [p, d] : views)
        if (auto m = majority_payload(d)) winners.insert(*m);
    return winners.size() <= 1;
}

Thm3Verdict check_thm3(const std::map<ProcessorId, NoEqDelivery>& views,
                       const std::set<Payload>& honest_broadcasts, const Payload& m1,
                       const Payload& m2) {
    if (m1 == m2 || honest_broadcasts.count(m2)) return Thm3Verdict::not_applicable;
    bool premise = false;
    for (const auto& [p, d] : views) {
        if (auto m = majority_payload(d); m && *m == m1) {
            premise = true;
            break;
        }
    }
    if (!premise) return Thm3Verdict::not_applicable;
    for (const auto& [p, d] : views)
        if (count_in(d, m2) >= count_in(d, m1)) return Thm3Verdict::violated;
    return Thm3Verdict::holds;
}

// --------------------------------------------------------------------------
// Reports and scripts
// --------------------------------------------------------------------------

void CheckReport::merge(const CheckReport& other) {
    behaviors_checked += other.behaviors_checked;
    for (const auto& [k, v] : other.counters) counters[k] += v;
    for (const auto& a : other.assumptions)
        if (std::find(assumptions.begin(), assumptions.end(), a) == assumptions.end())
            assumptions.push_back(a);
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

std::string CheckReport::to_json() const {
    json doc;
    doc["behaviors_checked"] = behaviors_checked;
    doc["counters"] = json::object();
    for (const auto& [k, v] : counters) doc["counters"][k] = v;
    doc["assumptions"] = assumptions;
    doc["violations"] = json::array();
    for (const auto& v : violations) {
        doc["violations"].push_back(json{{"property", v.property},
                                         {"behavior_script", json::parse(v.behavior)},
                                         {"witness", v.witness}});
    }
    return doc.dump();
}

std::string iiab_script_to_json(const std::map<Round, AdversaryDecision>& script) {
    json doc = json::object();
    for (const auto& [r, decision] : script) {
        json links = json::object();
        for (const auto& [owner, per_receiver] : decision.injections) {
            json recv = json::object();
            for (const auto& [q, payloads] : per_receiver) {
                json arr = json::array();
                for (const Payload& m : payloads) arr.push_back(json::parse(payload_to_json(m)));
                recv[std::to_string(q.value)] = std::move(arr);
            }
            links[std::to_string(owner.value)] = std::move(recv);
        }
        doc[std::to_string(r.index)] = std::move(links);
    }
    return doc.dump();
}

std::map<Round, AdversaryDecision> iiab_script_from_json(const std::string& text) {
    std::map<Round, AdversaryDecision> script;
    const json doc = json::parse(text);
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        Round r{static_cast<std::uint32_t>(std::stoul(it.key()))};
        for (auto owner_it = it.value().begin(); owner_it != it.value().end(); ++owner_it) {
            ProcessorId owner = pid(static_cast<std::uint32_t>(std::stoul(owner_it.key())));
            for (auto recv_it = owner_it.value().begin(); recv_it != owner_it.value().end();
                 ++recv_it) {
                ProcessorId q = pid(static_cast<std::uint32_t>(std::stoul(recv_it.key())));
                for (const json& p : recv_it.value())
                    script[r].injections[owner][q].push_back(payload_from_json(p.dump()));
            }
        }
    }
    return script;
}

namespace {

json shape_to_json(const NoEqShape& s) {
    json doc;
    switch (s.kind) {
    case NoEqShape::Kind::silent:
        doc["kind"] = "silent";
        break;
    case NoEqShape::Kind::uniform:
        doc["kind"] = "uniform";
        break;
    case NoEqShape::Kind::split:
        doc["kind"] = "split";
        break;
    case NoEqShape::Kind::lambda_only:
        doc["kind"] = "lambda_only";
        break;
    }
    if (s.message) doc["message"] = json::parse(payload_to_json(*s.message));
    json ids = json::array();
    for (ProcessorId p : s.recipients) ids.push_back(p.value);
    doc["recipients"] = std::move(ids);
    return doc;
}

NoEqShape shape_from_json(const json& doc) {
    NoEqShape s;
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "silent")
        s.kind = NoEqShape::Kind::silent;
    else if (kind == "uniform")
        s.kind = NoEqShape::Kind::uniform;
    else if (kind == "split")
        s.kind = NoEqShape::Kind::split;
    else if (kind == "lambda_only")
        s.kind = NoEqShape::Kind::lambda_only;
    else
        throw std::invalid_argument("unknown shape kind: " + kind);
    if (doc.contains("message")) s.message = payload_from_json(doc.at("message").dump());
    for (const json& v : doc.at("recipients")) s.recipients.insert(pid(v.get<std::uint32_t>()));
    return s;
}

}  // namespace

std::string noeq_behavior_to_json(const NoEqBehavior& behavior) {
    json doc = json::object();
    for (const auto& [r, decision] : behavior) {
        json owners = json::object();
        for (const auto& [owner, shape] : decision.shapes)
            owners[std::to_string(owner.value)] = shape_to_json(shape);
        doc[std::to_string(r.index)] = std::move(owners);
    }
    return doc.dump();
}

NoEqBehavior noeq_behavior_from_json(const std::string& text) {
    NoEqBehavior behavior;
    const json doc = json::parse(text);
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        Round r{static_cast<std::uint32_t>(std::stoul(it.key()))};
        for (auto oit = it.value().begin(); oit != it.value().end(); ++oit)
            behavior[r].shapes[pid(static_cast<std::uint32_t>(std::stoul(oit.key())))] =
                shape_from_json(oit.value());
    }
    return behavior;
}

// --------------------------------------------------------------------------
// Commit-adopt exhaustive check
// --------------------------------------------------------------------------

namespace {

Value fresh_value(std::size_t i) {
    // 0xff prefix keeps fresh symbols outside any printable alphabet.
    return Value{std::vector<std::uint8_t>{0xff, static_cast<std::uint8_t>(i)}};
}

std::string describe_outputs(const std::map<ProcessorId, RecordedOutput>& outputs) {
    std::ostringstream os;
    for (const auto& [p, out] : outputs) {
        os << to_string(p) << "->";
        if (auto o = decode_commit_adopt(out.payload)) {
            os << (o->kind == CommitAdoptOutput::Kind::commit ? "commit(" : "adopt(")
               << o->value.as_string() << ") ";
        } else if (const Value* v = out.payload.as_value()) {
            os << v->as_string() << " ";
        } else {
            os << "<non-value> ";
        }
    }
    return os.str();
}

}  // namespace

CheckReport check_commit_adopt_exhaustive(const std::set<ProcessorId>& online,
                                          const std::set<ProcessorId>& impersonated,
                                          const std::map<ProcessorId, Value>& inputs,
                                          const std::vector<Value>& alphabet) {
    NoEqEnumeration inst;
    inst.universe = online;
    inst.schedule.rounds.assign(2, RoundParticipation{online, impersonated});

    std::vector<Payload> round1, round2;
    std::vector<Value> symbols = alphabet;
    for (std::size_t i = 0; i < std::max<std::size_t>(impersonated.size(), 1); ++i)
        symbols.push_back(fresh_value(i));
    for (const Value& a : symbols) {
        round1.push_back(Payload{a});
        round2.push_back(encode_propose_commit(a));
        round2.push_back(Payload{a});
    }
    round2.push_back(encode_no_commit());
    inst.message_pool = {round1, round2};

    const bool unanimous = std::all_of(inputs.begin(), inputs.end(), [&](const auto& kv) {
        return kv.second == inputs.begin()->second;
    });

    CheckReport report;
    report.assumptions.push_back(
        "adversary payloads restricted to the task alphabet, its propose-commit/no-commit "
        "encodings, and one fresh symbol per impersonated processor (payload renaming symmetry)");

    enumerate_noeq_behaviors(inst, [&](const NoEqBehavior& behavior) {
        auto schedule = std::make_shared<ParticipationSchedule>(inst.schedule);
        std::map<ProcessorId, std::unique_ptr<NoEqProtocol>> protocols;
        for (ProcessorId p : online)
            protocols.emplace(p, std::make_unique<CommitAdoptProtocol>(inputs.at(p)));
        NoEqEngine engine(schedule, std::move(protocols),
                          std::make_shared<NoEqScriptedStrategy>(behavior, online),
                          std::make_shared<LeaderWithholderPolicy>(), 0);
        engine.run();
        ++report.behaviors_checked;

        std::map<ProcessorId, CommitAdoptOutput> outs;
        for (ProcessorId p : online) {
            auto it = engine.outputs().find(p);
            auto decoded =
                it == engine.outputs().end()
                    ? std::nullopt
                    : decode_commit_adopt(it->second.payload);
            if (!decoded) {
                report.violations.push_back({"output-shape", noeq_behavior_to_json(behavior),
                                             to_string(p) + " produced no commit/adopt output"});
                return;
            }
            outs[p] = *decoded;
        }
        std::optional<Value> committed;
        for (const auto& [p, o] : outs)
            if (o.kind == CommitAdoptOutput::Kind::commit) committed = o.value;
        if (committed) {
            for (const auto& [p, o] : outs) {
                if (o.value != *committed) {
                    report.violations.push_back({"agreement", noeq_behavior_to_json(behavior),
                                                 describe_outputs(engine.outputs())});
                    break;
                }
            }
        }
        if (unanimous) {
            const Value& v = inputs.begin()->second;
            for (const auto& [p, o] : outs) {
                if (o.kind != CommitAdoptOutput::Kind::commit || o.value != v) {
                    report.violations.push_back({"validity", noeq_behavior_to_json(behavior),
                                                 describe_outputs(engine.outputs())});
                    break;
                }
            }
        }
    });
    report.counters["commit_adopt_instances"] = report.behaviors_checked;
    return report;
}

// --------------------------------------------------------------------------
// Theorem sweep (one no-eq round)
// --------------------------------------------------------------------------

CheckReport check_theorem_sweep(const std::set<ProcessorId>& online,
                                const std::set<ProcessorId>& impersonated,
                                const std::map<ProcessorId, Value>& inputs,
                                const std::vector<Value>& alphabet) {
    NoEqEnumeration inst;
    inst.universe = online;
    inst.schedule.rounds.assign(1, RoundParticipation{online, impersonated});
    std::vector<Payload> pool;
    for (const Value& a : alphabet) pool.push_back(Payload{a});
    pool.push_back(Payload{fresh_value(0)});
    inst.message_pool = {pool};

    std::set<Payload> honest;
    for (ProcessorId p : inst.schedule.rounds[0].online)
        if (!impersonated.count(p)) honest.insert(Payload{inputs.at(p)});

    CheckReport report;
    enumerate_noeq_behaviors(inst, [&](const NoEqBehavior& behavior) {
        auto schedule = std::make_shared<ParticipationSchedule>(inst.schedule);
        std::map<ProcessorId, std::unique_ptr<NoEqProtocol>> protocols;
        for (ProcessorId p : online)
            protocols.emplace(p, std::make_unique<NoEqBroadcastOnce>(inputs.at(p)));
        NoEqEngine engine(schedule, std::move(protocols),
                          std::make_shared<NoEqScriptedStrategy>(behavior, online),
                          std::make_shared<LeaderWithholderPolicy>(), 0);
        engine.run();
        ++report.behaviors_checked;
        const auto& views = engine.deliveries(Round{1});

        if (!check_thm2(views))
            report.violations.push_back(
                {"thm2", noeq_behavior_to_json(behavior), "two distinct strict majorities"});
        ++report.counters["thm2_checked"];

        // Message universe for the pair sweep: everything seen plus the pool.
        std::set<Payload> universe(pool.begin(), pool.end());
        for (const auto& [p, d] : views)
            for (const auto& [q, e] : d.entries())
                if (e.has_value()) universe.insert(*e);

        for (const Payload& m1 : universe) {
            for (const Payload& m2 : universe) {
                switch (check_thm3(views, honest, m1, m2)) {
                case Thm3Verdict::holds:
                    ++report.counters["thm3_applicable"];
                    break;
                case Thm3Verdict::not_applicable:
                    ++report.counters["thm3_not_applicable"];
                    break;
                case Thm3Verdict::violated:
                    ++report.counters["thm3_applicable"];
                    report.violations.push_back({"thm3", noeq_behavior_to_json(behavior),
                                                 "m2 not received strictly less often than m1"});
                    break;
                }
            }
        }

        for (const auto& [p, dp] : views) {
            for (const auto& [p2, dp2] : views) {
                for (const Payload& m : universe) {
                    ++report.counters["lemma1_checked"];
                    if (!check_lemma1(dp, dp2, m))
                        report.violations.push_back({"lemma1", noeq_behavior_to_json(behavior),
                                                     "P_m not a strict majority of the "
                                                     "common heard-of set"});
                }
            }
        }
    });
    return report;
}

}  // namespace iiab
