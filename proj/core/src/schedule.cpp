#include "iiab/schedule.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>

namespace iiab {

using nlohmann::json;

std::vector<ScheduleViolation> validate_schedule(const ParticipationSchedule& schedule) {
    std::vector<ScheduleViolation> out;
    for (std::uint32_t i = 0; i < schedule.rounds.size(); ++i) {
        Round r{i + 1};
        const RoundParticipation& rp = schedule.rounds[i];
        if (rp.online.empty()) {
            out.push_back({r, "O is empty"});
            continue;
        }
        for (ProcessorId p : rp.impersonated) {
            if (!rp.online.count(p)) {
                out.push_back({r, "F not a subset of O: " + to_string(p) + " offline"});
            }
        }
        std::size_t f = 0;
        for (ProcessorId p : rp.impersonated)
            if (rp.online.count(p)) ++f;
        std::size_t w = rp.online.size() - f;
        if (f >= w) {
            out.push_back({r, "|F|=" + std::to_string(rp.impersonated.size()) +
                                  " not < |W|=" + std::to_string(w)});
        }
    }
    return out;
}

bool is_growing(const ParticipationSchedule& schedule) {
    for (std::size_t i = 0; i + 1 < schedule.rounds.size(); ++i) {
        const auto& cur = schedule.rounds[i].impersonated;
        const auto& nxt = schedule.rounds[i + 1].impersonated;
        for (ProcessorId p : cur)
            if (!nxt.count(p)) return false;
    }
    return true;
}

std::string schedule_to_json(const ParticipationSchedule& schedule) {
    json doc;
    doc["horizon"] = schedule.rounds.size();
    doc["rounds"] = json::array();
    for (const auto& rp : schedule.rounds) {
        json entry;
        entry["online"] = json::array();
        for (ProcessorId p : rp.online) entry["online"].push_back(p.value);
        entry["impersonated"] = json::array();
        for (ProcessorId p : rp.impersonated) entry["impersonated"].push_back(p.value);
        doc["rounds"].push_back(std::move(entry));
    }
    return doc.dump();
}

ParticipationSchedule schedule_from_json(const std::string& text) {
    json doc = json::parse(text);
    ParticipationSchedule s;
    for (const auto& entry : doc.at("rounds")) {
        RoundParticipation rp;
        for (const auto& v : entry.at("online")) rp.online.insert(pid(v.get<std::uint32_t>()));
        for (const auto& v : entry.at("impersonated"))
            rp.impersonated.insert(pid(v.get<std::uint32_t>()));
        s.rounds.push_back(std::move(rp));
    }
    if (doc.contains("horizon") && doc.at("horizon").get<std::size_t>() != s.rounds.size())
        throw std::invalid_argument("schedule: horizon does not match rounds array");
    return s;
}

}  // namespace iiab
