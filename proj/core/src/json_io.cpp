#include "iiab/json_io.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>

#include "iiab/base64.hpp"

namespace iiab {

using nlohmann::json;

namespace {

json payload_to_json_obj(const Payload& p) {
    switch (p.kind()) {
    case Payload::Kind::value:
        return json{{"value", base64_encode(p.as_value()->bytes)}};
    case Payload::Kind::signed_message: {
        const SignedMessage& m = *p.as_signed();
        return json{{"signed", json{{"signer", m.signer.value},
                                    {"round", m.round.index},
                                    {"content", payload_to_json_obj(m.content)}}}};
    }
    case Payload::Kind::list: {
        json arr = json::array();
        for (const Payload& e : *p.as_list()) arr.push_back(payload_to_json_obj(e));
        return json{{"list", std::move(arr)}};
    }
    }
    throw std::logic_error("payload_to_json: bad kind");
}

Payload payload_from_json_obj(const json& j) {
    if (j.contains("value")) {
        return Payload{Value{base64_decode(j.at("value").get<std::string>())}};
    }
    if (j.contains("signed")) {
        const json& s = j.at("signed");
        return Payload{SignedMessage{pid(s.at("signer").get<std::uint32_t>()),
                                     Round{s.at("round").get<std::uint32_t>()},
                                     payload_from_json_obj(s.at("content"))}};
    }
    if (j.contains("list")) {
        std::vector<Payload> elems;
        for (const json& e : j.at("list")) elems.push_back(payload_from_json_obj(e));
        return Payload{std::move(elems)};
    }
    throw std::invalid_argument("payload_from_json: unknown tag");
}

}  // namespace

std::string payload_to_json(const Payload& p) { return payload_to_json_obj(p).dump(); }

Payload payload_from_json(const std::string& text) {
    return payload_from_json_obj(json::parse(text));
}

std::string value_to_base64(const Value& v) { return base64_encode(v.bytes); }

Value value_from_base64(const std::string& text) { return Value{base64_decode(text)}; }

}  // namespace iiab
