#pragma once

#include <optional>
#include <string>

#include "iiab/delivery.hpp"
#include "iiab/payload.hpp"

namespace iiab {

// Wire encodings used by trace records and checker reports. Payloads
// serialize with explicit tags:
//   {"value": "<base64>"}
//   {"signed": {"signer": p, "round": r, "content": ...}}
//   {"list": [...]}
// and the no-eq failure notification serializes as {"lambda": true}.
std::string payload_to_json(const Payload& p);
Payload payload_from_json(const std::string& text);

std::string value_to_base64(const Value& v);
Value value_from_base64(const std::string& text);

}  // namespace iiab
