#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace iiab {

// A protocol value: a finite byte string, totally ordered lexicographically.
// The order is what the deterministic conciliator's "smallest value" rule
// uses, so it must be stable across runs.
struct Value {
    std::vector<std::uint8_t> bytes;

    Value() = default;
    explicit Value(std::vector<std::uint8_t> b) : bytes(std::move(b)) {}

    static Value from_string(std::string_view s) {
        return Value{std::vector<std::uint8_t>(s.begin(), s.end())};
    }

    std::string as_string() const { return std::string(bytes.begin(), bytes.end()); }

    auto operator<=>(const Value&) const = default;
};

}  // namespace iiab
