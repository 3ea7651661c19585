#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace iiab {

// Opaque processor label. The processor universe is materialized lazily:
// only ids that appear in a participation schedule or are registered as
// observers ever exist inside an engine run.
struct ProcessorId {
    std::uint32_t value{0};

    auto operator<=>(const ProcessorId&) const = default;
};

inline ProcessorId pid(std::uint32_t v) { return ProcessorId{v}; }

// 1-based synchronous round index.
struct Round {
    std::uint32_t index{1};

    auto operator<=>(const Round&) const = default;

    Round next() const { return Round{index + 1}; }
    Round prev() const { return Round{index - 1}; }
};

inline Round round(std::uint32_t r) { return Round{r}; }

inline std::string to_string(ProcessorId p) { return "p" + std::to_string(p.value); }
inline std::string to_string(Round r) { return "r" + std::to_string(r.index); }

}  // namespace iiab

template <>
struct std::hash<iiab::ProcessorId> {
    std::size_t operator()(const iiab::ProcessorId& p) const noexcept {
        return std::hash<std::uint32_t>{}(p.value);
    }
};
