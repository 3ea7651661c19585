#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace iiab {

// JSON-lines trace collector. Records are accumulated in order; callers
// may also stream them to a file. Byte-identical record sequences are the
// determinism/replay contract.
class Trace {
public:
    void append(std::string line) { lines_.push_back(std::move(line)); }
    const std::vector<std::string>& lines() const { return lines_; }
    bool operator==(const Trace&) const = default;

    std::string to_text() const {
        std::string out;
        for (const std::string& l : lines_) {
            out += l;
            out += '\n';
        }
        return out;
    }

private:
    std::vector<std::string> lines_;
};

}  // namespace iiab
