#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "iiab/delivery.hpp"
#include "iiab/oracle.hpp"
#include "iiab/payload.hpp"

namespace iiab {

struct ProtocolContext {
    Round round;
    ProcessorId self;
    ProcessorId leader;  // this round's oracle answer l_self^round
};

// A round-driven state machine for one processor. The engine calls on_send
// for online processors (send phase) and on_receive for every materialized
// processor (receive phase). State may only change in on_receive; sends are
// a pure function of accumulated state, which keeps runs replayable and
// lets the checker enumerate adversary moves against a frozen send phase.
//
// on_receive may return an irrevocable output once; producing a second
// output aborts the run.
class Protocol {
public:
    virtual ~Protocol() = default;

    virtual std::vector<Payload> on_send(const ProtocolContext& ctx) const = 0;
    virtual std::optional<Payload> on_receive(const ProtocolContext& ctx,
                                              const ReceiveView& view) = 0;

    virtual std::unique_ptr<Protocol> clone() const = 0;
};

}  // namespace iiab
