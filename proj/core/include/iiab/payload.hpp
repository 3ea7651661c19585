#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <variant>
#include <vector>

#include "iiab/ids.hpp"
#include "iiab/value.hpp"

namespace iiab {

class Payload;
struct SignedMessage;

// A message on a link: a bare value, a signed message, or a finite list of
// payloads. Signed messages and lists are shared immutably so that deeply
// nested relay chains copy in O(1).
class Payload {
public:
    enum class Kind { value, signed_message, list };

    Payload() : repr_(Value{}) {}
    explicit Payload(Value v) : repr_(std::move(v)) {}
    Payload(SignedMessage m);
    explicit Payload(std::vector<Payload> elems)
        : repr_(std::make_shared<const std::vector<Payload>>(std::move(elems))) {}

    Kind kind() const { return static_cast<Kind>(repr_.index()); }

    const Value* as_value() const { return std::get_if<Value>(&repr_); }
    const SignedMessage* as_signed() const {
        auto* p = std::get_if<std::shared_ptr<const SignedMessage>>(&repr_);
        return p ? p->get() : nullptr;
    }
    const std::vector<Payload>* as_list() const {
        auto* p = std::get_if<std::shared_ptr<const std::vector<Payload>>>(&repr_);
        return p ? p->get() : nullptr;
    }

    std::strong_ordering operator<=>(const Payload& other) const;
    bool operator==(const Payload& other) const { return (*this <=> other) == 0; }

private:
    std::variant<Value, std::shared_ptr<const SignedMessage>,
                 std::shared_ptr<const std::vector<Payload>>>
        repr_;
};

// The authenticated triple <signer, round, content>. Equality is structural;
// forgery rules are enforced by the engine's ledger, not by this type.
struct SignedMessage {
    ProcessorId signer;
    Round round;
    Payload content;

    std::strong_ordering operator<=>(const SignedMessage& o) const {
        if (auto c = signer <=> o.signer; c != 0) return c;
        if (auto c = round <=> o.round; c != 0) return c;
        return content <=> o.content;
    }
    bool operator==(const SignedMessage& o) const { return (*this <=> o) == 0; }
};

inline Payload::Payload(SignedMessage m)
    : repr_(std::make_shared<const SignedMessage>(std::move(m))) {}

inline std::strong_ordering Payload::operator<=>(const Payload& other) const {
    if (repr_.index() != other.repr_.index())
        return repr_.index() <=> other.repr_.index();
    switch (kind()) {
    case Kind::value:
        return *as_value() <=> *other.as_value();
    case Kind::signed_message: {
        auto a = as_signed();
        auto b = other.as_signed();
        if (a == b) return std::strong_ordering::equal;
        return *a <=> *b;
    }
    case Kind::list: {
        auto a = as_list();
        auto b = other.as_list();
        if (a == b) return std::strong_ordering::equal;
        auto ita = a->begin();
        auto itb = b->begin();
        for (; ita != a->end() && itb != b->end(); ++ita, ++itb) {
            if (auto c = *ita <=> *itb; c != 0) return c;
        }
        return a->size() <=> b->size();
    }
    }
    return std::strong_ordering::equal;
}

inline Payload value_payload(std::string_view s) { return Payload{Value::from_string(s)}; }

inline Payload sign(ProcessorId signer, Round r, Payload content) {
    return Payload{SignedMessage{signer, r, std::move(content)}};
}

// Visits every signed message occurring in `p` at any nesting depth,
// including signed messages inside signed content.
template <typename F>
void for_each_signed(const Payload& p, F&& fn) {
    if (const SignedMessage* m = p.as_signed()) {
        fn(*m);
        for_each_signed(m->content, fn);
    } else if (const auto* l = p.as_list()) {
        for (const Payload& e : *l) for_each_signed(e, fn);
    }
}

}  // namespace iiab
