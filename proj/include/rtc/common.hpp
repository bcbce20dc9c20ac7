#pragma once

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rtc {

using Participant = std::string;
using Label = std::string;
using RecVar = std::string;

// Natural-number priority with a distinct top element "omega".
// omega is greater than every natural and absorbs addition.
class Priority {
public:
    Priority() : omega_(false), v_(0) {}

    static Priority omega() {
        Priority p;
        p.omega_ = true;
        return p;
    }
    static Priority nat(std::uint64_t n) {
        Priority p;
        p.v_ = n;
        return p;
    }

    bool is_omega() const { return omega_; }

    std::uint64_t value() const {
        if (omega_)
            throw std::logic_error("Priority::value: omega has no finite value");
        return v_;
    }

    Priority plus(std::uint64_t t) const {
        if (omega_)
            return *this;
        if (v_ > UINT64_MAX - t)
            throw std::overflow_error("Priority::plus: overflow");
        return nat(v_ + t);
    }

    std::string str() const { return omega_ ? "omega" : std::to_string(v_); }

    friend bool operator==(const Priority& a, const Priority& b) {
        if (a.omega_ != b.omega_)
            return false;
        return a.omega_ || a.v_ == b.v_;
    }
    friend bool operator!=(const Priority& a, const Priority& b) { return !(a == b); }
    friend bool operator<(const Priority& a, const Priority& b) {
        if (a.omega_)
            return false;
        if (b.omega_)
            return true;
        return a.v_ < b.v_;
    }
    friend bool operator<=(const Priority& a, const Priority& b) { return a == b || a < b; }

    static Priority min(const Priority& a, const Priority& b) { return a < b ? a : b; }

private:
    bool omega_;
    std::uint64_t v_;
};

// A channel endpoint: a globally unique id plus a display hint.
// Identity (equality, ordering, hashing) is the id alone.
struct Endpoint {
    std::uint64_t id = 0;
    std::string hint;

    friend bool operator==(const Endpoint& a, const Endpoint& b) { return a.id == b.id; }
    friend bool operator!=(const Endpoint& a, const Endpoint& b) { return a.id != b.id; }
    friend bool operator<(const Endpoint& a, const Endpoint& b) { return a.id < b.id; }
};

// Fresh-name generator. The one stateful object in the core; internally
// synchronized so values built on different threads stay distinct.
class NameGen {
public:
    Endpoint fresh(std::string hint) { return Endpoint{next_.fetch_add(1), std::move(hint)}; }

private:
    std::atomic<std::uint64_t> next_{1};
};

// Process-wide generator: endpoints minted anywhere in one run never collide.
NameGen& names();

struct SourceSpan {
    std::string file;
    int line = 0;
    int column = 0;
    int length = 0;

    bool known() const { return line > 0; }
    std::string str() const {
        if (!known())
            return file.empty() ? "<unknown>" : file;
        return (file.empty() ? std::string("<input>") : file) + ":" + std::to_string(line) + ":" +
               std::to_string(column);
    }
};

} // namespace rtc
