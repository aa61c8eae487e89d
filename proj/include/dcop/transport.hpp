#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <variant>
#include <vector>

#include "dcop/model.hpp"
#include "dcop/table.hpp"

namespace dcop {

struct UtilPayload {
    UtilTable table;
};

struct ValuePayload {
    std::vector<std::pair<VarIndex, Value>> bindings;  // the receiver's separator, fully bound
};

// Terminal notification: the sender's component is infeasible and the VALUE
// phase will not happen below it.
struct HaltPayload {};

struct DpopMessage {
    enum class Kind { Util, Value, Halt };

    Kind kind = Kind::Util;
    AgentIndex from = kNoAgent;
    AgentIndex to = kNoAgent;
    std::int64_t send_clock = 0;  // sender's simulated clock at send time
    std::variant<UtilPayload, ValuePayload, HaltPayload> payload;
};

// Delivery contract: reliable, unbounded buffering, FIFO per sender-receiver
// pair. Messages are never dropped, duplicated or reordered within a pair.
class Transport {
public:
    virtual ~Transport() = default;
    virtual void send(DpopMessage msg) = 0;
    virtual DpopMessage receive(AgentIndex agent) = 0;
};

// One locked mailbox per agent. With blocking receives the caller sleeps
// until a message or cancel_all() arrives; non-blocking mode serves the
// sequential scheduler, where a well-ordered schedule guarantees the mailbox
// is never empty on receive and an empty one is a protocol bug.
class InProcTransport final : public Transport {
public:
    InProcTransport(std::size_t num_agents, bool blocking);

    void send(DpopMessage msg) override;
    DpopMessage receive(AgentIndex agent) override;

    // Wakes every blocked receiver; they throw CancelledError.
    void cancel_all();

    std::int64_t util_messages() const noexcept { return util_messages_.load(); }
    std::int64_t value_messages() const noexcept { return value_messages_.load(); }
    std::int64_t rows_sent() const noexcept { return rows_sent_.load(); }

private:
    struct Mailbox {
        std::mutex mutex;
        std::condition_variable ready;
        std::deque<DpopMessage> queue;
    };

    std::vector<std::unique_ptr<Mailbox>> boxes_;
    bool blocking_;
    std::atomic<bool> cancelled_{false};
    std::atomic<std::int64_t> util_messages_{0};
    std::atomic<std::int64_t> value_messages_{0};
    std::atomic<std::int64_t> rows_sent_{0};
};

}  // namespace dcop
