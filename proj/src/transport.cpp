#include "dcop/transport.hpp"

namespace dcop {

InProcTransport::InProcTransport(std::size_t num_agents, bool blocking) : blocking_(blocking) {
    boxes_.reserve(num_agents);
    for (std::size_t i = 0; i < num_agents; ++i) boxes_.push_back(std::make_unique<Mailbox>());
}

void InProcTransport::send(DpopMessage msg) {
    if (msg.to < 0 || static_cast<std::size_t>(msg.to) >= boxes_.size())
        throw ProtocolViolationError("send to unknown agent");
    switch (msg.kind) {
        case DpopMessage::Kind::Util:
            util_messages_.fetch_add(1, std::memory_order_relaxed);
            rows_sent_.fetch_add(static_cast<std::int64_t>(std::get<UtilPayload>(msg.payload).table.row_count()),
                                 std::memory_order_relaxed);
            break;
        case DpopMessage::Kind::Value:
            value_messages_.fetch_add(1, std::memory_order_relaxed);
            break;
        case DpopMessage::Kind::Halt:
            break;
    }
    Mailbox& box = *boxes_[static_cast<std::size_t>(msg.to)];
    {
        std::lock_guard<std::mutex> lock(box.mutex);
        box.queue.push_back(std::move(msg));
    }
    box.ready.notify_one();
}

DpopMessage InProcTransport::receive(AgentIndex agent) {
    if (agent < 0 || static_cast<std::size_t>(agent) >= boxes_.size())
        throw ProtocolViolationError("receive for unknown agent");
    Mailbox& box = *boxes_[static_cast<std::size_t>(agent)];
    std::unique_lock<std::mutex> lock(box.mutex);
    if (blocking_) {
        box.ready.wait(lock, [&] { return !box.queue.empty() || cancelled_.load(); });
        if (box.queue.empty()) throw CancelledError("receive cancelled");
    } else if (box.queue.empty()) {
        throw ProtocolViolationError("receive on an empty mailbox under the sequential scheduler");
    }
    DpopMessage msg = std::move(box.queue.front());
    box.queue.pop_front();
    return msg;
}

void InProcTransport::cancel_all() {
    cancelled_.store(true);
    for (auto& box : boxes_) {
        std::lock_guard<std::mutex> lock(box->mutex);
        box->ready.notify_all();
    }
}

}  // namespace dcop
