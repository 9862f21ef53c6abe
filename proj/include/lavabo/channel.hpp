// Copyright 2026 The lavabo Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LAVABO_CHANNEL_HPP
#define LAVABO_CHANNEL_HPP

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include "lavabo/error.hpp"
#include "lavabo/space.hpp"

namespace lavabo {

/// Unbounded multi-producer multi-consumer FIFO that can be closed.
/// receive() blocks until a message arrives or the channel is closed and drained.
template <typename T>
class Channel {
public:
    /// Returns false if the channel is closed.
    bool send(T value) {
        {
            std::lock_guard lock(mutex_);
            if (closed_) return false;
            queue_.push_back(std::move(value));
        }
        ready_.notify_one();
        return true;
    }

    std::optional<T> receive() {
        std::unique_lock lock(mutex_);
        ready_.wait(lock, [&] { return closed_ || !queue_.empty(); });
        if (queue_.empty()) return std::nullopt;
        T value = std::move(queue_.front());
        queue_.pop_front();
        return value;
    }

    void close() {
        {
            std::lock_guard lock(mutex_);
            closed_ = true;
        }
        ready_.notify_all();
    }

    bool closed() const {
        std::lock_guard lock(mutex_);
        return closed_;
    }

private:
    mutable std::mutex mutex_;
    std::condition_variable ready_;
    std::deque<T> queue_;
    bool closed_ = false;
};

/// Solver -> black box.
struct SuggestMessage {
    std::uint64_t request_id = 0;
    ParamVector params;
};

/// Black box -> solver. `params` echoes the request; `error` is set for
/// protocol failures, in which case `score` is meaningless.
struct ResultMessage {
    std::uint64_t request_id = 0;
    ParamVector params;
    double score = 0.0;
    std::optional<std::string> error;
};

using Objective = std::function<double(const ParamVector&)>;

/// Black-box side of the channel contract: answers each suggestion in
/// arrival order until the suggest channel closes.
///
/// When `space` is given, requests outside it are rejected with an error
/// reply; an exception thrown by the objective is reported the same way.
/// Serving continues after an error reply.
inline void serve_blackbox(const Objective& objective, Channel<SuggestMessage>& suggestions,
                           Channel<ResultMessage>& results, const SearchSpace* space = nullptr) {
    while (auto request = suggestions.receive()) {
        ResultMessage reply;
        reply.request_id = request->request_id;
        reply.params = request->params;
        try {
            if (space) space->validate(request->params);
            reply.score = objective(request->params);
        } catch (const std::exception& e) {
            reply.error = e.what();
        }
        if (!results.send(std::move(reply))) return;
    }
}

/// Solver side: one in-flight request at a time.
class ChannelClient {
public:
    ChannelClient(Channel<SuggestMessage>& suggestions, Channel<ResultMessage>& results)
        : suggestions_(&suggestions), results_(&results) {}

    double evaluate(const ParamVector& params) {
        const auto id = next_id_++;
        if (!suggestions_->send({id, params}))
            throw Error(ErrorKind::Transport, "suggest channel closed before request " + std::to_string(id));
        auto reply = results_->receive();
        if (!reply) throw Error(ErrorKind::Transport, "result channel closed while awaiting request " + std::to_string(id));
        if (reply->request_id != id)
            throw Error(ErrorKind::Protocol, "reply id " + std::to_string(reply->request_id) + " does not match request " +
                                                 std::to_string(id));
        if (reply->error) throw Error(ErrorKind::Protocol, "black box rejected request: " + *reply->error);
        if (!(reply->params == params))
            throw Error(ErrorKind::Protocol, "reply does not echo the suggested parameters");
        return reply->score;
    }

    double operator()(const ParamVector& params) { return evaluate(params); }

private:
    Channel<SuggestMessage>* suggestions_;
    Channel<ResultMessage>* results_;
    std::uint64_t next_id_ = 0;
};

/// Runs an objective on its own thread behind a channel pair; the solver
/// talks to it through objective(). Closing happens on destruction.
class BlackBoxProcess {
public:
    explicit BlackBoxProcess(Objective objective, std::optional<SearchSpace> space = std::nullopt)
        : objective_(std::move(objective)), space_(std::move(space)), client_(suggestions_, results_) {
        worker_ = std::thread([this] {
            serve_blackbox(objective_, suggestions_, results_, space_ ? &*space_ : nullptr);
            results_.close();
        });
    }

    BlackBoxProcess(const BlackBoxProcess&) = delete;
    BlackBoxProcess& operator=(const BlackBoxProcess&) = delete;

    ~BlackBoxProcess() {
        suggestions_.close();
        if (worker_.joinable()) worker_.join();
    }

    /// Not thread-safe; the solver keeps one request in flight.
    Objective objective() {
        return [this](const ParamVector& p) { return client_.evaluate(p); };
    }

private:
    Objective objective_;
    std::optional<SearchSpace> space_;
    Channel<SuggestMessage> suggestions_;
    Channel<ResultMessage> results_;
    ChannelClient client_;
    std::thread worker_;
};

}  // namespace lavabo

#endif  // LAVABO_CHANNEL_HPP
