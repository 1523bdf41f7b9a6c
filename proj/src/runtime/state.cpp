#include "oli/runtime.hpp"

namespace oli::runtime {

ValueTree SessionState::read(const Path& path) const {
    std::lock_guard lock(mutex_);
    const ValueTree* node = find_path(root_, path);
    return node ? *node : ValueTree{};
}

BasicValue SessionState::read_root(const Path& path) const {
    std::lock_guard lock(mutex_);
    const ValueTree* node = find_path(root_, path);
    return node ? node->root() : BasicValue{};
}

bool SessionState::is_defined(const Path& path) const {
    std::lock_guard lock(mutex_);
    const ValueTree* node = find_path(root_, path);
    return node && !node->empty();
}

void SessionState::assign_root(const Path& path, BasicValue value) {
    std::lock_guard lock(mutex_);
    ensure_path(root_, path).set_root(std::move(value));
}

void SessionState::assign_tree(const Path& path, ValueTree value) {
    std::lock_guard lock(mutex_);
    ensure_path(root_, path) = std::move(value);
}

ValueTree SessionState::snapshot() const {
    std::lock_guard lock(mutex_);
    return root_;
}

void Inbox::push(Inbound in) {
    {
        std::lock_guard lock(mutex_);
        queue_.push_back(std::move(in));
    }
    cv_.notify_all();
}

void Inbox::push_front(Inbound in) {
    {
        std::lock_guard lock(mutex_);
        queue_.push_front(std::move(in));
    }
    cv_.notify_all();
}

void Inbox::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    cv_.notify_all();
}

template <class Pred>
Inbound Inbox::take_if(Pred&& accept) {
    std::unique_lock lock(mutex_);
    for (;;) {
        for (auto it = queue_.begin(); it != queue_.end(); ++it) {
            if (accept(it->msg.operation)) {
                Inbound in = std::move(*it);
                queue_.erase(it);
                return in;
            }
        }
        if (closed_) throw ChannelClosed(close_reason_);
        if (pull_ && !reading_) {
            // Become the reader; other takers wait for what we pull.
            reading_ = true;
            lock.unlock();
            try {
                Inbound in = pull_();
                lock.lock();
                reading_ = false;
                queue_.push_back(std::move(in));
            } catch (const std::exception& e) {
                lock.lock();
                reading_ = false;
                closed_ = true;
                close_reason_ = e.what();
            }
            cv_.notify_all();
            continue;
        }
        cv_.wait(lock);
    }
}

Inbound Inbox::take(const std::set<std::string>& ops) {
    return take_if([&](const std::string& op) { return ops.count(op) != 0; });
}

Inbound Inbox::take_any() {
    return take_if([](const std::string&) { return true; });
}

} // namespace oli::runtime
