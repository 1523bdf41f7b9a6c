#pragma once

#include <pthread.h>

#include <cstddef>
#include <functional>
#include <memory>
#include <system_error>
#include <utility>

namespace oli {

/// Joinable thread with a configurable stack size. Session bodies recurse
/// through the interpretation tree, so they need more than the default.
/// Joins on destruction.
class StackThread {
public:
    static constexpr std::size_t kDefaultStack = 64u * 1024 * 1024;

    StackThread() = default;

    explicit StackThread(std::function<void()> fn, std::size_t stack_size = kDefaultStack) {
        auto* heap_fn = new std::function<void()>(std::move(fn));
        pthread_attr_t attr;
        pthread_attr_init(&attr);
        pthread_attr_setstacksize(&attr, stack_size);
        int rc = pthread_create(&handle_, &attr, &StackThread::trampoline, heap_fn);
        pthread_attr_destroy(&attr);
        if (rc != 0) {
            delete heap_fn;
            throw std::system_error(rc, std::generic_category(), "pthread_create");
        }
        joinable_ = true;
    }

    StackThread(StackThread&& other) noexcept
        : handle_(other.handle_), joinable_(std::exchange(other.joinable_, false)) {}

    StackThread& operator=(StackThread&& other) noexcept {
        if (this != &other) {
            join();
            handle_ = other.handle_;
            joinable_ = std::exchange(other.joinable_, false);
        }
        return *this;
    }

    StackThread(const StackThread&) = delete;
    StackThread& operator=(const StackThread&) = delete;

    ~StackThread() { join(); }

    bool joinable() const noexcept { return joinable_; }

    void join() {
        if (joinable_) {
            pthread_join(handle_, nullptr);
            joinable_ = false;
        }
    }

private:
    static void* trampoline(void* arg) {
        std::unique_ptr<std::function<void()>> fn(static_cast<std::function<void()>*>(arg));
        (*fn)();
        return nullptr;
    }

    pthread_t handle_{};
    bool joinable_ = false;
};

} // namespace oli
