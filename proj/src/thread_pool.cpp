#include "pairclone/thread_pool.hpp"

#include <algorithm>
#include <exception>
#include <utility>

namespace pairclone {

ThreadPool::ThreadPool(std::size_t width)
{
    const std::size_t extra = std::max<std::size_t>(width, 1) - 1;
    workers_.reserve(extra);
    for (std::size_t i = 0; i < extra; ++i) workers_.emplace_back([this] { worker_loop(); });
}

ThreadPool::~ThreadPool()
{
    {
        std::lock_guard lock {mutex_};
        stop_ = true;
    }
    wake_.notify_all();
    for (auto& w : workers_) w.join();
}

void ThreadPool::drain()
{
    std::unique_lock lock {mutex_};
    while (next_ < job_size_) {
        const std::size_t i = next_++;
        const auto* job = job_;
        lock.unlock();
        try {
            (*job)(i);
        } catch (...) {
            lock.lock();
            if (!error_) error_ = std::current_exception();
            lock.unlock();
        }
        lock.lock();
        if (++finished_ == job_size_) done_.notify_all();
    }
}

void ThreadPool::worker_loop()
{
    std::size_t seen = 0;
    for (;;) {
        {
            std::unique_lock lock {mutex_};
            wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
            if (stop_) return;
            seen = generation_;
        }
        drain();
    }
}

void ThreadPool::parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn)
{
    if (n == 0) return;
    if (workers_.empty() || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    {
        std::lock_guard lock {mutex_};
        job_ = &fn;
        job_size_ = n;
        next_ = 0;
        finished_ = 0;
        error_ = nullptr;
        ++generation_;
    }
    wake_.notify_all();
    drain();
    std::unique_lock lock {mutex_};
    done_.wait(lock, [&] { return finished_ == job_size_; });
    job_ = nullptr;
    job_size_ = 0;
    if (error_) std::rethrow_exception(std::exchange(error_, nullptr));
}

} // namespace pairclone
