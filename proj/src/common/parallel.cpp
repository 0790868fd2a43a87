#include "skelact/common/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace skelact {

namespace {

int g_thread_count = 0;

int resolve_thread_count() {
    if (g_thread_count > 0) return g_thread_count;
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 4u));
}

// Persistent pool; workers sleep on a condition variable between jobs.
class Pool {
public:
    explicit Pool(int workers) : workers_(workers) {
        for (int w = 1; w < workers_; ++w)
            threads_.emplace_back([this, w] { worker_loop(w); });
    }

    ~Pool() {
        {
            std::lock_guard<std::mutex> lock(mu_);
            shutdown_ = true;
        }
        cv_start_.notify_all();
        for (auto& t : threads_) t.join();
    }

    int workers() const { return workers_; }

    void run(std::size_t n, const std::function<void(std::size_t)>& fn) {
        if (n == 0) return;
        const int active = static_cast<int>(
            std::min<std::size_t>(static_cast<std::size_t>(workers_), n));
        // Nested calls from inside a task run serially on the calling thread.
        if (active <= 1 || t_in_task) {
            for (std::size_t i = 0; i < n; ++i) fn(i);
            return;
        }
        {
            std::lock_guard<std::mutex> lock(mu_);
            job_fn_ = &fn;
            job_n_ = n;
            job_active_ = active;
            pending_ = active - 1;
            error_ = nullptr;
            ++generation_;
        }
        cv_start_.notify_all();
        run_slice(0);
        {
            std::unique_lock<std::mutex> lock(mu_);
            cv_done_.wait(lock, [this] { return pending_ == 0; });
            job_fn_ = nullptr;
            if (error_) std::rethrow_exception(error_);
        }
    }

private:
    void run_slice(int slot) {
        // Static partition: slot s owns [s*n/active, (s+1)*n/active).
        const std::size_t n = job_n_;
        const std::size_t active = static_cast<std::size_t>(job_active_);
        const std::size_t lo = n * static_cast<std::size_t>(slot) / active;
        const std::size_t hi = n * (static_cast<std::size_t>(slot) + 1) / active;
        t_in_task = true;
        try {
            for (std::size_t i = lo; i < hi; ++i) (*job_fn_)(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu_);
            if (!error_) error_ = std::current_exception();
        }
        t_in_task = false;
    }

    static thread_local bool t_in_task;

    void worker_loop(int slot) {
        std::uint64_t seen = 0;
        for (;;) {
            {
                std::unique_lock<std::mutex> lock(mu_);
                cv_start_.wait(lock, [this, &seen] {
                    return shutdown_ || generation_ != seen;
                });
                if (shutdown_) return;
                seen = generation_;
                if (slot >= job_active_) {
                    continue;  // fewer tasks than workers this round
                }
            }
            run_slice(slot);
            {
                std::lock_guard<std::mutex> lock(mu_);
                if (--pending_ == 0) cv_done_.notify_all();
            }
        }
    }

    int workers_;
    std::vector<std::thread> threads_;
    std::mutex mu_;
    std::condition_variable cv_start_;
    std::condition_variable cv_done_;
    bool shutdown_ = false;
    std::uint64_t generation_ = 0;
    const std::function<void(std::size_t)>* job_fn_ = nullptr;
    std::size_t job_n_ = 0;
    int job_active_ = 0;
    int pending_ = 0;
    std::exception_ptr error_;
};

thread_local bool Pool::t_in_task = false;

Pool& pool() {
    static Pool instance(resolve_thread_count());
    return instance;
}

}  // namespace

void set_thread_count(int n) { g_thread_count = n; }

int thread_count() { return pool().workers(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    pool().run(n, fn);
}

}  // namespace skelact
