/*******************************************************************************
 * MIT License
 *
 * This file is part of nlevel.
 *
 * Copyright (C) 2026 nlevel contributors
 *
 * Permission is hereby granted, free of charge, to any person obtaining a copy
 * of this software and associated documentation files (the "Software"), to deal
 * in the Software without restriction, including without limitation the rights
 * to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
 * copies of the Software, and to permit persons to whom the Software is
 * furnished to do so, subject to the following conditions:
 *
 * The above copyright notice and this permission notice shall be included in all
 * copies or substantial portions of the Software.
 *
 * THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
 * IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
 * FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
 * AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
 * LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
 * OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
 * SOFTWARE.
 ******************************************************************************/

#pragma once

#include <atomic>
#include <memory>
#include <thread>

namespace nlevel {

// Test-and-set spinlock. Critical sections guarded by it are a handful of
// array edits, so spinning beats parking.
class SpinLock {
 public:
  void lock() noexcept {
    int spins = 0;
    while (flag_.test_and_set(std::memory_order_acquire)) {
      if (++spins > 64) {
        std::this_thread::yield();
        spins = 0;
      }
    }
  }
  bool try_lock() noexcept { return !flag_.test_and_set(std::memory_order_acquire); }
  void unlock() noexcept { flag_.clear(std::memory_order_release); }

 private:
  std::atomic_flag flag_ = ATOMIC_FLAG_INIT;
};

// Fixed-size array of spinlocks, one per vertex or net.
class SpinLockArray {
 public:
  SpinLockArray() = default;
  explicit SpinLockArray(std::size_t n) : size_(n), locks_(std::make_unique<SpinLock[]>(n)) {}

  SpinLock& operator[](std::size_t i) noexcept { return locks_[i]; }
  std::size_t size() const noexcept { return size_; }

 private:
  std::size_t size_ = 0;
  std::unique_ptr<SpinLock[]> locks_;
};

// Relaxed atomic access to plain array slots that are read racily by
// heuristics (rating) while being edited under a lock elsewhere.
template <typename T>
inline T load_relaxed(const T& slot) noexcept {
  return std::atomic_ref<T>(const_cast<T&>(slot)).load(std::memory_order_relaxed);
}

template <typename T>
inline void store_relaxed(T& slot, T value) noexcept {
  std::atomic_ref<T>(slot).store(value, std::memory_order_relaxed);
}

template <typename T>
inline T fetch_add_relaxed(T& slot, T delta) noexcept {
  return std::atomic_ref<T>(slot).fetch_add(delta, std::memory_order_relaxed);
}

}  // namespace nlevel
