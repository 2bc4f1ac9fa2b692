#include "kgprop/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace kgprop::fft {
namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

class Buffer {
 public:
  explicit Buffer(int n)
      : n_(n), data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {}
  ~Buffer() { fftw_free(data_); }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  fftw_complex* data() { return data_; }
  int size() const { return n_; }

 private:
  int n_;
  fftw_complex* data_;
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Buffer scratch(n);
  PlanPair p;
  p.fwd = fftw_plan_dft_1d(n, scratch.data(), scratch.data(), FFTW_FORWARD, FFTW_ESTIMATE);
  p.bwd = fftw_plan_dft_1d(n, scratch.data(), scratch.data(), FFTW_BACKWARD, FFTW_ESTIMATE);
  return cache.emplace(n, p).first->second;
}

// One aligned scratch buffer per thread and size; plans are executed on it with
// the new-array interface so a single plan serves every thread.
fftw_complex* scratch_for(int n) {
  thread_local std::map<int, std::unique_ptr<Buffer>> buffers;
  auto& slot = buffers[n];
  if (!slot) slot = std::make_unique<Buffer>(n);
  return slot->data();
}

void run(cplx* data, int n, bool fwd) {
  if (n <= 0) return;
  const PlanPair& p = plans_for(n);
  fftw_complex* buf = scratch_for(n);
  std::memcpy(buf, data, sizeof(fftw_complex) * n);
  fftw_execute_dft(fwd ? p.fwd : p.bwd, buf, buf);
  std::memcpy(static_cast<void*>(data), buf, sizeof(fftw_complex) * n);
}

}  // namespace

void forward_inplace(cplx* data, int n) { run(data, n, true); }
void backward_inplace(cplx* data, int n) { run(data, n, false); }

CVec forward(const CVec& in) {
  CVec out = in;
  run(out.data(), static_cast<int>(out.size()), true);
  return out;
}

CVec backward(const CVec& in) {
  CVec out = in;
  run(out.data(), static_cast<int>(out.size()), false);
  return out;
}

}  // namespace kgprop::fft
