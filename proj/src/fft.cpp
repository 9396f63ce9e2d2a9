#include "ccrystal/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>
#include <utility>

namespace ccrystal {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

} // namespace

Fft::Fft(std::size_t n) : n_(n)
{
    buffer_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n));
    if (buffer_ == nullptr)
        throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    auto* raw = reinterpret_cast<fftw_complex*>(buffer_);
    forward_plan_ = fftw_plan_dft_1d(static_cast<int>(n), raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_plan_ = fftw_plan_dft_1d(static_cast<int>(n), raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft()
{
    if (buffer_ == nullptr)
        return;
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
    fftw_free(buffer_);
}

Fft::Fft(Fft&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      buffer_(std::exchange(other.buffer_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      backward_plan_(std::exchange(other.backward_plan_, nullptr))
{
}

Fft& Fft::operator=(Fft&& other) noexcept
{
    if (this != &other) {
        Fft tmp(std::move(other));
        std::swap(n_, tmp.n_);
        std::swap(buffer_, tmp.buffer_);
        std::swap(forward_plan_, tmp.forward_plan_);
        std::swap(backward_plan_, tmp.backward_plan_);
    }
    return *this;
}

void Fft::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }

void Fft::backward() { fftw_execute(static_cast<fftw_plan>(backward_plan_)); }

} // namespace ccrystal
