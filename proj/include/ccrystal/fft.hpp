#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace ccrystal {

// In-place complex 1D transform on an owned, FFTW-aligned buffer.
// Plans use FFTW_ESTIMATE so that results are reproducible run to run.
// Plan creation is serialized internally; execution is thread safe for
// distinct Fft objects.
class Fft {
public:
    explicit Fft(std::size_t n);
    ~Fft();

    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&&) noexcept;
    Fft& operator=(Fft&&) noexcept;

    std::size_t size() const { return n_; }
    std::span<std::complex<double>> data() { return {buffer_, n_}; }
    std::span<const std::complex<double>> data() const { return {buffer_, n_}; }

    // Unnormalized: backward(forward(f)) == n * f.
    void forward();
    void backward();

private:
    std::size_t n_ = 0;
    std::complex<double>* buffer_ = nullptr;
    void* forward_plan_ = nullptr;
    void* backward_plan_ = nullptr;
};

} // namespace ccrystal
