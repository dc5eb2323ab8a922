#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "mdstyle/common.hpp"
#include "mdstyle/image.hpp"

namespace mdstyle {

/// Complex baseband time series.
struct IQSignal {
    std::vector<std::complex<double>> samples;
    double sample_rate_hz = 0.0;

    /// Throws InvalidArgument on empty/non-finite samples or a non-positive rate.
    void validate() const;
};

enum class Window { hann, rect };

struct StftConfig {
    int window_len = 256;
    int hop = 128;
    int fft_len = 512;
    Window window = Window::hann;

    void validate() const;
};

inline constexpr double kDbFloor = -120.0;
inline constexpr double kPowerEpsilon = 1e-12;

/// Power spectrogram in dB. Rows are frequency (fft-shifted, lowest
/// frequency first), columns are time frames.
struct Spectrogram {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;  // row-major
    double time_step_s = 0.0;
    double freq_step_hz = 0.0;
    double freq_origin_hz = 0.0;  // centre frequency of row 0

    double operator()(std::size_t r, std::size_t c) const noexcept { return values[r * cols + c]; }
    double& operator()(std::size_t r, std::size_t c) noexcept { return values[r * cols + c]; }
    double row_frequency(std::size_t r) const noexcept {
        return freq_origin_hz + freq_step_hz * static_cast<double>(r);
    }
    /// Row whose centre frequency is closest to `hz`.
    std::size_t nearest_row(double hz) const noexcept;
};

/// Short-time Fourier transform with dB power output, floored at kDbFloor.
/// Throws InvalidArgument("insufficient samples") for signals shorter than
/// one window.
Spectrogram stft(const IQSignal& signal, const StftConfig& cfg);

/// Keeps only rows with |f| <= max_abs_hz. Throws if no row survives.
Spectrogram crop_band(const Spectrogram& spec, double max_abs_hz);

/// Linear map [db_min, db_max] -> [0,1] with clamping.
ImageGrid to_image(const Spectrogram& spec, double db_min, double db_max);

/// Bilinear resampling using half-pixel sample centres.
ImageGrid resize_bilinear(const ImageGrid& img, int out_rows, int out_cols);

// --- SGRM container -------------------------------------------------------

enum class SgrmErrorKind { io, bad_magic, bad_version, truncated, bad_pixel };

class SgrmError : public Error {
public:
    SgrmError(SgrmErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
    SgrmErrorKind kind() const noexcept { return kind_; }

private:
    SgrmErrorKind kind_;
};

inline constexpr std::uint32_t kSgrmVersion = 1;
inline constexpr std::size_t kSgrmHeaderBytes = 16;

std::vector<std::uint8_t> encode_sgram(const ImageGrid& img);
ImageGrid decode_sgram(std::span<const std::uint8_t> bytes);

void save_sgram(const ImageGrid& img, const std::filesystem::path& path);
ImageGrid load_sgram(const std::filesystem::path& path);

/// Binary 8-bit graymap (P5), pixel = round(255 * value).
void write_pgm(const ImageGrid& img, const std::filesystem::path& path);

}  // namespace mdstyle
