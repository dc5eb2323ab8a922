#include "mdstyle/spectra.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <mutex>
#include <numbers>

namespace mdstyle {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

class FftPlan {
public:
    explicit FftPlan(int n) : n_(n) {
        in_ = fftw_alloc_complex(static_cast<std::size_t>(n));
        out_ = fftw_alloc_complex(static_cast<std::size_t>(n));
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_1d(n, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~FftPlan() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::complex<double>* input() noexcept { return reinterpret_cast<std::complex<double>*>(in_); }
    const std::complex<double>* output() const noexcept {
        return reinterpret_cast<const std::complex<double>*>(out_);
    }
    void execute() noexcept { fftw_execute(plan_); }
    int size() const noexcept { return n_; }

private:
    int n_;
    fftw_complex* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

std::vector<double> make_window(Window kind, int n) {
    std::vector<double> w(static_cast<std::size_t>(n), 1.0);
    if (kind == Window::hann) {
        for (int i = 0; i < n; ++i)
            w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
    }
    return w;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[off + i]) << (8 * i);
    return v;
}

}  // namespace

void IQSignal::validate() const {
    require(!samples.empty(), "IQ signal has no samples");
    require(std::isfinite(sample_rate_hz) && sample_rate_hz > 0.0, "sample rate must be > 0");
    for (const auto& s : samples)
        require(std::isfinite(s.real()) && std::isfinite(s.imag()), "IQ signal contains non-finite samples");
}

void StftConfig::validate() const {
    require(window_len > 0 && hop > 0 && fft_len > 0, "STFT sizes must be positive");
    require(hop <= window_len, "STFT hop must not exceed the window length");
    require(fft_len >= window_len, "FFT length must be >= window length");
    require(std::has_single_bit(static_cast<unsigned>(fft_len)), "FFT length must be a power of two");
}

std::size_t Spectrogram::nearest_row(double hz) const noexcept {
    const double idx = std::round((hz - freq_origin_hz) / freq_step_hz);
    if (idx <= 0.0) return 0;
    return std::min(rows - 1, static_cast<std::size_t>(idx));
}

Spectrogram stft(const IQSignal& signal, const StftConfig& cfg) {
    signal.validate();
    cfg.validate();
    const std::size_t len = signal.samples.size();
    const auto win = static_cast<std::size_t>(cfg.window_len);
    if (len < win) throw InvalidArgument("insufficient samples");

    const std::size_t nfft = static_cast<std::size_t>(cfg.fft_len);
    const std::size_t hop = static_cast<std::size_t>(cfg.hop);
    const std::size_t frames = (len - win) / hop + 1;
    const auto window = make_window(cfg.window, cfg.window_len);

    Spectrogram out;
    out.rows = nfft;
    out.cols = frames;
    out.values.assign(nfft * frames, kDbFloor);
    out.time_step_s = static_cast<double>(hop) / signal.sample_rate_hz;
    out.freq_step_hz = signal.sample_rate_hz / static_cast<double>(nfft);
    out.freq_origin_hz = -static_cast<double>(nfft / 2) * out.freq_step_hz;

    FftPlan plan(cfg.fft_len);
    for (std::size_t f = 0; f < frames; ++f) {
        auto* in = plan.input();
        const std::size_t start = f * hop;
        for (std::size_t i = 0; i < win; ++i) in[i] = signal.samples[start + i] * window[i];
        for (std::size_t i = win; i < nfft; ++i) in[i] = 0.0;
        plan.execute();
        const auto* X = plan.output();
        for (std::size_t r = 0; r < nfft; ++r) {
            const std::size_t k = (r + nfft / 2) % nfft;
            const double db = 10.0 * std::log10(std::norm(X[k]) + kPowerEpsilon);
            out(r, f) = std::max(db, kDbFloor);
        }
    }
    return out;
}

Spectrogram crop_band(const Spectrogram& spec, double max_abs_hz) {
    std::size_t first = spec.rows, last = 0;
    for (std::size_t r = 0; r < spec.rows; ++r) {
        if (std::abs(spec.row_frequency(r)) <= max_abs_hz + 1e-9) {
            first = std::min(first, r);
            last = r;
        }
    }
    require(first < spec.rows, "frequency band excludes every row");

    Spectrogram out;
    out.rows = last - first + 1;
    out.cols = spec.cols;
    out.time_step_s = spec.time_step_s;
    out.freq_step_hz = spec.freq_step_hz;
    out.freq_origin_hz = spec.row_frequency(first);
    out.values.assign(spec.values.begin() + static_cast<std::ptrdiff_t>(first * spec.cols),
                      spec.values.begin() + static_cast<std::ptrdiff_t>((last + 1) * spec.cols));
    return out;
}

ImageGrid to_image(const Spectrogram& spec, double db_min, double db_max) {
    if (!(db_max > db_min)) throw InvalidArgument("db_max must exceed db_min");
    require(spec.rows >= 1 && spec.cols >= 1, "spectrogram is empty");
    const double span = db_max - db_min;
    std::vector<float> px(spec.values.size());
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = ImageGrid::clamp01((spec.values[i] - db_min) / span);
    return ImageGrid(spec.rows, spec.cols, std::move(px));
}

ImageGrid resize_bilinear(const ImageGrid& img, int out_rows, int out_cols) {
    if (out_rows < 1 || out_cols < 1) throw InvalidArgument("resize target must be >= 1x1");
    const auto R = static_cast<std::size_t>(out_rows);
    const auto C = static_cast<std::size_t>(out_cols);
    if (R == img.rows() && C == img.cols()) return img;

    // Source coordinate of output centre i: (i + 0.5) * in/out - 0.5, clamped to the grid.
    auto axis = [](std::size_t out_n, std::size_t in_n) {
        struct Tap { std::size_t i0, i1; double w1; };
        std::vector<Tap> taps(out_n);
        const double scale = static_cast<double>(in_n) / static_cast<double>(out_n);
        for (std::size_t i = 0; i < out_n; ++i) {
            double x = (static_cast<double>(i) + 0.5) * scale - 0.5;
            x = std::clamp(x, 0.0, static_cast<double>(in_n - 1));
            const auto i0 = static_cast<std::size_t>(std::floor(x));
            const std::size_t i1 = std::min(i0 + 1, in_n - 1);
            taps[i] = {i0, i1, x - static_cast<double>(i0)};
        }
        return taps;
    };
    const auto rt = axis(R, img.rows());
    const auto ct = axis(C, img.cols());

    std::vector<float> px(R * C);
    for (std::size_t r = 0; r < R; ++r) {
        for (std::size_t c = 0; c < C; ++c) {
            const double top = (1.0 - ct[c].w1) * img(rt[r].i0, ct[c].i0) + ct[c].w1 * img(rt[r].i0, ct[c].i1);
            const double bot = (1.0 - ct[c].w1) * img(rt[r].i1, ct[c].i0) + ct[c].w1 * img(rt[r].i1, ct[c].i1);
            px[r * C + c] = ImageGrid::clamp01((1.0 - rt[r].w1) * top + rt[r].w1 * bot);
        }
    }
    return ImageGrid(R, C, std::move(px));
}

std::vector<std::uint8_t> encode_sgram(const ImageGrid& img) {
    std::vector<std::uint8_t> out;
    out.reserve(kSgrmHeaderBytes + 4 * img.size());
    for (char ch : {'S', 'G', 'R', 'M'}) out.push_back(static_cast<std::uint8_t>(ch));
    put_u32(out, kSgrmVersion);
    put_u32(out, static_cast<std::uint32_t>(img.rows()));
    put_u32(out, static_cast<std::uint32_t>(img.cols()));
    for (float p : img.pixels()) put_u32(out, std::bit_cast<std::uint32_t>(p));
    return out;
}

ImageGrid decode_sgram(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "SGRM", 4) != 0)
        throw SgrmError(SgrmErrorKind::bad_magic, "bad magic");
    if (bytes.size() < kSgrmHeaderBytes) throw SgrmError(SgrmErrorKind::truncated, "truncated header");
    const std::uint32_t version = get_u32(bytes, 4);
    if (version != kSgrmVersion)
        throw SgrmError(SgrmErrorKind::bad_version, "unsupported SGRM version " + std::to_string(version));
    const std::uint64_t rows = get_u32(bytes, 8);
    const std::uint64_t cols = get_u32(bytes, 12);
    if (rows == 0 || cols == 0) throw SgrmError(SgrmErrorKind::truncated, "empty SGRM grid");
    if (bytes.size() != kSgrmHeaderBytes + 4 * rows * cols)
        throw SgrmError(SgrmErrorKind::truncated, "truncated payload");

    std::vector<float> px(rows * cols);
    for (std::size_t i = 0; i < px.size(); ++i) {
        const float v = std::bit_cast<float>(get_u32(bytes, kSgrmHeaderBytes + 4 * i));
        if (std::isnan(v)) throw SgrmError(SgrmErrorKind::bad_pixel, "NaN pixel");
        if (!(v >= 0.0f && v <= 1.0f)) throw SgrmError(SgrmErrorKind::bad_pixel, "pixel outside [0,1]");
        px[i] = v;
    }
    return ImageGrid(rows, cols, std::move(px));
}

void save_sgram(const ImageGrid& img, const std::filesystem::path& path) {
    const auto bytes = encode_sgram(img);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw SgrmError(SgrmErrorKind::io, "cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw SgrmError(SgrmErrorKind::io, "write failed: " + path.string());
}

ImageGrid load_sgram(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw SgrmError(SgrmErrorKind::io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_sgram(bytes);
}

void write_pgm(const ImageGrid& img, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << "P5\n" << img.cols() << ' ' << img.rows() << "\n255\n";
    std::vector<char> row(img.size());
    for (std::size_t i = 0; i < img.size(); ++i)
        row[i] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * img.pixels()[i])));
    f.write(row.data(), static_cast<std::streamsize>(row.size()));
}

}  // namespace mdstyle
