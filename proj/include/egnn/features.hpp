#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "egnn/common.hpp"

namespace egnn {

/// One multi-channel time-domain recording with a weak (recording-level)
/// class label that every derived window inherits.
struct Recording {
    std::string subject;
    std::string game;
    int label = 0;
    double sample_rate = 0.0;
    std::vector<std::string> channel_names;
    std::vector<std::vector<double>> channels;  // channel-major, equal lengths

    std::size_t samples() const { return channels.empty() ? 0 : channels.front().size(); }

    void validate() const {
        if (!(sample_rate > 0.0)) throw DataError("recording " + subject + ": bad sample rate");
        if (channels.empty()) throw DataError("recording " + subject + ": no channels");
        if (channel_names.size() != channels.size())
            throw DataError("recording " + subject + ": channel name/series mismatch");
        for (const auto& ch : channels) {
            if (ch.size() != channels.front().size())
                throw DataError("recording " + subject + ": unequal channel lengths");
        }
    }
};

struct Band {
    std::string name;
    double lo_hz;
    double hi_hz;
    bool closed_hi;  // include bins exactly at hi_hz

    bool contains(double f) const {
        return f >= lo_hz && (closed_hi ? f <= hi_hz : f < hi_hz);
    }
};

/// Clinical EEG band split. Edges touch, so lower edges are inclusive and
/// upper edges exclusive; Gamma closes at 64 Hz, the Nyquist bin of the
/// 128 Hz recordings this pipeline targets.
inline const std::vector<Band>& standard_bands() {
    static const std::vector<Band> bands = {
        {"Delta", 1.0, 4.0, false},  {"Theta", 4.0, 8.0, false}, {"Alpha", 8.0, 13.0, false},
        {"Beta", 13.0, 30.0, false}, {"Gamma", 30.0, 64.0, true},
    };
    return bands;
}

/// 14-channel headset montage in its conventional listing order. Odd
/// trailing digits sit over the left hemisphere, even over the right.
inline const std::vector<std::string>& standard_channels() {
    static const std::vector<std::string> names = {"Af3", "Af4", "F3", "F4", "F7", "F8", "Fc5",
                                                   "Fc6", "T7",  "T8", "P7", "P8", "O1",  "O2"};
    return names;
}

enum class Hemisphere { left, right };

inline Hemisphere hemisphere(const std::string& channel) {
    for (auto it = channel.rbegin(); it != channel.rend(); ++it) {
        if (*it >= '0' && *it <= '9') {
            return (*it - '0') % 2 == 1 ? Hemisphere::left : Hemisphere::right;
        }
    }
    throw std::invalid_argument("channel name carries no position digit: " + channel);
}

struct WindowSlice {
    std::size_t offset;
    std::size_t length;
};

inline std::size_t window_sample_count(double window_seconds, double sample_rate) {
    if (!(window_seconds > 0.0) || !(sample_rate > 0.0))
        throw std::invalid_argument("window length and rate must be positive");
    const auto n = static_cast<std::size_t>(std::llround(window_seconds * sample_rate));
    if (n < 2) throw std::invalid_argument("window shorter than two samples");
    return n;
}

/// Splits a recording into back-to-back fixed-length windows; a trailing
/// partial window is discarded. A window longer than the recording is a
/// data error.
inline std::vector<WindowSlice> segment(const Recording& rec, double window_seconds) {
    rec.validate();
    const std::size_t n = window_sample_count(window_seconds, rec.sample_rate);
    if (n > rec.samples())
        throw DataError("recording " + rec.subject + "/" + rec.game + ": window of " +
                        std::to_string(n) + " samples exceeds recording length " +
                        std::to_string(rec.samples()));
    std::vector<WindowSlice> out;
    out.reserve(rec.samples() / n);
    for (std::size_t off = 0; off + n <= rec.samples(); off += n) out.push_back({off, n});
    return out;
}

struct Spectrum {
    std::vector<double> freq_hz;    // k * rate / N for k = 0 .. N/2
    std::vector<double> magnitude;  // single-sided amplitude
};

/// Single-sided amplitude spectrum of one window: the sample mean is removed,
/// no taper is applied, and magnitudes are scaled so a sinusoid of amplitude
/// A aligned with bin k reports A at that bin (interior bins carry the factor
/// 2/N for their mirrored halves; the DC and Nyquist bins carry 1/N).
inline Spectrum magnitude_spectrum(std::span<const double> samples, double sample_rate) {
    const std::size_t n = samples.size();
    if (n < 2) throw DataError("spectrum needs at least two samples");
    if (!(sample_rate > 0.0)) throw DataError("sample rate must be positive");
    if (!all_finite(samples)) throw DataError("non-finite sample in window");

    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> in(samples.begin(), samples.end());
    for (double& v : in) v -= mean;

    const std::size_t bins = n / 2 + 1;
    std::vector<std::complex<double>> out(bins);
    {
        // FFTW planning is not thread-safe; execution is.
        static std::mutex plan_mutex;
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lock(plan_mutex);
            plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                        reinterpret_cast<fftw_complex*>(out.data()),
                                        FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
        }
        fftw_execute(plan);
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }

    Spectrum spec;
    spec.freq_hz.resize(bins);
    spec.magnitude.resize(bins);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < bins; ++k) {
        spec.freq_hz[k] = static_cast<double>(k) * sample_rate * inv_n;
        const bool half_bin = k == 0 || (n % 2 == 0 && k == bins - 1);
        spec.magnitude[k] = std::abs(out[k]) * inv_n * (half_bin ? 1.0 : 2.0);
    }
    return spec;
}

/// Per-band (max, mean) magnitudes in band order, max first. A band that
/// captures no bin at the given resolution is a data error naming the band.
inline std::vector<double> band_features(const Spectrum& spec, std::span<const Band> bands) {
    std::vector<double> out;
    out.reserve(2 * bands.size());
    for (const Band& band : bands) {
        double mx = 0.0;
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t k = 0; k < spec.freq_hz.size(); ++k) {
            if (!band.contains(spec.freq_hz[k])) continue;
            mx = count == 0 ? spec.magnitude[k] : std::max(mx, spec.magnitude[k]);
            sum += spec.magnitude[k];
            ++count;
        }
        if (count == 0)
            throw DataError("band " + band.name + " captures no spectrum bin at this resolution");
        out.push_back(mx);
        out.push_back(sum / static_cast<double>(count));
    }
    return out;
}

/// Feature vector of one window: channels in recording order, 2 features per
/// band per channel.
inline std::vector<double> extract_window_features(const Recording& rec, WindowSlice slice,
                                                   std::span<const Band> bands) {
    std::vector<double> out;
    out.reserve(2 * bands.size() * rec.channels.size());
    for (const auto& channel : rec.channels) {
        const Spectrum spec = magnitude_spectrum(
            std::span<const double>(channel).subspan(slice.offset, slice.length),
            rec.sample_rate);
        const std::vector<double> feats = band_features(spec, bands);
        out.insert(out.end(), feats.begin(), feats.end());
    }
    return out;
}

/// Names parallel to extract_window_features output: "<Channel>.<Band>.max"
/// then "<Channel>.<Band>.mean".
inline std::vector<std::string> feature_names(std::span<const std::string> channels,
                                              std::span<const Band> bands) {
    std::vector<std::string> names;
    names.reserve(2 * bands.size() * channels.size());
    for (const auto& ch : channels) {
        for (const Band& band : bands) {
            names.push_back(ch + "." + band.name + ".max");
            names.push_back(ch + "." + band.name + ".mean");
        }
    }
    return names;
}

struct FeatureName {
    std::string channel;
    std::string band;
    std::string stat;  // "max" or "mean"
};

inline FeatureName parse_feature_name(const std::string& name) {
    const auto first = name.find('.');
    const auto second = name.rfind('.');
    if (first == std::string::npos || second == first)
        throw DataError("malformed feature name: " + name);
    return {name.substr(0, first), name.substr(first + 1, second - first - 1),
            name.substr(second + 1)};
}

}  // namespace egnn
