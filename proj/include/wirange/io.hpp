#pragma once

#include <string>

#include "wirange/inference.hpp"
#include "wirange/simulate.hpp"
#include "wirange/striation.hpp"
#include "wirange/tracks.hpp"
#include "wirange/types.hpp"

namespace wirange {

// Spectrogram container: <stem>.json header {format, n_times, n_freqs, f0,
// df, t0, dt, kind} plus <stem>.bin, row-major little-endian float32
// (intensity) or interleaved re/im float32 pairs (complex).
void write_spectrogram(const Spectrogram& spec, const std::string& stem);
Spectrogram read_spectrogram(const std::string& stem);

// CSV export: header row "time,<f_0>,<f_1>,..."; one row per snapshot with
// intensities (|z|^2 for complex input).
void write_spectrogram_csv(const Spectrogram& spec, const std::string& path);

// Mono PCM WAV (16/32-bit int or 32-bit float), samples scaled to [-1, 1).
TimeSeries read_wav(const std::string& path);

// Raw little-endian float32 samples with a JSON sidecar
// {"sample_rate": .., "start_time": .., "units": ".."}; sidecar path is
// <data path> + ".json".
TimeSeries read_raw_float32(const std::string& path);

void write_ground_truth(const GroundTruth& gt, const std::string& path);
GroundTruth read_ground_truth(const std::string& path);

void write_likelihood_result(const LikelihoodResult& res, const std::string& json_path);
void write_likelihood_csv(const LikelihoodResult& res, const std::string& csv_path);

void write_rate_profile_csv(const RangeRateProfile& prof, const std::string& path);
void write_rate_profile_json(const RangeRateProfile& prof, const std::string& path);
RangeRateProfile read_rate_profile(const std::string& path);  // csv or json by extension

// Striation-grid debug dump: columns (l, r_prime, f, value, bin_class).
void write_striation_csv(const StriationGrid& grid, const std::string& path);

// Simulator configuration from JSON (see README for the schema). SNR
// conveniences (tone_snr_db / broadband_snr_db) are resolved against the
// mean noise variance.
SimConfig read_sim_config(const std::string& path);

NoiseProfile read_noise_profile_json(const std::string& path);
void write_noise_profile_json(const NoiseProfile& prof, const std::string& path);

}  // namespace wirange
