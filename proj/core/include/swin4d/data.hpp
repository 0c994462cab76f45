/*
 * Copyright 2026 The swin4d Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "swin4d/config.hpp"
#include "swin4d/tensor.hpp"

namespace swin4d {

using Dims3 = std::array<Index, 3>;

// A 4D scan stored as float32, row-major over (T, H, W, D).
struct Volume {
  Dims4 dims{};
  std::vector<float> values;

  Volume() = default;
  Volume(Dims4 d, float fill = 0.0f);

  Index frame_size() const { return dims[1] * dims[2] * dims[3]; }
  Dims3 spatial() const { return {dims[1], dims[2], dims[3]}; }
  Index index(Index t, Index h, Index w, Index d) const { return ((t * dims[1] + h) * dims[2] + w) * dims[3] + d; }
  float& at(Index t, Index h, Index w, Index d) { return values[index(t, h, w, d)]; }
  float at(Index t, Index h, Index w, Index d) const { return values[index(t, h, w, d)]; }
};

// [T, H, W, D, 1] model input.
template <typename T>
Tensor<T> to_input(const Volume& v);

// Gaussian blob carrying the planted signal, in voxel coordinates.
struct BlobGeometry {
  std::array<double, 3> center{};
  double radius = 1.0;
  double weight(Index h, Index w, Index d) const;
  // Within two radii of the center.
  bool inside(Index h, Index w, Index d) const;
};
BlobGeometry signature_blob(const Dims3& spatial);

struct SynthOptions {
  Index n_subjects = 200;
  Dims4 dims{24, 24, 24, 24};
  double amplitude = 2.0;
  double noise_sigma = 1.0;
  double noise_smoothing = 1.0;
  double temporal_correlation = 0.5;
  // Label 1 oscillates with this period in frames, label 0 at twice the frequency.
  Index period = 8;
  std::uint64_t seed = 0;
};

struct Signature {
  int pattern = 0;
  double amplitude = 0.0;
};

struct SubjectRecord {
  std::string subject_id;
  Volume volume;
  int sex = 0;
  double age = 0.0;
  double intelligence = 0.0;
  Signature signature;
};

// Smooth noise inside an ellipsoidal foreground (background exactly 0) plus
// a label-dependent oscillation in a fixed blob. Regression targets are a
// noisy linear function of the subject's amplitude, z-scored over the set.
std::vector<SubjectRecord> synthesize_dataset(const SynthOptions& opt);

// Z-scores the non-zero voxels jointly, sets the background to the minimum
// normalized foreground value, then center-crops / zero-pads each spatial
// axis to `target`.
Volume normalize_and_fit(const Volume& v, const Dims3& target);

// Center crop / zero pad of the spatial axes only.
Volume fit_spatial(const Volume& v, const Dims3& target, float pad_value = 0.0f);

struct SubSequence {
  std::string subject_id;
  Index start_frame = 0;
  Volume frames;
};

// Windows [k*stride, k*stride + length); stride 0 means length. A trailing
// remainder is dropped.
std::vector<Index> subsequence_starts(Index total_frames, Index length, Index stride = 0);
std::vector<SubSequence> subsequence_split(const SubjectRecord& subject, Index length, Index stride = 0);
Volume extract_frames(const Volume& v, Index start, Index length);

struct AugmentOptions {
  double noise_prob = 0.5;
  double noise_sigma = 0.1;
  double smooth_prob = 0.5;
  double smooth_sigma = 0.5;
};
Volume augment(const Volume& v, const AugmentOptions& opt, std::mt19937_64& rng);

struct SplitSpec {
  std::uint64_t seed = 0;
  double train = 0.7;
  double val = 0.15;
  double test = 0.15;
};
struct DataSplit {
  std::vector<std::size_t> train, val, test;
};
// Shuffled subject-level split; the train/val sizes are rounded, test takes the rest.
DataSplit split_subjects(std::size_t n_subjects, const SplitSpec& spec);

// One container per subject plus manifest.tsv with
// "subject_id path sex age intelligence" records.
void write_dataset(const std::filesystem::path& dir, const std::vector<SubjectRecord>& subjects);
std::vector<SubjectRecord> read_dataset(const std::filesystem::path& dir);

// Applies normalize_and_fit to every subject.
void prepare_dataset(std::vector<SubjectRecord>& subjects, const Dims3& target);

// Probe AUCs for the sex label computed directly on the volumes.
double mean_intensity_auc(const std::vector<SubjectRecord>& subjects);
// Power of the blob's mean time series at frequency 1/period.
double band_power_auc(const std::vector<SubjectRecord>& subjects, Index period);

}  // namespace swin4d
