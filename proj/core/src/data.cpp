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

#include "swin4d/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "swin4d/container.hpp"
#include "swin4d/error.hpp"
#include "swin4d/filters.hpp"
#include "swin4d/metrics.hpp"
#include "swin4d/parallel.hpp"

namespace swin4d {

Volume::Volume(Dims4 d, float fill) : dims(d), values(static_cast<std::size_t>(d[0] * d[1] * d[2] * d[3]), fill) {}

template <typename T>
Tensor<T> to_input(const Volume& v) {
  return Tensor<T>({v.dims[0], v.dims[1], v.dims[2], v.dims[3], 1}, std::vector<T>(v.values.begin(), v.values.end()));
}

double BlobGeometry::weight(Index h, Index w, Index d) const {
  const double dh = static_cast<double>(h) - center[0], dw = static_cast<double>(w) - center[1],
               dd = static_cast<double>(d) - center[2];
  return std::exp(-0.5 * (dh * dh + dw * dw + dd * dd) / (radius * radius));
}

bool BlobGeometry::inside(Index h, Index w, Index d) const {
  const double dh = static_cast<double>(h) - center[0], dw = static_cast<double>(w) - center[1],
               dd = static_cast<double>(d) - center[2];
  return dh * dh + dw * dw + dd * dd <= 4.0 * radius * radius;
}

BlobGeometry signature_blob(const Dims3& s) {
  BlobGeometry b;
  b.center = {0.3 * static_cast<double>(s[0] - 1), 0.6 * static_cast<double>(s[1] - 1),
              0.5 * static_cast<double>(s[2] - 1)};
  b.radius = std::max(1.5, static_cast<double>(*std::min_element(s.begin(), s.end())) / 6.0);
  return b;
}

namespace {

bool in_foreground(const Dims3& s, Index h, Index w, Index d) {
  double r = 0;
  const Index idx[3] = {h, w, d};
  for (int a = 0; a < 3; ++a) {
    const double c = 0.5 * static_cast<double>(s[a] - 1);
    const double semi = 0.45 * static_cast<double>(s[a]);
    const double u = (static_cast<double>(idx[a]) - c) / semi;
    r += u * u;
  }
  return r <= 1.0;
}

void zscore(std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double var = 0;
  for (double x : v) var += (x - m) * (x - m);
  const double sd = std::sqrt(var / n);
  for (double& x : v) x = sd > 0 ? (x - m) / sd : 0.0;
}

}  // namespace

std::vector<SubjectRecord> synthesize_dataset(const SynthOptions& opt) {
  if (opt.n_subjects < 1) throw ValidationError("synthesize_dataset: need at least one subject");
  for (Index d : opt.dims)
    if (d < 1) throw ValidationError("synthesize_dataset: dims must be positive");
  if (opt.period < 2) throw ValidationError("synthesize_dataset: period must be at least 2");
  const Dims3 spatial{opt.dims[1], opt.dims[2], opt.dims[3]};
  const BlobGeometry blob = signature_blob(spatial);
  const Index frame = spatial[0] * spatial[1] * spatial[2];
  std::vector<float> blob_weight(static_cast<std::size_t>(frame));
  std::vector<char> mask(static_cast<std::size_t>(frame));
  for (Index h = 0, i = 0; h < spatial[0]; ++h)
    for (Index w = 0; w < spatial[1]; ++w)
      for (Index d = 0; d < spatial[2]; ++d, ++i) {
        blob_weight[i] = static_cast<float>(blob.weight(h, w, d));
        mask[i] = in_foreground(spatial, h, w, d);
      }
  // Smoothing shrinks white-noise variance by the kernel energy; undo it.
  const auto kernel = gaussian_kernel(opt.noise_smoothing);
  double energy = 0;
  for (double k : kernel) energy += k * k;
  const double noise_gain = opt.noise_sigma / std::sqrt(energy * energy * energy);
  const double rho = opt.temporal_correlation;

  std::vector<SubjectRecord> out(static_cast<std::size_t>(opt.n_subjects));
  std::vector<double> unit(out.size()), age_noise(out.size()), iq_noise(out.size());
  parallel_for(opt.n_subjects, [&](std::int64_t s) {
    std::seed_seq seq{static_cast<std::uint64_t>(opt.seed), static_cast<std::uint64_t>(s), std::uint64_t{0x5f4d}};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.5, 1.5);
    SubjectRecord& rec = out[s];
    char id[32];
    std::snprintf(id, sizeof id, "sub-%04lld", static_cast<long long>(s));
    rec.subject_id = id;
    rec.sex = std::bernoulli_distribution(0.5)(rng) ? 1 : 0;
    unit[s] = uniform(rng);
    age_noise[s] = normal(rng);
    iq_noise[s] = normal(rng);
    rec.signature = {rec.sex, opt.amplitude * unit[s]};
    const double offset = 0.2 * normal(rng);
    const double freq = (rec.sex == 1 ? 1.0 : 2.0) / static_cast<double>(opt.period);
    rec.volume = Volume(opt.dims);
    std::vector<double> noise(static_cast<std::size_t>(frame), 0.0), fresh(static_cast<std::size_t>(frame));
    for (Index t = 0; t < opt.dims[0]; ++t) {
      for (double& v : fresh) v = normal(rng);
      gaussian_smooth_3d(std::span<double>(fresh), spatial, opt.noise_smoothing);
      const double keep = t == 0 ? 0.0 : rho;
      const double inject = t == 0 ? 1.0 : std::sqrt(1.0 - rho * rho);
      for (Index i = 0; i < frame; ++i) noise[i] = keep * noise[i] + inject * noise_gain * fresh[i];
      const double signal = rec.signature.amplitude * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(t));
      float* dst = rec.volume.values.data() + t * frame;
      for (Index i = 0; i < frame; ++i)
        dst[i] = mask[i] ? static_cast<float>(1.0 + offset + noise[i] + signal * blob_weight[i]) : 0.0f;
    }
  });
  std::vector<double> age(out.size()), iq(out.size());
  for (std::size_t s = 0; s < out.size(); ++s) {
    age[s] = unit[s] + 0.2 * age_noise[s];
    iq[s] = -unit[s] + 0.3 * iq_noise[s];
  }
  zscore(age);
  zscore(iq);
  for (std::size_t s = 0; s < out.size(); ++s) {
    out[s].age = age[s];
    out[s].intelligence = iq[s];
  }
  return out;
}

Volume fit_spatial(const Volume& v, const Dims3& target, float pad_value) {
  for (Index t : target)
    if (t < 1) throw ValidationError("fit_spatial: target extents must be positive");
  Volume out({v.dims[0], target[0], target[1], target[2]}, pad_value);
  // Per axis: source index = destination index + offset, offset > 0 crops.
  Index off[3];
  for (int a = 0; a < 3; ++a) off[a] = (v.dims[a + 1] - target[a]) / 2;
  for (Index t = 0; t < v.dims[0]; ++t)
    for (Index h = 0; h < target[0]; ++h) {
      const Index sh = h + off[0];
      if (sh < 0 || sh >= v.dims[1]) continue;
      for (Index w = 0; w < target[1]; ++w) {
        const Index sw = w + off[1];
        if (sw < 0 || sw >= v.dims[2]) continue;
        for (Index d = 0; d < target[2]; ++d) {
          const Index sd = d + off[2];
          if (sd < 0 || sd >= v.dims[3]) continue;
          out.at(t, h, w, d) = v.at(t, sh, sw, sd);
        }
      }
    }
  return out;
}

Volume normalize_and_fit(const Volume& v, const Dims3& target) {
  double sum = 0, count = 0;
  for (float x : v.values)
    if (x != 0.0f) {
      sum += x;
      count += 1;
    }
  if (count == 0) throw ValidationError("normalize_and_fit: volume has no foreground voxels");
  const double m = sum / count;
  double var = 0;
  for (float x : v.values)
    if (x != 0.0f) var += (x - m) * (x - m);
  var /= count;
  const double sd = var > 0 ? std::sqrt(var) : 1.0;
  Volume norm = v;
  double lo = std::numeric_limits<double>::infinity();
  for (auto& x : norm.values)
    if (x != 0.0f) lo = std::min(lo, (x - m) / sd);
  for (std::size_t i = 0; i < norm.values.size(); ++i)
    norm.values[i] = v.values[i] != 0.0f ? static_cast<float>((v.values[i] - m) / sd) : static_cast<float>(lo);
  return fit_spatial(norm, target, 0.0f);
}

std::vector<Index> subsequence_starts(Index total_frames, Index length, Index stride) {
  if (length < 1) throw ValidationError("subsequence_split: length must be positive");
  if (stride == 0) stride = length;
  if (stride < 1) throw ValidationError("subsequence_split: stride must be positive");
  if (length > total_frames)
    throw ValidationError("subsequence_split: length " + std::to_string(length) + " exceeds " +
                          std::to_string(total_frames) + " frames");
  std::vector<Index> starts;
  for (Index s = 0; s + length <= total_frames; s += stride) starts.push_back(s);
  return starts;
}

Volume extract_frames(const Volume& v, Index start, Index length) {
  if (start < 0 || length < 1 || start + length > v.dims[0]) throw ValidationError("extract_frames: range out of bounds");
  Volume out({length, v.dims[1], v.dims[2], v.dims[3]});
  const auto begin = v.values.begin() + start * v.frame_size();
  std::copy(begin, begin + length * v.frame_size(), out.values.begin());
  return out;
}

std::vector<SubSequence> subsequence_split(const SubjectRecord& subject, Index length, Index stride) {
  std::vector<SubSequence> out;
  for (Index s : subsequence_starts(subject.volume.dims[0], length, stride))
    out.push_back({subject.subject_id, s, extract_frames(subject.volume, s, length)});
  return out;
}

Volume augment(const Volume& v, const AugmentOptions& opt, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const bool noise = coin(rng) < opt.noise_prob && opt.noise_sigma > 0;
  const bool smooth = coin(rng) < opt.smooth_prob && opt.smooth_sigma > 0;
  Volume out = v;
  if (noise) {
    std::normal_distribution<double> normal(0.0, opt.noise_sigma);
    for (auto& x : out.values) x = static_cast<float>(x + normal(rng));
  }
  if (smooth) {
    const Index fs = out.frame_size();
    for (Index t = 0; t < out.dims[0]; ++t)
      gaussian_smooth_3d(std::span<float>(out.values.data() + t * fs, static_cast<std::size_t>(fs)), out.spatial(),
                         opt.smooth_sigma);
  }
  return out;
}

DataSplit split_subjects(std::size_t n, const SplitSpec& spec) {
  if (spec.train < 0 || spec.val < 0 || spec.test < 0 || std::abs(spec.train + spec.val + spec.test - 1.0) > 1e-9)
    throw ValidationError("split ratios must be non-negative and sum to 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(spec.train * static_cast<double>(n)));
  const auto n_val = std::min(n - n_train, static_cast<std::size_t>(std::llround(spec.val * static_cast<double>(n))));
  DataSplit out;
  out.train.assign(order.begin(), order.begin() + n_train);
  out.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  out.test.assign(order.begin() + n_train + n_val, order.end());
  for (auto* part : {&out.train, &out.val, &out.test}) std::sort(part->begin(), part->end());
  return out;
}

namespace {

std::string exact_string(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

void write_dataset(const std::filesystem::path& dir, const std::vector<SubjectRecord>& subjects) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.tsv");
  if (!manifest) throw RuntimeFailure("cannot write " + (dir / "manifest.tsv").string());
  manifest << "# subject_id\tpath\tsex\tage\tintelligence\n";
  manifest.precision(17);
  for (const auto& s : subjects) {
    const std::string file = s.subject_id + ".s4d";
    Container c;
    c.kind = "subject";
    c.meta = {{"subject_id", s.subject_id},
              {"pattern", std::to_string(s.signature.pattern)},
              {"amplitude", exact_string(s.signature.amplitude)}};
    const Dims4& d = s.volume.dims;
    c.tensors.push_back({"volume", {d[0], d[1], d[2], d[3]}, s.volume.values});
    write_container(dir / file, c);
    manifest << s.subject_id << '\t' << file << '\t' << s.sex << '\t' << s.age << '\t' << s.intelligence << '\n';
  }
  if (!manifest) throw RuntimeFailure("write failed for manifest in " + dir.string());
}

std::vector<SubjectRecord> read_dataset(const std::filesystem::path& dir) {
  std::ifstream manifest(dir / "manifest.tsv");
  if (!manifest) throw RuntimeFailure("cannot open " + (dir / "manifest.tsv").string());
  std::vector<SubjectRecord> out;
  std::string line;
  while (std::getline(manifest, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    SubjectRecord s;
    std::string path;
    if (!(ls >> s.subject_id >> path >> s.sex >> s.age >> s.intelligence))
      throw RuntimeFailure("bad manifest line: " + line);
    const Container c = read_container(dir / path);
    const ContainerTensor* v = c.find("volume");
    if (!v || v->shape.size() != 4) throw RuntimeFailure("subject file " + path + " has no 4D volume");
    s.volume.dims = {v->shape[0], v->shape[1], v->shape[2], v->shape[3]};
    s.volume.values = v->values;
    if (auto p = c.meta_value("pattern")) s.signature.pattern = std::stoi(*p);
    if (auto a = c.meta_value("amplitude")) s.signature.amplitude = std::stod(*a);
    out.push_back(std::move(s));
  }
  if (out.empty()) throw RuntimeFailure("dataset in " + dir.string() + " is empty");
  return out;
}

void prepare_dataset(std::vector<SubjectRecord>& subjects, const Dims3& target) {
  parallel_for(static_cast<std::int64_t>(subjects.size()),
               [&](std::int64_t i) { subjects[i].volume = normalize_and_fit(subjects[i].volume, target); });
}

namespace {

std::vector<int> sex_labels(const std::vector<SubjectRecord>& subjects) {
  std::vector<int> y;
  for (const auto& s : subjects) y.push_back(s.sex);
  return y;
}

}  // namespace

double mean_intensity_auc(const std::vector<SubjectRecord>& subjects) {
  std::vector<double> score;
  for (const auto& s : subjects)
    score.push_back(std::accumulate(s.volume.values.begin(), s.volume.values.end(), 0.0) /
                    static_cast<double>(s.volume.values.size()));
  return roc_auc(score, sex_labels(subjects));
}

double band_power_auc(const std::vector<SubjectRecord>& subjects, Index period) {
  std::vector<double> score;
  for (const auto& s : subjects) {
    const BlobGeometry blob = signature_blob(s.volume.spatial());
    const Dims4& d = s.volume.dims;
    std::vector<double> series(static_cast<std::size_t>(d[0]), 0.0);
    double wsum = 0;
    for (Index h = 0; h < d[1]; ++h)
      for (Index w = 0; w < d[2]; ++w)
        for (Index z = 0; z < d[3]; ++z) {
          const double wt = blob.weight(h, w, z);
          wsum += wt;
          for (Index t = 0; t < d[0]; ++t) series[t] += wt * s.volume.at(t, h, w, z);
        }
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(d[0]);
    std::complex<double> coef = 0;
    for (Index t = 0; t < d[0]; ++t)
      coef += (series[t] / wsum - mean / wsum) *
              std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(period));
    score.push_back(std::norm(coef));
  }
  return roc_auc(score, sex_labels(subjects));
}

template Tensor<float> to_input(const Volume&);
template Tensor<double> to_input(const Volume&);

}  // namespace swin4d
