#pragma once

#include <array>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "roppt/corpus.hpp"
#include "roppt/denoise.hpp"

namespace roppt {

// Confusion counts for the metaphor (positive) class.
struct Confusion {
  long long tp = 0, fp = 0, tn = 0, fn = 0;

  void add(int pred, int gold) {
    if (pred == 1)
      gold == 1 ? ++tp : ++fp;
    else
      gold == 1 ? ++fn : ++tn;
  }
  long long total() const { return tp + fp + tn + fn; }
};

struct Prf {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

// Micro precision/recall/F1 with every 0/0 defined as 0, so reports stay
// total on degenerate inputs.
inline Prf micro_prf(const Confusion& c) {
  Prf r;
  if (c.tp + c.fp > 0) r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (r.precision + r.recall > 0)
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

// Sentence-length buckets: <20, 20-40 (both ends inclusive), >40.
inline constexpr std::array<const char*, 3> kBucketNames = {"<20", "20-40", ">40"};

inline int length_bucket(int n) { return n < 20 ? 0 : (n <= 40 ? 1 : 2); }

struct BucketStats {
  long long count = 0;
  Confusion confusion;
  Prf prf;
  double mean_original = 0.0;   // mean sentence length
  double mean_retained = 0.0;   // mean retained-token count
  double mean_compression = 0.0;
};

struct EvalReport {
  Confusion overall;
  Prf micro;
  std::array<BucketStats, 3> buckets;
  long long total = 0;
};

// Per-bucket confusion, micro PRF and pruning-compression means. predictions
// and masks must be aligned with the corpus.
inline EvalReport bucket_report(const Corpus& corpus, const std::vector<int>& predictions,
                                const std::vector<ContextMask>& masks) {
  const std::size_t n = corpus.instances.size();
  if (predictions.size() != n || masks.size() != n)
    throw std::invalid_argument("bucket_report: misaligned predictions/masks");
  EvalReport rep;
  rep.total = static_cast<long long>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Instance& ins = corpus.instances[i];
    BucketStats& b = rep.buckets[static_cast<std::size_t>(length_bucket(ins.size()))];
    ++b.count;
    b.confusion.add(predictions[i], ins.label);
    rep.overall.add(predictions[i], ins.label);
    b.mean_original += ins.size();
    b.mean_retained += static_cast<double>(masks[i].indices.size());
    b.mean_compression += compression(masks[i], ins);
  }
  rep.micro = micro_prf(rep.overall);
  for (BucketStats& b : rep.buckets) {
    b.prf = micro_prf(b.confusion);
    if (b.count > 0) {
      b.mean_original /= static_cast<double>(b.count);
      b.mean_retained /= static_cast<double>(b.count);
      b.mean_compression /= static_cast<double>(b.count);
    }
  }
  return rep;
}

// Compression-only view for corpora without predictions.
struct CompressionRow {
  long long count = 0;
  double mean_original = 0.0;
  double mean_retained = 0.0;
  double mean_compression = 0.0;
};

struct CompressionReport {
  std::array<CompressionRow, 3> buckets;
  CompressionRow overall;
};

inline CompressionReport compression_report(const Corpus& corpus,
                                            const std::vector<ContextMask>& masks) {
  if (masks.size() != corpus.instances.size())
    throw std::invalid_argument("compression_report: misaligned masks");
  CompressionReport rep;
  for (std::size_t i = 0; i < corpus.instances.size(); ++i) {
    const Instance& ins = corpus.instances[i];
    for (CompressionRow* row :
         {&rep.buckets[static_cast<std::size_t>(length_bucket(ins.size()))], &rep.overall}) {
      ++row->count;
      row->mean_original += ins.size();
      row->mean_retained += static_cast<double>(masks[i].indices.size());
      row->mean_compression += compression(masks[i], ins);
    }
  }
  for (CompressionRow* row : {&rep.buckets[0], &rep.buckets[1], &rep.buckets[2], &rep.overall}) {
    if (row->count > 0) {
      row->mean_original /= static_cast<double>(row->count);
      row->mean_retained /= static_cast<double>(row->count);
      row->mean_compression /= static_cast<double>(row->count);
    }
  }
  return rep;
}

// --------------------------- rendering ------------------------------------

inline nlohmann::ordered_json report_to_json(const EvalReport& rep) {
  nlohmann::ordered_json j;
  j["precision"] = rep.micro.precision;
  j["recall"] = rep.micro.recall;
  j["f1"] = rep.micro.f1;
  j["confusion"] = {{"tp", rep.overall.tp}, {"fp", rep.overall.fp},
                    {"tn", rep.overall.tn}, {"fn", rep.overall.fn}};
  j["total"] = rep.total;
  j["buckets"] = nlohmann::ordered_json::array();
  for (std::size_t b = 0; b < rep.buckets.size(); ++b) {
    const BucketStats& s = rep.buckets[b];
    nlohmann::ordered_json row;
    row["bucket"] = kBucketNames[b];
    row["count"] = s.count;
    row["precision"] = s.prf.precision;
    row["recall"] = s.prf.recall;
    row["f1"] = s.prf.f1;
    row["mean_original"] = s.mean_original;
    row["mean_retained"] = s.mean_retained;
    row["mean_compression"] = s.mean_compression;
    j["buckets"].push_back(std::move(row));
  }
  return j;
}

inline nlohmann::ordered_json compression_to_json(const CompressionReport& rep) {
  nlohmann::ordered_json j;
  j["buckets"] = nlohmann::ordered_json::array();
  auto row_json = [](const char* name, const CompressionRow& r) {
    nlohmann::ordered_json row;
    row["bucket"] = name;
    row["count"] = r.count;
    row["mean_original"] = r.mean_original;
    row["mean_retained"] = r.mean_retained;
    row["mean_compression"] = r.mean_compression;
    return row;
  };
  for (std::size_t b = 0; b < rep.buckets.size(); ++b)
    j["buckets"].push_back(row_json(kBucketNames[b], rep.buckets[b]));
  j["overall"] = row_json("all", rep.overall);
  return j;
}

inline std::string report_to_text(const EvalReport& rep) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof line, "%-8s %8s %8s %8s %8s %10s %10s %8s\n", "bucket", "count",
                "prec", "rec", "f1", "mean_len", "retained", "compr");
  out += line;
  for (std::size_t b = 0; b < rep.buckets.size(); ++b) {
    const BucketStats& s = rep.buckets[b];
    std::snprintf(line, sizeof line, "%-8s %8lld %8.3f %8.3f %8.3f %10.1f %10.1f %8.3f\n",
                  kBucketNames[b], s.count, s.prf.precision, s.prf.recall, s.prf.f1,
                  s.mean_original, s.mean_retained, s.mean_compression);
    out += line;
  }
  std::snprintf(line, sizeof line, "%-8s %8lld %8.3f %8.3f %8.3f\n", "all", rep.total,
                rep.micro.precision, rep.micro.recall, rep.micro.f1);
  out += line;
  return out;
}

inline std::string compression_to_text(const CompressionReport& rep) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof line, "%-8s %8s %10s %10s %8s\n", "bucket", "count", "mean_len",
                "retained", "compr");
  out += line;
  auto emit = [&](const char* name, const CompressionRow& r) {
    std::snprintf(line, sizeof line, "%-8s %8lld %10.1f %10.1f %8.3f\n", name, r.count,
                  r.mean_original, r.mean_retained, r.mean_compression);
    out += line;
  };
  for (std::size_t b = 0; b < rep.buckets.size(); ++b) emit(kBucketNames[b], rep.buckets[b]);
  emit("all", rep.overall);
  return out;
}

}  // namespace roppt
