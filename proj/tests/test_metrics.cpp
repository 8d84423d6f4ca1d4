#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "roppt/metrics.hpp"
#include "roppt/synthetic.hpp"

using namespace roppt;

TEST_CASE("micro_prf closed forms") {
  SUBCASE("tp=2 fp=1 fn=1") {
    Prf r = micro_prf({2, 1, 0, 1});
    CHECK(r.precision == doctest::Approx(2.0 / 3.0));
    CHECK(r.recall == doctest::Approx(2.0 / 3.0));
    CHECK(r.f1 == doctest::Approx(2.0 / 3.0));
  }
  SUBCASE("perfect predictions") {
    Prf r = micro_prf({5, 0, 7, 0});
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.f1 == 1.0);
  }
  SUBCASE("no positive predictions, positives exist") {
    Prf r = micro_prf({0, 0, 4, 3});
    CHECK(r.precision == 0.0);
    CHECK(r.recall == 0.0);
    CHECK(r.f1 == 0.0);
  }
  SUBCASE("empty confusion") {
    Prf r = micro_prf({});
    CHECK(r.f1 == 0.0);
  }
}

TEST_CASE("micro_prf properties") {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 200; ++iter) {
    Confusion c{static_cast<long long>(rng() % 20), static_cast<long long>(rng() % 20),
                static_cast<long long>(rng() % 20), static_cast<long long>(rng() % 20)};
    Prf r = micro_prf(c);
    // scale invariance
    long long k = 1 + static_cast<long long>(rng() % 5);
    Prf rs = micro_prf({c.tp * k, c.fp * k, c.tn * k, c.fn * k});
    CHECK(rs.precision == doctest::Approx(r.precision));
    CHECK(rs.recall == doctest::Approx(r.recall));
    CHECK(rs.f1 == doctest::Approx(r.f1));
    // F1 between min and max of P and R when both positive
    if (r.precision > 0 && r.recall > 0) {
      CHECK(r.f1 >= std::min(r.precision, r.recall) - 1e-12);
      CHECK(r.f1 <= std::max(r.precision, r.recall) + 1e-12);
    }
    CHECK((r.f1 == 0.0) == (c.tp == 0));
  }
}

TEST_CASE("length buckets") {
  CHECK(length_bucket(1) == 0);
  CHECK(length_bucket(19) == 0);
  CHECK(length_bucket(20) == 1);
  CHECK(length_bucket(40) == 1);
  CHECK(length_bucket(41) == 2);
  CHECK(length_bucket(100) == 2);
}

namespace {

Instance flat_instance(int n, int label) {
  Instance ins;
  for (int i = 0; i < n; ++i) {
    ins.forms.push_back("w");
    ins.heads.push_back(i == 0 ? kRootHead : 0);
  }
  ins.target_idx = 0;
  ins.label = label;
  return ins;
}

}  // namespace

TEST_CASE("bucket_report") {
  Corpus corpus;
  corpus.instances = {
      flat_instance(10, 1),  // <20
      flat_instance(15, 0),  // <20
      flat_instance(25, 1),  // 20-40
      flat_instance(40, 0),  // 20-40
      flat_instance(45, 1),  // >40
  };
  std::vector<int> preds = {1, 1, 0, 0, 1};
  std::vector<ContextMask> masks;
  for (const auto& ins : corpus.instances)
    masks.push_back(apply_strategy(Strategy::full(), ins));

  EvalReport rep = bucket_report(corpus, preds, masks);
  CHECK(rep.total == 5);
  CHECK(rep.buckets[0].count == 2);
  CHECK(rep.buckets[1].count == 2);
  CHECK(rep.buckets[2].count == 1);
  // overall: tp=2 (10,45), fp=1 (15), fn=1 (25), tn=1 (40)
  CHECK(rep.overall.tp == 2);
  CHECK(rep.overall.fp == 1);
  CHECK(rep.overall.fn == 1);
  CHECK(rep.overall.tn == 1);
  CHECK(rep.micro.precision == doctest::Approx(2.0 / 3.0));
  CHECK(rep.micro.recall == doctest::Approx(2.0 / 3.0));
  CHECK(rep.buckets[0].mean_original == doctest::Approx(12.5));
  CHECK(rep.buckets[0].mean_compression == doctest::Approx(1.0));
  CHECK(rep.buckets[2].prf.f1 == doctest::Approx(1.0));

  SUBCASE("misaligned inputs throw") {
    preds.pop_back();
    CHECK_THROWS_AS(bucket_report(corpus, preds, masks), std::invalid_argument);
  }
}

TEST_CASE("bucket counts partition the corpus") {
  Corpus c = gen_synthetic(17, 400, 3, 60, 2);
  std::vector<int> preds(c.instances.size(), 0);
  std::vector<ContextMask> masks;
  for (const auto& ins : c.instances) masks.push_back(apply_strategy(Strategy::tree(4), ins));
  EvalReport rep = bucket_report(c, preds, masks);
  CHECK(rep.buckets[0].count + rep.buckets[1].count + rep.buckets[2].count == c.size());
  CHECK(rep.total == c.size());
}

TEST_CASE("compression_report bucket means") {
  Corpus c = gen_synthetic(19, 600, 5, 80, 2);
  std::vector<ContextMask> masks;
  for (const auto& ins : c.instances) masks.push_back(apply_strategy(Strategy::tree(4), ins));
  CompressionReport rep = compression_report(c, masks);
  CHECK(rep.overall.count == c.size());
  CHECK(rep.buckets[0].count + rep.buckets[1].count + rep.buckets[2].count == c.size());
  for (const auto& b : rep.buckets) {
    CHECK(b.mean_compression > 0.0);
    CHECK(b.mean_compression <= 1.0);
  }
  // deeper trees retain a smaller fraction
  CHECK(rep.buckets[0].mean_compression > rep.buckets[2].mean_compression);
}

TEST_CASE("report serialization is stable") {
  Corpus c = gen_synthetic(23, 40, 5, 50, 2);
  std::vector<int> preds(c.instances.size(), 1);
  std::vector<ContextMask> masks;
  for (const auto& ins : c.instances) masks.push_back(apply_strategy(Strategy::tree(2), ins));
  EvalReport rep = bucket_report(c, preds, masks);
  auto j = report_to_json(rep);
  CHECK(j.dump() == report_to_json(rep).dump());
  std::string keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys += it.key() + ",";
  CHECK(keys == "precision,recall,f1,confusion,total,buckets,");
  CHECK(!report_to_text(rep).empty());
}
