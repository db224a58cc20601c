#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "tweetact/error.hpp"
#include "tweetact/explain.hpp"
#include "tweetact/rng.hpp"

using namespace tweetact;

namespace {

const Taxonomy kTax = Taxonomy::speech_acts();

// Direct weighted ridge solve through Eigen, intercept unpenalized.
Eigen::VectorXd eigen_ridge(std::span<const PerturbationSample> samples,
                            std::span<const double> y, double lambda) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  const auto d = static_cast<Eigen::Index>(samples.front().mask.size());
  Eigen::MatrixXd X(n, d + 1);
  Eigen::VectorXd w(n), t(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) X(i, j + 1) = samples[i].mask[j];
    w(i) = samples[i].proximity;
    t(i) = y[i];
  }
  Eigen::MatrixXd A = X.transpose() * w.asDiagonal() * X;
  for (Eigen::Index j = 1; j <= d; ++j) A(j, j) += lambda;
  const Eigen::VectorXd b = X.transpose() * w.asDiagonal() * t;
  return A.colPivHouseholderQr().solve(b);
}

class FailingBackend final : public ClassifierBackend {
 public:
  const std::string& model_id() const override { return id_; }
  ProbabilityMatrix classify_batch(std::span<const TextItem>) override {
    throw std::runtime_error("connection refused");
  }

 private:
  std::string id_ = "broken";
};

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kInvalidArgument;
}

}  // namespace

TEST(TextFeatures, UniqueWordsAndReconstruction) {
  const auto f = TextFeatures::from_tokens({"ا", "ب", "ا", "ج"});
  EXPECT_EQ(f.words, (std::vector<std::string>{"ا", "ب", "ج"}));
  EXPECT_EQ(f.token_word, (std::vector<std::size_t>{0, 1, 0, 2}));
  const std::vector<std::uint8_t> drop_a = {0, 1, 1};
  EXPECT_EQ(f.reconstruct(drop_a), "ب ج");
  const std::vector<std::uint8_t> none = {0, 0, 0};
  EXPECT_EQ(f.reconstruct(none), "");
}

TEST(Proximity, KernelValues) {
  const std::vector<std::uint8_t> all = {1, 1, 1, 1};
  const std::vector<std::uint8_t> zero = {0, 0, 0, 0};
  const std::vector<std::uint8_t> one = {1, 0, 0, 0};
  EXPECT_EQ(proximity_weight(all), 1.0);
  EXPECT_DOUBLE_EQ(proximity_weight(zero), std::exp(-1.0 / 625.0));
  // cosine 1/2 -> distance 1/2
  EXPECT_DOUBLE_EQ(proximity_weight(one), std::exp(-0.25 / 625.0));
  EXPECT_DOUBLE_EQ(proximity_weight(one, 1.0), std::exp(-0.25));
}

TEST(Perturb, FirstSampleKeepsEverythingAndSeeded) {
  const auto f = TextFeatures::from_tokens({"ا", "ب", "ج", "د", "ه"});
  const auto s = perturb(f, 200, 3);
  ASSERT_EQ(s.size(), 200u);
  EXPECT_EQ(s[0].mask, std::vector<std::uint8_t>(5, 1));
  EXPECT_EQ(s[0].proximity, 1.0);
  std::set<std::vector<std::uint8_t>> distinct;
  for (std::size_t i = 1; i < s.size(); ++i) {
    // at least one word dropped
    std::size_t kept = 0;
    for (auto b : s[i].mask) kept += b;
    EXPECT_LT(kept, 5u);
    distinct.insert(s[i].mask);
  }
  EXPECT_GT(distinct.size(), 20u);
  const auto again = perturb(f, 200, 3);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(again[i].mask, s[i].mask);
}

TEST(EnumerateMasks, AllMasksOnce) {
  const auto f = TextFeatures::from_tokens({"ا", "ب", "ج"});
  const auto s = enumerate_masks(f);
  ASSERT_EQ(s.size(), 8u);
  EXPECT_EQ(s[0].mask, std::vector<std::uint8_t>(3, 1));
  std::set<std::vector<std::uint8_t>> all;
  for (const auto& x : s) all.insert(x.mask);
  EXPECT_EQ(all.size(), 8u);
  EXPECT_EQ(s[1].mask, std::vector<std::uint8_t>(3, 0));
  EXPECT_EQ(s[2].mask, (std::vector<std::uint8_t>{1, 0, 0}));
}

TEST(FitSurrogate, MatchesEigenOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<std::string> toks;
    for (std::size_t j = 0; j < 9; ++j) toks.push_back("w" + std::to_string(j));
    const auto f = TextFeatures::from_tokens(toks);
    const auto samples = perturb(f, 300, seed);
    Rng rng(seed + 1000);
    std::vector<double> y(samples.size());
    for (auto& v : y) v = rng.uniform01();
    for (double lambda : {0.0, 1e-3, 0.5}) {
      const auto fit = fit_surrogate(samples, y, lambda);
      const auto ref = eigen_ridge(samples, y, lambda);
      EXPECT_NEAR(fit.intercept, ref(0), 1e-9);
      for (std::size_t j = 0; j < 9; ++j) {
        EXPECT_NEAR(fit.coefficients[j], ref(static_cast<Eigen::Index>(j + 1)), 1e-9)
            << "seed " << seed << " lambda " << lambda;
      }
    }
  }
}

TEST(FitSurrogate, RecoversLinearTarget) {
  const auto f = TextFeatures::from_tokens({"a", "b", "c", "d"});
  const auto samples = enumerate_masks(f);
  const std::vector<double> beta = {0.3, -0.2, 0.05, 0.0};
  std::vector<double> y;
  for (const auto& s : samples) {
    double v = 0.1;
    for (std::size_t j = 0; j < 4; ++j) v += beta[j] * s.mask[j];
    y.push_back(v);
  }
  const auto fit = fit_surrogate(samples, y, 0.0);
  EXPECT_NEAR(fit.intercept, 0.1, 1e-12);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(fit.coefficients[j], beta[j], 1e-12);
}

TEST(FitSurrogate, Errors) {
  const auto f = TextFeatures::from_tokens({"a", "b", "c"});
  const auto samples = perturb(f, 3, 1);
  const std::vector<double> y(3, 0.5);
  EXPECT_EQ(kind_of([&] { fit_surrogate(samples, y, 0.0); }), ErrorKind::kInvalidArgument);
  const auto more = perturb(f, 10, 1);
  const std::vector<double> y10(10, 0.5);
  EXPECT_EQ(kind_of([&] { fit_surrogate(more, y10, -1.0); }), ErrorKind::kInvalidArgument);
  // The same mask repeated is rank deficient without ridge.
  std::vector<PerturbationSample> same(5, more[0]);
  const std::vector<double> y5(5, 0.5);
  EXPECT_EQ(kind_of([&] { fit_surrogate(same, y5, 0.0); }), ErrorKind::kSingularSystem);
  EXPECT_NO_THROW(fit_surrogate(same, y5, 1e-3));
}

TEST(TopK, OrderingAndTies) {
  const std::vector<std::string> w = {"a", "b", "c", "d"};
  const std::vector<double> c = {0.1, -0.5, 0.5, 0.2};
  const auto top = top_k_words(w, c, 3);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].word, "b");
  EXPECT_EQ(top[1].word, "c");
  EXPECT_EQ(top[2].word, "d");
  EXPECT_EQ(top_k_words(w, c, 10).size(), 4u);
}

TEST(Explain, IndicatorWordRankedFirst) {
  fixtures::IndicatorBackend backend(kTax, "سؤال", 0.9, 0.1);
  ExplainOptions opts;
  opts.ridge_lambda = 0.0;
  const auto ex = explain("عندي سؤال مهم جدا اليوم", backend, kTax, opts);
  EXPECT_TRUE(ex.exhaustive);
  EXPECT_EQ(ex.samples, 32u);
  EXPECT_EQ(backend.calls(), 1u);
  EXPECT_EQ(ex.target_class, "Exp");
  ASSERT_FALSE(ex.top_k.empty());
  EXPECT_EQ(ex.top_k[0].word, "سؤال");
  EXPECT_NEAR(ex.top_k[0].coefficient, 0.8, 1e-9);
  EXPECT_NEAR(ex.intercept, 0.1, 1e-9);
  for (std::size_t i = 1; i < ex.top_k.size(); ++i) {
    EXPECT_LT(std::abs(ex.top_k[i].coefficient), 1e-9);
  }
}

TEST(Explain, TargetClassOverride) {
  fixtures::IndicatorBackend backend(kTax, "سؤال", 0.9, 0.1);
  ExplainOptions opts;
  opts.target_class = "Que";
  opts.ridge_lambda = 0.0;
  const auto ex = explain("عندي سؤال مهم", backend, kTax, opts);
  EXPECT_EQ(ex.target_class, "Que");
  EXPECT_NEAR(ex.top_k[0].coefficient, -0.8, 1e-9);
}

TEST(Explain, ConstantBackendGivesZeroWeights) {
  fixtures::ConstantBackend backend(kTax, {0.2, 0.2, 0.2, 0.2, 0.1, 0.1});
  const auto ex = explain("كلام عادي بدون اي معني خاص", backend, kTax);
  for (double c : ex.coefficients) EXPECT_LT(std::abs(c), 1e-9);
}

TEST(Explain, DefaultKAndSampling) {
  const std::string text =
      "واحد اثنان ثلاثه اربعه خمسه سته سبعه ثمانيه تسعه عشره شمس قمر بحر جبل نهر";
  fixtures::ConstantBackend backend(kTax, {1, 0, 0, 0, 0, 0});
  ExplainOptions opts;
  opts.n_samples = 300;
  const auto ex = explain(text, backend, kTax, opts);
  EXPECT_EQ(ex.words.size(), 15u);
  EXPECT_FALSE(ex.exhaustive);
  EXPECT_EQ(ex.samples, 300u);
  EXPECT_EQ(ex.top_k.size(), 7u);
}

TEST(Explain, Errors) {
  fixtures::ConstantBackend ok(kTax, {1, 0, 0, 0, 0, 0});
  EXPECT_EQ(kind_of([&] { explain("123 hello", ok, kTax); }), ErrorKind::kTooShort);
  FailingBackend bad;
  try {
    explain("كلمه اخري", bad, kTax);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBackendFailure);
    EXPECT_NE(std::string(e.what()).find("connection refused"), std::string::npos);
  }
}

TEST(Explain, JsonAndBars) {
  fixtures::IndicatorBackend backend(kTax, "سؤال", 0.9, 0.1);
  const auto ex = explain("عندي سؤال", backend, kTax);
  const auto json = explanation_to_json(ex);
  EXPECT_NE(json.find("\"target_class\": \"Exp\""), std::string::npos);
  EXPECT_NE(json.find("\"exhaustive\": true"), std::string::npos);
  const auto bars = render_bars(ex);
  EXPECT_NE(bars.find("<- target"), std::string::npos);
  EXPECT_NE(bars.find("سؤال"), std::string::npos);
}
