#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "texshuffle/evaluation.hpp"

using namespace texshuffle;

namespace {

std::vector<ClassLabel> labels(std::initializer_list<int> idx) {
  std::vector<ClassLabel> out;
  for (int i : idx) out.push_back(label_from_index(static_cast<std::size_t>(i)));
  return out;
}

RunReport report_with(const std::vector<double>& accuracies) {
  RunReport r;
  int epoch = 1;
  for (double a : accuracies) {
    EpochMetrics m;
    m.epoch = epoch++;
    m.test_overall_accuracy = a;
    r.epochs.push_back(m);
  }
  return r;
}

ConfusionMatrix random_matrix(std::mt19937_64& engine) {
  ConfusionMatrix m{};
  for (auto& row : m) {
    for (auto& v : row) v = static_cast<std::int64_t>(engine() % 20);
  }
  if (total_count(m) == 0) m[0][0] = 1;
  return m;
}

}  // namespace

TEST_CASE("confusion_matrix examples") {
  const auto truth = labels({0, 0, 1, 1, 2, 2, 3, 3});
  const ConfusionMatrix diag = confusion_matrix(truth, truth);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t p = 0; p < 4; ++p) CHECK(diag[t][p] == (t == p ? 2 : 0));
  }

  const ConfusionMatrix one = confusion_matrix(labels({2}), labels({0}));
  CHECK(one[label_index(ClassLabel::fluid)][label_index(ClassLabel::dry)] == 1);
  CHECK(total_count(one) == 1);

  CHECK_THROWS_AS(confusion_matrix(labels({0, 1}), labels({0})), std::invalid_argument);
}

TEST_CASE("confusion_matrix matches a brute-force tally") {
  std::mt19937_64 engine(31);
  std::vector<int> pred;
  std::vector<int> truth;
  for (int i = 0; i < 1000; ++i) {
    pred.push_back(static_cast<int>(engine() % 4));
    truth.push_back(static_cast<int>(engine() % 4));
  }
  std::vector<ClassLabel> p;
  std::vector<ClassLabel> t;
  for (int i = 0; i < 1000; ++i) {
    p.push_back(label_from_index(static_cast<std::size_t>(pred[i])));
    t.push_back(label_from_index(static_cast<std::size_t>(truth[i])));
  }
  const ConfusionMatrix m = confusion_matrix(p, t);
  const oracle::Matrix expected = oracle::tally(pred, truth);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) CHECK(m[a][b] == expected[a][b]);
  }
}

TEST_CASE("overall and per-class accuracy") {
  ConfusionMatrix m{};
  m[0] = {45, 5, 0, 0};
  m[1] = {0, 20, 0, 0};
  m[2] = {0, 0, 15, 5};
  m[3] = {0, 0, 0, 10};
  CHECK(overall_accuracy(m) == doctest::Approx(0.90));

  ConfusionMatrix diag{};
  diag[1][1] = 7;
  diag[3][3] = 2;
  CHECK(overall_accuracy(diag) == 1.0);

  ConfusionMatrix row{};
  row[0] = {3, 1, 0, 0};
  row[1] = {0, 2, 0, 0};
  const auto per_class = per_class_accuracy(row);
  CHECK(*per_class[0] == doctest::Approx(0.75));
  CHECK(*per_class[1] == 1.0);
  CHECK_FALSE(per_class[2].has_value());
  CHECK_FALSE(per_class[3].has_value());
  CHECK(absent_classes(row) == std::vector{ClassLabel::dry, ClassLabel::tearing});

  CHECK_THROWS_AS(overall_accuracy(ConfusionMatrix{}), std::invalid_argument);
}

TEST_CASE("accuracies match brute force on random matrices") {
  std::mt19937_64 engine(5);
  for (int trial = 0; trial < 300; ++trial) {
    const ConfusionMatrix m = random_matrix(engine);
    oracle::Matrix o(4, std::vector<long long>(4));
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) o[a][b] = m[a][b];
    }
    CHECK(overall_accuracy(m) == oracle::overall(o));
    const auto per_class = per_class_accuracy(m);
    double weighted = 0;
    for (int c = 0; c < 4; ++c) {
      CHECK(per_class[c] == oracle::recall(o, c));
      if (per_class[c]) {
        CHECK(*per_class[c] >= 0.0);
        CHECK(*per_class[c] <= 1.0);
        std::int64_t support = 0;
        for (auto v : m[c]) support += v;
        weighted += *per_class[c] * static_cast<double>(support);
      }
    }
    CHECK(weighted / static_cast<double>(total_count(m)) ==
          doctest::Approx(overall_accuracy(m)).epsilon(1e-12));
  }
}

TEST_CASE("precision and f1") {
  ConfusionMatrix m{};
  m[0] = {3, 1, 0, 0};
  m[1] = {1, 1, 0, 0};
  const auto precision = per_class_precision(m);
  CHECK(*precision[0] == doctest::Approx(0.75));
  CHECK(*precision[1] == doctest::Approx(0.5));
  CHECK_FALSE(precision[2].has_value());
  const auto f1 = per_class_f1(m);
  CHECK(*f1[0] == doctest::Approx(0.75));
  CHECK(*f1[1] == doctest::Approx(0.5));
}

TEST_CASE("best_iteration and average_accuracy") {
  CHECK(best_iteration(report_with({0.5, 0.9, 0.7})).epoch == 2);
  CHECK(best_iteration(report_with({0.4, 0.4, 0.4})).epoch == 1);
  CHECK(average_accuracy(report_with({0.6, 0.8})) == doctest::Approx(0.7));
  CHECK(average_accuracy(report_with({0.33})) == 0.33);
  CHECK_THROWS_AS(best_iteration(RunReport{}), std::invalid_argument);
  CHECK_THROWS_AS(average_accuracy(RunReport{}), std::invalid_argument);

  std::mt19937_64 engine(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> acc;
    for (int e = 0; e < 30; ++e) acc.push_back(static_cast<double>(engine() % 21) / 20.0);
    const RunReport r = report_with(acc);
    CHECK(best_iteration(r).epoch == oracle::argmax_first(acc));
    CHECK(average_accuracy(r) == doctest::Approx(oracle::mean(acc)).epsilon(1e-12));
    CHECK(best_iteration(r).test_overall_accuracy >= average_accuracy(r));
  }
}

namespace {

RunReport two_epoch_run(double best, double other, std::array<double, 4> per_class) {
  RunReport r = report_with({best, other});
  for (std::size_t c = 0; c < 4; ++c) r.epochs[0].per_class_accuracy[c] = per_class[c];
  r.epochs[0].confusion[0][0] = 1;
  r.epochs[1].confusion[0][0] = 1;
  return r;
}

}  // namespace

TEST_CASE("compare_runs renders published-style values") {
  // Two-epoch runs whose best and mean reproduce the published table.
  const RunReport experimental =
      two_epoch_run(0.9064, 2 * 0.8684 - 0.9064, {0.8750, 0.9882, 0.6667, 1.0});
  const RunReport control = two_epoch_run(0.7246, 2 * 0.6871 - 0.7246, {0.9608, 0.6134, 0.7206, 0.75});
  const ComparisonReport cmp = compare_runs(control, experimental);

  REQUIRE(cmp.best_iteration_rows.size() == 5);
  CHECK(cmp.best_iteration_rows[0].metric == "Overall Accuracy (%)");
  CHECK(cmp.best_iteration_rows[1].metric == "\"Fluid\" Class Accuracy (%)");
  CHECK(cmp.best_iteration_rows[4].metric == "\"Tearing\" Class Accuracy (%)");
  CHECK(cmp.average_row.metric == "Average Accuracy (%)");

  const std::string table = render_table(cmp);
  for (const char* value : {"90.64", "72.46", "87.50", "96.08", "98.82", "61.34", "66.67",
                            "72.06", "100.00", "75.00", "86.84", "68.71"}) {
    CHECK_MESSAGE(table.find(value) != std::string::npos, value);
  }
  // Experimental column comes first.
  const auto line_start = table.find("Overall Accuracy (%)");
  const std::string line = table.substr(line_start, table.find('\n', line_start) - line_start);
  CHECK(line.find("90.64") < line.find("72.46"));

  const std::string csv = render_csv(cmp);
  CHECK(csv.find("best_iteration,\"Overall Accuracy (%)\",90.64,72.46") != std::string::npos);
  CHECK(csv.find("overall_results,\"Average Accuracy (%)\",86.84,68.71") != std::string::npos);
  CHECK(csv.find("\"\"Good\"\" Class Accuracy (%)\",98.82,61.34") != std::string::npos);

  const auto json = comparison_to_json(cmp);
  CHECK(json["best_iteration"][0]["patch_and_shuffle"].get<double>() == doctest::Approx(90.64));
  CHECK(json["average_accuracy"]["standard"].get<double>() == doctest::Approx(68.71));

  const std::string svg = render_accuracy_svg(cmp);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("compare_runs columns") {
  SUBCASE("same report twice gives identical columns") {
    const RunReport r = two_epoch_run(0.8, 0.6, {0.9, 0.8, 0.7, 0.6});
    const ComparisonReport cmp = compare_runs(r, r);
    for (const auto& row : cmp.best_iteration_rows) CHECK(row.experimental == row.control);
    CHECK(cmp.average_row.experimental == cmp.average_row.control);
  }
  SUBCASE("per-class rows come from each run's own best epoch") {
    RunReport control = report_with({0.5, 0.75});
    control.epochs[0].confusion[0][0] = 1;
    control.epochs[1].confusion[0][0] = 1;
    control.epochs[1].per_class_accuracy = {1.0, 0.5, std::nullopt, 0.25};
    RunReport experimental = report_with({0.9, 0.1, 0.2});
    for (auto& e : experimental.epochs) e.confusion[0][0] = 1;
    experimental.epochs[0].per_class_accuracy = {0.8, 0.9, 1.0, 0.7};

    const ComparisonReport cmp = compare_runs(control, experimental);
    CHECK(cmp.control_best_epoch == 2);
    CHECK(cmp.experimental_best_epoch == 1);
    CHECK(cmp.best_iteration_rows[0].control == 0.75);
    CHECK(cmp.best_iteration_rows[0].experimental == 0.9);
    CHECK(cmp.best_iteration_rows[2].control == 0.5);
    CHECK(cmp.best_iteration_rows[3].experimental == 1.0);
    CHECK_FALSE(cmp.best_iteration_rows[3].control.has_value());
    CHECK(*cmp.average_row.experimental == doctest::Approx(0.4));
    CHECK(*cmp.average_row.control == doctest::Approx(0.625));
    CHECK(render_table(cmp).find("n/a") != std::string::npos);
  }
}
