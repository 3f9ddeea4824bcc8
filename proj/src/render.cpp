#include <algorithm>
#include <cstdio>
#include <sstream>

#include "texshuffle/evaluation.hpp"

using nlohmann::json;

namespace texshuffle {

namespace {

std::string percent(const std::optional<double>& fraction) {
  if (!fraction) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *fraction * 100.0);
  return buf;
}

json percent_json(const std::optional<double>& fraction) {
  return fraction ? json(*fraction * 100.0) : json(nullptr);
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string render_table(const ComparisonReport& report) {
  std::vector<ComparisonRow> rows = report.best_iteration_rows;
  rows.push_back(report.average_row);
  std::size_t name_width = std::string("Metric").size();
  for (const auto& row : rows) name_width = std::max(name_width, row.metric.size());

  const std::string exp_head = "Patch-and-Shuffle";
  const std::string ctl_head = "Standard";
  const std::size_t col = std::max(exp_head.size(), ctl_head.size());
  const std::size_t width = name_width + 2 * (col + 3);

  std::ostringstream out;
  auto rule = [&] { out << std::string(width, '-') << '\n'; };
  auto centered = [&](const std::string& title) {
    const std::size_t pad = width > title.size() ? (width - title.size()) / 2 : 0;
    out << std::string(pad, ' ') << title << '\n';
  };
  auto line = [&](const std::string& a, const std::string& b, const std::string& c) {
    out << a << std::string(name_width - a.size(), ' ');
    out << " | " << std::string(col - b.size(), ' ') << b;
    out << " | " << std::string(col - c.size(), ' ') << c << '\n';
  };

  rule();
  centered("Best Iteration");
  rule();
  line("Metric", exp_head, ctl_head);
  rule();
  for (const auto& row : report.best_iteration_rows) {
    line(row.metric, percent(row.experimental), percent(row.control));
  }
  line("Best epoch", std::to_string(report.experimental_best_epoch),
       std::to_string(report.control_best_epoch));
  rule();
  centered("Overall Results");
  rule();
  line(report.average_row.metric, percent(report.average_row.experimental),
       percent(report.average_row.control));
  rule();
  return out.str();
}

std::string render_csv(const ComparisonReport& report) {
  std::ostringstream out;
  out << "section,metric,patch_and_shuffle,standard\n";
  for (const auto& row : report.best_iteration_rows) {
    out << "best_iteration," << csv_quote(row.metric) << ',' << percent(row.experimental)
        << ',' << percent(row.control) << '\n';
  }
  out << "best_iteration," << csv_quote("Best epoch") << ','
      << report.experimental_best_epoch << ',' << report.control_best_epoch << '\n';
  out << "overall_results," << csv_quote(report.average_row.metric) << ','
      << percent(report.average_row.experimental) << ','
      << percent(report.average_row.control) << '\n';
  return out.str();
}

json comparison_to_json(const ComparisonReport& report) {
  json rows = json::array();
  for (const auto& row : report.best_iteration_rows) {
    rows.push_back({{"metric", row.metric},
                    {"patch_and_shuffle", percent_json(row.experimental)},
                    {"standard", percent_json(row.control)}});
  }
  auto extras = [](const RunReport& run) {
    const EpochMetrics& best = best_iteration(run);
    json precision = json::object();
    json f1 = json::object();
    const auto p = per_class_precision(best.confusion);
    const auto f = per_class_f1(best.confusion);
    for (const ClassLabel label : kAllLabels) {
      precision[std::string(label_name(label))] = percent_json(p[label_index(label)]);
      f1[std::string(label_name(label))] = percent_json(f[label_index(label)]);
    }
    return json{{"best_epoch", best.epoch},
                {"precision", precision},
                {"f1", f1},
                {"confusion", best.confusion}};
  };
  return json{{"units", "percent"},
              {"best_iteration", rows},
              {"average_accuracy",
               {{"patch_and_shuffle", percent_json(report.average_row.experimental)},
                {"standard", percent_json(report.average_row.control)}}},
              {"patch_and_shuffle", extras(report.experimental)},
              {"standard", extras(report.control)}};
}

std::string render_accuracy_svg(const ComparisonReport& report) {
  constexpr double kWidth = 640;
  constexpr double kHeight = 400;
  constexpr double kLeft = 60;
  constexpr double kRight = 20;
  constexpr double kTop = 30;
  constexpr double kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  const std::size_t n_epochs = std::max(report.control.epochs.size(),
                                        report.experimental.epochs.size());
  const double x_span = n_epochs > 1 ? static_cast<double>(n_epochs - 1) : 1.0;
  auto px = [&](int epoch) { return kLeft + plot_w * (epoch - 1) / x_span; };
  auto py = [&](double acc) { return kTop + plot_h * (1.0 - acc); };

  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int tick = 0; tick <= 10; tick += 2) {
    const double y = py(tick / 10.0);
    out << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + plot_w
        << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
        << tick * 10 << "%</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">epoch</text>\n";

  auto curve = [&](const RunReport& run, const char* colour, const char* name, double ly) {
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
    for (const auto& m : run.epochs) {
      out << px(m.epoch) << ',' << py(m.test_overall_accuracy) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << kLeft + 10 << "\" y=\"" << ly << "\" fill=\"" << colour << "\">"
        << name << "</text>\n";
  };
  curve(report.experimental, "#c0392b", "patch-and-shuffle", kTop + 14);
  curve(report.control, "#2c3e50", "standard", kTop + 30);
  out << "</svg>\n";
  return out.str();
}

}  // namespace texshuffle
