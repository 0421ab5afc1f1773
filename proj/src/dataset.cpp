#include "openrect/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "openrect/error.hpp"

namespace openrect {

namespace {

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_real(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

std::optional<long long> parse_integer(std::string_view cell) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
  return v;
}

std::size_t resolve_label_column(const CsvOptions& options,
                                  const std::vector<std::string>& header, std::size_t n_cols) {
  if (const auto* name = std::get_if<std::string>(&options.label_column)) {
    auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) throw ValidationError("label column '" + *name + "' not in header");
    return static_cast<std::size_t>(it - header.begin());
  }
  long idx = std::get<long>(options.label_column);
  long n = static_cast<long>(n_cols);
  if (idx < 0) idx += n;
  if (idx < 0 || idx >= n)
    throw ValidationError("label column index out of range for " + std::to_string(n_cols) +
                          " columns");
  return static_cast<std::size_t>(idx);
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset

void Dataset::validate() const {
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw ValidationError("feature rows (" + std::to_string(features.rows()) +
                          ") != label count (" + std::to_string(labels.size()) + ")");
  if (features.cols() < 1) throw ValidationError("dataset has no feature columns");
  for (Label y : labels)
    if (y < 0 || y >= n_classes)
      throw ValidationError("label " + std::to_string(y) + " outside label space of size " +
                            std::to_string(n_classes));
  if (!features.allFinite()) throw ValidationError("dataset contains non-finite values");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.n_classes = n_classes;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) =
        features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels.at(rows[i]));
  }
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(n_classes, 0)), 0);
  for (Label y : labels) ++counts.at(static_cast<std::size_t>(y));
  return counts;
}

int Dataset::classes_present() const {
  auto counts = class_counts();
  return static_cast<int>(std::count_if(counts.begin(), counts.end(),
                                        [](std::size_t c) { return c > 0; }));
}

Dataset concat(const Dataset& a, const Dataset& b) {
  if (a.empty() && a.features.cols() == 0) return b;
  if (b.empty() && b.features.cols() == 0) return a;
  if (a.features.cols() != b.features.cols())
    throw DimensionError("cannot concatenate datasets of dimension " +
                         std::to_string(a.features.cols()) + " and " +
                         std::to_string(b.features.cols()));
  Dataset out;
  out.n_classes = std::max(a.n_classes, b.n_classes);
  out.features.resize(a.features.rows() + b.features.rows(), a.features.cols());
  out.features.topRows(a.features.rows()) = a.features;
  out.features.bottomRows(b.features.rows()) = b.features;
  out.labels = a.labels;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  return out;
}

// ---------------------------------------------------------------------------
// LabelMap

Label LabelMap::id_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ValidationError("unknown label '" + name + "'");
  return static_cast<Label>(it - names.begin());
}

const std::string& LabelMap::name_of(Label id) const {
  return names.at(static_cast<std::size_t>(id));
}

// ---------------------------------------------------------------------------
// CSV

LoadedCsv parse_csv(std::istream& in, const CsvOptions& options) {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  std::size_t n_cols = 0;
  std::size_t label_col = 0;
  bool have_shape = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (line_no == 1 && view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF")
      view.remove_prefix(3);
    auto cells = split_commas(view);

    if (!have_shape) {
      n_cols = cells.size();
      if (n_cols < 2)
        throw FormatError("line " + std::to_string(line_no) +
                          ": need at least one feature column and a label column");
      if (options.header) {
        for (auto c : cells) header.emplace_back(c);
        label_col = resolve_label_column(options, header, n_cols);
        have_shape = true;
        continue;
      }
      label_col = resolve_label_column(options, header, n_cols);
      have_shape = true;
    }

    if (cells.size() != n_cols)
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(n_cols) + " columns, found " +
                        std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(n_cols - 1);
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (c == label_col) continue;
      if (options.allow_missing && cells[c].empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      auto v = parse_real(cells[c]);
      if (!v)
        throw ParseError(line_no, "column " + std::to_string(c + 1) +
                                      ": not a finite number: '" + std::string(cells[c]) + "'");
      row.push_back(*v);
    }
    if (cells[label_col].empty()) throw ParseError(line_no, "empty label");
    rows.push_back(std::move(row));
    raw_labels.emplace_back(cells[label_col]);
  }
  if (rows.empty()) throw EmptyInputError("CSV input contains no data rows");

  LoadedCsv out;
  bool all_integral = std::all_of(raw_labels.begin(), raw_labels.end(),
                                  [](const std::string& s) { return parse_integer(s).has_value(); });
  std::unordered_map<std::string, Label> ids;
  if (all_integral) {
    std::map<long long, std::string> ordered;
    for (const auto& s : raw_labels) ordered.emplace(*parse_integer(s), s);
    for (const auto& [value, text] : ordered) {
      ids.emplace(text, static_cast<Label>(out.label_map.names.size()));
      out.label_map.names.push_back(text);
    }
    // Spellings such as "07" and "7" share one id.
    for (const auto& s : raw_labels)
      if (!ids.count(s)) ids.emplace(s, ids.at(ordered.at(*parse_integer(s))));
  } else {
    for (const auto& s : raw_labels) {
      if (ids.emplace(s, static_cast<Label>(out.label_map.names.size())).second)
        out.label_map.names.push_back(s);
    }
  }

  const auto d = static_cast<Eigen::Index>(n_cols - 1);
  out.data.features.resize(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      out.data.features(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  out.data.labels.reserve(raw_labels.size());
  for (const auto& s : raw_labels) out.data.labels.push_back(ids.at(s));
  out.data.n_classes = static_cast<int>(out.label_map.size());

  if (options.header) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (c != label_col) out.feature_names.push_back(header[c]);
  }
  return out;
}

LoadedCsv load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_csv(in, options);
}

void write_csv(std::ostream& out, const Dataset& data, const LabelMap* names,
               const std::vector<std::string>& feature_names) {
  const auto d = data.features.cols();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (static_cast<std::size_t>(j) < feature_names.size())
      out << feature_names[static_cast<std::size_t>(j)];
    else
      out << 'f' << j;
    out << ',';
  }
  out << "label\n";
  char buf[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double v = data.features(static_cast<Eigen::Index>(i), j);
      if (!std::isnan(v)) {  // missing values stay empty
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
        out.write(buf, ptr - buf);
      }
      out << ',';
    }
    if (names)
      out << names->name_of(data.labels[i]);
    else
      out << data.labels[i];
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Dataset& data, const LabelMap* names,
               const std::vector<std::string>& feature_names) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_csv(out, data, names, feature_names);
}

// ---------------------------------------------------------------------------
// Gaussian mixtures

std::size_t GaussianMixtureSpec::dim() const {
  return components.empty() ? 0 : static_cast<std::size_t>(components.front().mean.size());
}

void GaussianMixtureSpec::validate() const {
  if (components.empty()) throw ValidationError("mixture spec has no components");
  const auto d = components.front().mean.size();
  if (d < 1) throw ValidationError("mixture components need dimension >= 1");
  double total = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    const std::string tag = "component " + std::to_string(i) + ": ";
    if (c.mean.size() != d) throw DimensionError(tag + "mean dimension mismatch");
    if (!c.mean.allFinite()) throw ValidationError(tag + "non-finite mean");
    if (!(c.variance > 0.0) || !std::isfinite(c.variance))
      throw ValidationError(tag + "variance must be > 0");
    if (!(c.weight >= 0.0)) throw ValidationError(tag + "weight must be >= 0");
    if (c.class_id < 0) throw ValidationError(tag + "class_id must be >= 0");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ValidationError("mixture weights sum to " + std::to_string(total) + ", expected 1");
}

Dataset generate_gaussian(const GaussianMixtureSpec& spec, std::size_t n_per_component) {
  spec.validate();
  if (n_per_component < 1) throw ValidationError("n_per_component must be >= 1");
  const auto d = static_cast<Eigen::Index>(spec.dim());
  const double total = static_cast<double>(n_per_component * spec.components.size());
  std::vector<std::size_t> counts;
  std::size_t n_rows = 0;
  for (const auto& c : spec.components) {
    counts.push_back(static_cast<std::size_t>(std::floor(c.weight * total + 0.5)));
    n_rows += counts.back();
  }

  Dataset out;
  Label max_id = 0;
  for (const auto& c : spec.components) max_id = std::max(max_id, c.class_id);
  out.n_classes = max_id + 1;
  out.features.resize(static_cast<Eigen::Index>(n_rows), d);
  out.labels.reserve(n_rows);

  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < spec.components.size(); ++i) {
    const auto& c = spec.components[i];
    const double sd = std::sqrt(c.variance);
    for (std::size_t n = 0; n < counts[i]; ++n, ++row) {
      for (Eigen::Index j = 0; j < d; ++j) out.features(row, j) = c.mean[j] + sd * normal(rng);
      out.labels.push_back(c.class_id);
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const GaussianMixtureSpec& spec) {
  j = nlohmann::json::object();
  j["seed"] = spec.seed;
  auto& comps = j["components"] = nlohmann::json::array();
  for (const auto& c : spec.components) {
    comps.push_back({{"mean", std::vector<double>(c.mean.data(), c.mean.data() + c.mean.size())},
                     {"variance", c.variance},
                     {"weight", c.weight},
                     {"class_id", c.class_id}});
  }
}

void from_json(const nlohmann::json& j, GaussianMixtureSpec& spec) {
  spec.seed = j.value("seed", Seed{0});
  spec.components.clear();
  const auto& comps = j.at("components");
  for (const auto& cj : comps) {
    GaussianComponent c;
    auto mean = cj.at("mean").get<std::vector<double>>();
    c.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    c.variance = cj.at("variance").get<double>();
    c.weight = cj.value("weight", 1.0 / static_cast<double>(comps.size()));
    c.class_id = cj.at("class_id").get<Label>();
    spec.components.push_back(std::move(c));
  }
}

// ---------------------------------------------------------------------------
// Scenarios

RowSplit stratified_split(std::span<const Label> labels, int n_classes, double fraction,
                          Seed seed) {
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(n_classes));
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class.at(static_cast<std::size_t>(labels[i])).push_back(i);

  Rng rng(seed);
  RowSplit out;
  for (auto& rows : by_class) {
    if (rows.empty()) continue;
    std::shuffle(rows.begin(), rows.end(), rng);
    auto n_first = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(rows.size()) + 0.5));
    n_first = std::min(n_first, rows.size());
    out.first.insert(out.first.end(), rows.begin(), rows.begin() + static_cast<long>(n_first));
    out.second.insert(out.second.end(), rows.begin() + static_cast<long>(n_first), rows.end());
  }
  std::sort(out.first.begin(), out.first.end());
  std::sort(out.second.begin(), out.second.end());
  return out;
}

OpenSetScenario make_scenario(const Dataset& full, std::span<const Label> uu_class_ids,
                              double split_fraction, Seed seed) {
  full.validate();
  if (!(split_fraction > 0.0 && split_fraction < 1.0))
    throw ValidationError("split_fraction must lie in (0, 1)");
  auto counts = full.class_counts();
  std::vector<bool> is_uu(counts.size(), false);
  for (Label u : uu_class_ids) {
    if (u < 0 || u >= full.n_classes || counts[static_cast<std::size_t>(u)] == 0)
      throw ValidationError("unknown-class id " + std::to_string(u) + " not present in dataset");
    is_uu[static_cast<std::size_t>(u)] = true;
  }

  OpenSetScenario sc;
  std::vector<Label> remap(counts.size(), -1);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) continue;
    if (is_uu[c]) {
      sc.uu_class_ids.push_back(static_cast<Label>(c));
    } else {
      remap[c] = static_cast<Label>(sc.known_class_ids.size());
      sc.known_class_ids.push_back(static_cast<Label>(c));
    }
  }
  if (sc.known_class_ids.empty())
    throw ValidationError("unknown-class selection covers every class; no known classes left");

  auto split = stratified_split(full.labels, full.n_classes, split_fraction, seed);
  std::vector<std::size_t> train_rows;
  for (auto r : split.first)
    if (!is_uu[static_cast<std::size_t>(full.labels[r])]) train_rows.push_back(r);
  const auto& test_rows = split.second;

  const int m = sc.n_known();
  sc.train = full.subset(train_rows);
  sc.train.n_classes = m;
  for (auto& y : sc.train.labels) y = remap[static_cast<std::size_t>(y)];

  sc.test = full.subset(test_rows);
  sc.test_original_labels = sc.test.labels;
  sc.test.n_classes = sc.uu_class_ids.empty() ? m : m + 1;
  for (auto& y : sc.test.labels) {
    Label r = remap[static_cast<std::size_t>(y)];
    y = r >= 0 ? r : m;
  }
  return sc;
}

// ---------------------------------------------------------------------------
// Sampling, augmentation, folds

std::size_t sample_size_for(double c, std::size_t n_test) {
  if (!(c > 0.0 && c <= 1.0)) throw ValidationError("sample rate c must lie in (0, 1]");
  if (n_test == 0) return 0;
  auto n = static_cast<std::size_t>(std::floor(c * static_cast<double>(n_test) + 0.5));
  return std::clamp<std::size_t>(n, 1, n_test);
}

TestSample sample_test(const Dataset& test, double c, Seed seed) {
  const std::size_t n = test.size();
  const std::size_t n_sample = sample_size_for(c, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  TestSample out;
  out.sample_indices.assign(order.begin(), order.begin() + static_cast<long>(n_sample));
  out.remainder_indices.assign(order.begin() + static_cast<long>(n_sample), order.end());
  std::sort(out.sample_indices.begin(), out.sample_indices.end());
  std::sort(out.remainder_indices.begin(), out.remainder_indices.end());
  out.sample = test.subset(out.sample_indices);
  out.remainder = test.subset(out.remainder_indices);
  return out;
}

AugmentedDataset augment(const Dataset& train, const Dataset& sample, Label dummy_label) {
  if (dummy_label != train.n_classes)
    throw ValidationError("dummy label must be the next free id (" +
                          std::to_string(train.n_classes) + ")");
  if (!sample.empty() && sample.features.cols() != train.features.cols())
    throw DimensionError("sample dimension differs from training dimension");

  AugmentedDataset out;
  out.n_train = train.size();
  out.data.n_classes = train.n_classes + 1;
  out.data.features.resize(static_cast<Eigen::Index>(train.size() + sample.size()),
                           train.features.cols());
  if (train.size() > 0) out.data.features.topRows(train.features.rows()) = train.features;
  if (sample.size() > 0) out.data.features.bottomRows(sample.features.rows()) = sample.features;
  out.data.labels = train.labels;
  out.data.labels.insert(out.data.labels.end(), sample.size(), dummy_label);
  out.provenance.reserve(out.data.size());
  for (std::size_t i = 0; i < train.size(); ++i) out.provenance.push_back({Origin::Train, i});
  for (std::size_t i = 0; i < sample.size(); ++i) out.provenance.push_back({Origin::Sample, i});
  return out;
}

KFoldPlan kfold_indices(std::size_t n, int k, std::span<const Label> stratify_labels, Seed seed) {
  if (k < 2) throw ValidationError("k must be >= 2");
  if (static_cast<std::size_t>(k) > n)
    throw ValidationError("k (" + std::to_string(k) + ") exceeds sample count (" +
                          std::to_string(n) + ")");
  if (!stratify_labels.empty() && stratify_labels.size() != n)
    throw ValidationError("stratification labels length differs from n");

  const auto folds_n = static_cast<std::size_t>(k);
  Rng rng(seed);
  std::vector<std::size_t> assignment(n);

  bool stratified = !stratify_labels.empty();
  std::map<Label, std::vector<std::size_t>> groups;
  if (stratified) {
    for (std::size_t i = 0; i < n; ++i) groups[stratify_labels[i]].push_back(i);
    for (const auto& [label, rows] : groups)
      if (rows.size() < folds_n) stratified = false;
  }

  if (stratified) {
    // Deal each class round-robin, continuing where the previous class
    // stopped so that fold sizes stay within one of each other.
    std::size_t cursor = 0;
    for (auto& [label, rows] : groups) {
      std::shuffle(rows.begin(), rows.end(), rng);
      for (std::size_t r : rows) assignment[r] = cursor++ % folds_n;
    }
  } else {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < n; ++i) assignment[order[i]] = i % folds_n;
  }

  KFoldPlan plan;
  plan.stratified = stratified;
  plan.folds.resize(folds_n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < folds_n; ++f)
      (assignment[i] == f ? plan.folds[f].valid : plan.folds[f].train).push_back(i);
  return plan;
}

}  // namespace openrect
