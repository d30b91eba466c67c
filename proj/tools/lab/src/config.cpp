#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "lab/experiment.hpp"

namespace lab {

namespace pt = boost::property_tree;
using landscape::Augmentation;

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
  return v;
}

long long parse_int(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(field, "expected an integer, got '" + text + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& field, const std::string& text) {
  const long long v = parse_int(field, text);
  if (v < 0) throw ConfigError(field, "must be non-negative, got " + text);
  return static_cast<std::size_t>(v);
}

template <class F>
void wrap(const std::string& field, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(field, e.what());
  }
}

using Setter = std::function<void(const std::string& field, const std::string& value)>;
using SectionTable = std::map<std::string, Setter>;

std::map<std::string, SectionTable> field_table(ExperimentConfig& c) {
  auto real = [](double& dst) {
    return [&dst](const std::string& f, const std::string& v) { dst = parse_real(f, v); };
  };
  auto count = [](std::size_t& dst) {
    return [&dst](const std::string& f, const std::string& v) { dst = parse_count(f, v); };
  };
  auto u64 = [](std::uint64_t& dst) {
    return [&dst](const std::string& f, const std::string& v) { dst = parse_count(f, v); };
  };
  auto integer = [](int& dst) {
    return [&dst](const std::string& f, const std::string& v) { dst = static_cast<int>(parse_int(f, v)); };
  };

  std::map<std::string, SectionTable> t;
  auto& ds = c.dataset;
  t["dataset"] = {
      {"generator", [&ds](const std::string&, const std::string& v) { ds.generator = trim(v); }},
      {"n", count(ds.n)},
      {"d", count(ds.d)},
      {"degree", integer(ds.degree)},
      {"margin", real(ds.margin)},
      {"groups", count(ds.groups)},
      {"dups", count(ds.dups)},
      {"flip_fraction", real(ds.flip_fraction)},
      {"seed", u64(ds.seed)},
      {"path", [&ds](const std::string&, const std::string& v) { ds.path = trim(v); }},
  };
  t["network"] = {
      {"widths",
       [&c](const std::string& f, const std::string& v) {
         c.network.widths.clear();
         for (const auto& item : split_list(v)) {
           const std::size_t w = parse_count(f, item);
           if (w == 0) throw ConfigError(f, "layer widths must be >= 1");
           c.network.widths.push_back(w);
         }
       }},
      {"activation",
       [&c](const std::string& f, const std::string& v) {
         wrap(f, [&] { c.network.activation = landscape::Activation::parse(trim(v)); });
       }},
  };
  t["augmentation"] = {
      {"mode",
       [&c](const std::string& f, const std::string& v) {
         wrap(f, [&] { c.augmentation = Augmentation::parse(trim(v), c.augmentation.degree); });
       }},
      {"degree",
       [&c](const std::string& f, const std::string& v) { c.augmentation.degree = static_cast<int>(parse_int(f, v)); }},
  };
  t["loss"] = {
      {"power", integer(c.power)},
      {"lambda",
       [&c](const std::string& f, const std::string& v) {
         c.lambdas.clear();
         for (const auto& item : split_list(v)) c.lambdas.push_back(parse_real(f, item));
       }},
  };
  t["run"] = {
      {"seeds", count(c.seeds)},
      {"threads", count(c.threads)},
      {"seed_offset", u64(c.seed_offset)},
  };
  auto& o = c.optimizer;
  t["optimizer"] = {
      {"max_iters", count(o.max_iters)},
      {"grad_tol", real(o.grad_tol)},
      {"init_scale", real(o.init_scale)},
      {"perturb_radius", real(o.perturb_radius)},
      {"max_perturbations", integer(o.max_perturbations)},
      {"patience", count(o.patience)},
      {"hessian_tol", real(o.hessian_tol)},
      {"armijo", real(o.armijo)},
      {"initial_step", real(o.initial_step)},
      {"max_step", real(o.max_step)},
      {"polish_after", count(o.polish_after)},
  };
  auto& th = c.thresholds;
  t["thresholds"] = {
      {"grad", real(th.grad)},
      {"hessian", real(th.hessian)},
      {"inactivity", real(th.inactivity)},
      {"tensor_rel", real(th.tensor_rel)},
      {"max_order", integer(th.max_order)},
      {"probe_c", real(th.probe_c)},
      {"probe_radius", real(th.probe_radius)},
      {"probe_dirs", integer(th.probe_dirs)},
      {"probe_seed", u64(th.probe_seed)},
      {"restarts", integer(th.restarts)},
  };
  t["output"] = {
      {"dir", [&c](const std::string&, const std::string& v) { c.out_dir = trim(v); }},
  };
  return t;
}

const std::set<std::string> kGenerators = {"xor", "circles", "poly_separable", "linearly_separable", "conflicting",
                                           "file"};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", "line " + std::to_string(e.line()) + ": " + e.message());
  }
  ExperimentConfig cfg;
  cfg.network.widths = {2};
  const auto table = field_table(cfg);
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError(section, "key outside of any section");
    const auto st = table.find(section);
    if (st == table.end()) throw ConfigError(section, "unknown section");
    std::vector<std::pair<std::string, std::string>> entries;
    for (const auto& [key, value] : body) {
      if (!value.empty()) throw ConfigError(section + "." + key, "nested keys are not supported");
      entries.emplace_back(key, value.data());
    }
    // "mode" may need a degree given later in the same section.
    std::stable_partition(entries.begin(), entries.end(), [](const auto& e) { return e.first == "degree"; });
    for (const auto& [key, value] : entries) {
      const std::string field = section + "." + key;
      const auto setter = st->second.find(key);
      if (setter == st->second.end()) throw ConfigError(field, "unknown key");
      setter->second(field, value);
      cfg.echo[field] = trim(value);
    }
  }
  if (cfg.augmentation.kind != landscape::AugmentationKind::skip_monomial) cfg.augmentation.degree = 0;
  if (!tree.get_child_optional("dataset") || !tree.get_child("dataset").get_child_optional("generator")) {
    throw ConfigError("dataset.generator", "required");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void ExperimentConfig::validate() const {
  const auto& ds = dataset;
  if (!kGenerators.count(ds.generator)) throw ConfigError("dataset.generator", "unknown generator '" + ds.generator + "'");
  if (ds.generator == "file") {
    if (ds.path.empty()) throw ConfigError("dataset.path", "required when generator = file");
    if (!std::filesystem::exists(ds.path)) throw ConfigError("dataset.path", "no such file " + ds.path.string());
  }
  if ((ds.generator == "circles" || ds.generator == "poly_separable" || ds.generator == "linearly_separable") &&
      ds.n == 0) {
    throw ConfigError("dataset.n", "must be >= 1");
  }
  if ((ds.generator == "poly_separable" || ds.generator == "linearly_separable") &&
      (ds.d == 0 || ds.d > landscape::kMaxInputDim)) {
    throw ConfigError("dataset.d", "must lie in [1, " + std::to_string(landscape::kMaxInputDim) + "]");
  }
  if (ds.generator == "poly_separable" && ds.degree < 1) throw ConfigError("dataset.degree", "must be >= 1");
  if (ds.generator == "linearly_separable" && !(ds.margin > 0.0)) throw ConfigError("dataset.margin", "must be > 0");
  if (ds.generator == "conflicting") {
    if (ds.groups == 0) throw ConfigError("dataset.groups", "must be >= 1");
    if (ds.dups < 2) throw ConfigError("dataset.dups", "must be >= 2");
    if (!(ds.flip_fraction >= 0.0 && ds.flip_fraction <= 0.5)) {
      throw ConfigError("dataset.flip_fraction", "must lie in [0, 0.5]");
    }
  }
  if (network.widths.empty() && augmentation.kind == landscape::AugmentationKind::per_layer_exp) {
    throw ConfigError("network.widths", "per_layer_exp needs at least one hidden layer");
  }
  if (augmentation.kind == landscape::AugmentationKind::skip_monomial && augmentation.degree < 1) {
    throw ConfigError("augmentation.degree", "monomial degree must be >= 1");
  }
  if (power < 3) throw ConfigError("loss.power", "hinge power must be >= 3");
  if (lambdas.empty()) throw ConfigError("loss.lambda", "at least one lambda is required");
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw ConfigError("loss.lambda", "lambda must be non-negative");
    if (augmentation.augmented() && !(l > 0.0)) throw ConfigError("loss.lambda", "lambda must be > 0 when augmented");
  }
  if (seeds < 1) throw ConfigError("run.seeds", "seed count must be \xE2\x89\xA5 1");
  if (threads < 1) throw ConfigError("run.threads", "must be >= 1");
  wrap("optimizer", [&] { optimizer.validate(); });
  wrap("thresholds", [&] { thresholds.validate(); });
}

landscape::Dataset ExperimentConfig::make_dataset() const {
  const auto& ds = dataset;
  try {
    if (ds.generator == "xor") return landscape::gen_xor();
    if (ds.generator == "circles") return landscape::gen_circles(ds.n, ds.seed);
    if (ds.generator == "poly_separable") return landscape::gen_poly_separable(ds.n, ds.d, ds.degree, ds.seed);
    if (ds.generator == "linearly_separable") {
      return landscape::gen_linearly_separable(ds.n, ds.d, ds.margin, ds.seed);
    }
    if (ds.generator == "conflicting") {
      return landscape::gen_conflicting(ds.groups, ds.dups, ds.flip_fraction, ds.seed);
    }
    return landscape::load(ds.path);
  } catch (const std::exception& e) {
    throw ConfigError("dataset", e.what());
  }
}

std::vector<Arm> arms_for(const ExperimentConfig& cfg, bool compare) {
  if (!compare) return {{cfg.augmentation.name(), cfg.augmentation}};
  return {{"baseline", Augmentation::none()}, {cfg.augmentation.name(), cfg.augmentation}};
}

}  // namespace lab
