#include "landscape/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "landscape/ad/dual.hpp"

namespace landscape {

namespace {

constexpr std::size_t kMaxAttempts = 1'000'000;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  bool coin() { return std::bernoulli_distribution(0.5)(rng_); }

  std::vector<double> unit_vector(std::size_t d) {
    std::vector<double> u(d);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& x : u) {
        x = gaussian();
        norm += x * x;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& x : u) x /= norm;
    return u;
  }

  std::vector<double> in_ball(std::size_t d, double radius) {
    auto u = unit_vector(d);
    const double r = radius * std::pow(uniform(0.0, 1.0), 1.0 / static_cast<double>(d));
    for (auto& x : u) x *= r;
    return u;
  }

  std::vector<double> in_box(std::size_t d, double half_width) {
    std::vector<double> x(d);
    for (auto& v : x) v = uniform(-half_width, half_width);
    return x;
  }

 private:
  std::mt19937_64 rng_;
};

void guard_attempts(std::size_t& attempts, const char* generator) {
  if (++attempts > kMaxAttempts) {
    throw std::runtime_error(std::string(generator) + ": could not place samples outside the margin band");
  }
}

std::vector<int> unit_exponent(std::size_t d, std::size_t k) {
  std::vector<int> e(d, 0);
  e[k] = 1;
  return e;
}

// All exponent vectors of total degree <= t, graded order.
void enumerate_monomials(std::size_t d, std::vector<int>& current, std::size_t pos, int remaining,
                         std::vector<std::vector<int>>& out) {
  if (pos == d) {
    out.push_back(current);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    current[pos] = e;
    enumerate_monomials(d, current, pos + 1, remaining - e, out);
  }
  current[pos] = 0;
}

int total_degree(const std::vector<int>& e) {
  int s = 0;
  for (int v : e) s += v;
  return s;
}

}  // namespace

// ------------------------------------------------------------------- Polynomial

double Polynomial::operator()(std::span<const double> x) const {
  double total = 0.0;
  for (const auto& term : terms) {
    double v = term.coeff;
    for (std::size_t k = 0; k < term.exponents.size() && k < x.size(); ++k) v *= ad::ipow(x[k], term.exponents[k]);
    total += v;
  }
  return total;
}

int Polynomial::degree() const {
  int deg = 0;
  for (const auto& term : terms) {
    if (term.coeff != 0.0) deg = std::max(deg, total_degree(term.exponents));
  }
  return deg;
}

// ---------------------------------------------------------------------- Dataset

Dataset::Dataset(std::size_t dim, std::vector<double> features, std::vector<int> labels, DatasetMeta meta)
    : dim_(dim), features_(std::move(features)), labels_(std::move(labels)), meta_(std::move(meta)) {
  if (dim_ == 0) throw std::invalid_argument("dataset dimension must be positive");
  if (labels_.empty()) throw std::invalid_argument("dataset must contain at least one sample");
  if (features_.size() != labels_.size() * dim_) {
    throw std::invalid_argument("feature matrix has " + std::to_string(features_.size()) + " entries, expected " +
                                std::to_string(labels_.size() * dim_));
  }
  for (int y : labels_) {
    if (y != 1 && y != -1) throw std::invalid_argument("labels must be -1 or +1, got " + std::to_string(y));
  }
  if (meta_.degree && *meta_.degree < 1) throw std::invalid_argument("declared degree must be >= 1");
}

std::optional<double> Dataset::witness_margin() const {
  if (!meta_.witness) return std::nullopt;
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i) m = std::min(m, labels_[i] * (*meta_.witness)(row(i)));
  return m;
}

// ------------------------------------------------------------------- generators

Dataset gen_linearly_separable(std::size_t n, std::size_t d, double margin, std::uint64_t seed) {
  if (!(margin > 0.0)) throw std::invalid_argument("margin must be positive");
  if (margin >= 2.5) throw std::invalid_argument("margin must be below 2.5 for samples in the radius-3 ball");
  if (n == 0 || d == 0) throw std::invalid_argument("n and d must be positive");
  Sampler s(seed);
  const auto normal = s.unit_vector(d);
  const double offset = s.uniform(-0.5, 0.5);

  Polynomial witness;
  for (std::size_t k = 0; k < d; ++k) witness.terms.push_back({normal[k], unit_exponent(d, k)});
  witness.terms.push_back({offset, std::vector<int>(d, 0)});

  std::vector<double> features;
  std::vector<int> labels;
  std::set<std::vector<double>> seen;
  std::size_t attempts = 0;
  while (labels.size() < n) {
    guard_attempts(attempts, "gen_linearly_separable");
    auto x = s.in_ball(d, 3.0);
    const double value = witness(x);
    if (std::abs(value) < margin || !seen.insert(x).second) continue;
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(value > 0.0 ? 1 : -1);
  }
  DatasetMeta meta{"linearly_separable", seed, 1, std::nullopt, std::move(witness), margin};
  return Dataset(d, std::move(features), std::move(labels), std::move(meta));
}

Dataset gen_xor() {
  Polynomial witness{{{1.0, {1, 1}}}};
  DatasetMeta meta{"xor", 0, 2, std::nullopt, std::move(witness), 1.0};
  return Dataset(2, {-1.0, -1.0, -1.0, 1.0, 1.0, -1.0, 1.0, 1.0}, {1, -1, -1, 1}, std::move(meta));
}

Dataset gen_poly_separable(std::size_t n, std::size_t d, int degree, std::uint64_t seed) {
  if (degree < 1) throw std::invalid_argument("polynomial degree must be >= 1");
  if (n == 0 || d == 0) throw std::invalid_argument("n and d must be positive");
  constexpr double kHalfWidth = 1.5;
  constexpr double kMargin = 0.1;
  constexpr std::size_t kCloud = 2000;
  Sampler s(seed);

  std::vector<std::vector<int>> monomials;
  std::vector<int> scratch(d, 0);
  enumerate_monomials(d, scratch, 0, degree, monomials);

  Polynomial poly;
  for (auto& e : monomials) {
    const double magnitude = s.uniform(0.5, 1.0);
    poly.terms.push_back({s.coin() ? magnitude : -magnitude, e});
  }
  // Centre on the median of a reference cloud so both labels are common,
  // then scale to max |P| = 1 on the cloud.
  std::vector<double> cloud_values;
  std::vector<std::vector<double>> cloud;
  for (std::size_t i = 0; i < kCloud; ++i) cloud.push_back(s.in_box(d, kHalfWidth));
  for (const auto& x : cloud) cloud_values.push_back(poly(x));
  auto sorted = cloud_values;
  std::nth_element(sorted.begin(), sorted.begin() + kCloud / 2, sorted.end());
  const double median = sorted[kCloud / 2];
  auto constant = std::find_if(poly.terms.begin(), poly.terms.end(),
                               [](const Polynomial::Term& t) { return total_degree(t.exponents) == 0; });
  constant->coeff -= median;
  double peak = 0.0;
  for (const auto& x : cloud) peak = std::max(peak, std::abs(poly(x)));
  for (auto& term : poly.terms) term.coeff /= peak;

  std::vector<double> features;
  std::vector<int> labels;
  std::set<std::vector<double>> seen;
  std::size_t attempts = 0;
  while (labels.size() < n) {
    guard_attempts(attempts, "gen_poly_separable");
    auto x = s.in_box(d, kHalfWidth);
    const double value = poly(x);
    if (std::abs(value) < kMargin || !seen.insert(x).second) continue;
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(value > 0.0 ? 1 : -1);
  }
  DatasetMeta meta{"poly_separable", seed, degree, std::nullopt, std::move(poly), kMargin};
  return Dataset(d, std::move(features), std::move(labels), std::move(meta));
}

Dataset gen_circles(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_circles needs n >= 2");
  Sampler s(seed);
  const std::size_t inner = (n + 1) / 2;
  std::vector<double> features;
  std::vector<int> labels;
  constexpr double kTwoPi = 6.283185307179586;
  for (std::size_t i = 0; i < n; ++i) {
    const bool is_inner = i < inner;
    const double angle = s.uniform(0.0, kTwoPi);
    const double u = s.uniform(0.0, 1.0);
    const double r = is_inner ? std::sqrt(u) : 2.8 - 0.8 * u;
    features.push_back(r * std::cos(angle));
    features.push_back(r * std::sin(angle));
    labels.push_back(is_inner ? 1 : -1);
  }
  Polynomial witness{{{2.25, {0, 0}}, {-1.0, {2, 0}}, {-1.0, {0, 2}}}};
  DatasetMeta meta{"circles", seed, 2, std::nullopt, std::move(witness), 1.25};
  return Dataset(2, std::move(features), std::move(labels), std::move(meta));
}

Dataset gen_conflicting(std::size_t n_groups, std::size_t dups, double flip_fraction, std::uint64_t seed) {
  if (n_groups == 0) throw std::invalid_argument("gen_conflicting needs at least one group");
  if (dups < 2) throw std::invalid_argument("gen_conflicting needs dups >= 2");
  if (!(flip_fraction >= 0.0 && flip_fraction <= 0.5)) {
    throw std::invalid_argument("flip_fraction must lie in [0, 1/2]");
  }
  const auto minority = static_cast<std::size_t>(std::llround(flip_fraction * static_cast<double>(dups)));
  if (2 * minority > dups) {
    throw std::invalid_argument("flip_fraction leaves no majority: " + std::to_string(minority) + " of " +
                                std::to_string(dups) + " flipped");
  }
  Sampler s(seed);
  std::vector<double> features;
  std::vector<int> labels;
  std::set<std::vector<double>> seen;
  while (seen.size() < n_groups) {
    auto x = s.in_box(2, 2.0);
    if (!seen.insert(x).second) continue;
    const int majority = s.coin() ? 1 : -1;
    for (std::size_t k = 0; k < dups; ++k) {
      features.insert(features.end(), x.begin(), x.end());
      labels.push_back(k < dups - minority ? majority : -majority);
    }
  }
  const double min_error =
      static_cast<double>(n_groups * minority) / static_cast<double>(n_groups * dups);
  DatasetMeta meta{"conflicting", seed, std::nullopt, min_error, std::nullopt, 0.0};
  return Dataset(2, std::move(features), std::move(labels), std::move(meta));
}

// ------------------------------------------------------------------- file format

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

namespace {

constexpr std::string_view kMagic = "# landscape-lab v1";

class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : std::runtime_error("dataset line " + std::to_string(line) + ": " + what) {}
};

double parse_double(std::string_view text, std::size_t line) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  while (first != last && *first == ' ') ++first;
  while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\r')) --last;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw FormatError(line, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view text, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw FormatError(line, "not an unsigned integer: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Witness encoding: coeff@e1.e2...ed terms joined by '|'.
std::string encode_witness(const Polynomial& p) {
  std::string out;
  for (std::size_t t = 0; t < p.terms.size(); ++t) {
    if (t > 0) out += '|';
    out += format_double(p.terms[t].coeff);
    out += '@';
    for (std::size_t k = 0; k < p.terms[t].exponents.size(); ++k) {
      if (k > 0) out += '.';
      out += std::to_string(p.terms[t].exponents[k]);
    }
  }
  return out;
}

Polynomial decode_witness(std::string_view text, std::size_t line) {
  Polynomial p;
  for (auto term : split(text, '|')) {
    const auto at = term.find('@');
    if (at == std::string_view::npos) throw FormatError(line, "bad witness term '" + std::string(term) + "'");
    Polynomial::Term t;
    t.coeff = parse_double(term.substr(0, at), line);
    for (auto e : split(term.substr(at + 1), '.')) t.exponents.push_back(static_cast<int>(parse_uint(e, line)));
    p.terms.push_back(std::move(t));
  }
  return p;
}

}  // namespace

std::string to_text(const Dataset& data) {
  const auto& m = data.meta();
  std::ostringstream os;
  os << kMagic << "; d=" << data.dim() << "; n=" << data.size() << "; generator=" << m.generator
     << "; t=" << (m.degree ? std::to_string(*m.degree) : std::string("none")) << "; seed=" << m.seed;
  if (m.min_error) os << "; min_error=" << format_double(*m.min_error);
  if (m.witness) os << "; margin=" << format_double(m.margin) << "; witness=" << encode_witness(*m.witness);
  os << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double x : data.row(i)) os << format_double(x) << ',';
    os << data.label(i) << '\n';
  }
  return os.str();
}

Dataset from_text(const std::string& text) {
  std::istringstream is(text);
  std::string header;
  if (!std::getline(is, header)) throw FormatError(1, "empty file");
  if (header.rfind(kMagic, 0) != 0) throw FormatError(1, "missing '# landscape-lab v1' header");

  std::map<std::string, std::string, std::less<>> fields;
  const auto parts = split(std::string_view(header).substr(kMagic.size()), ';');
  for (auto part : parts) {
    part = trim(part);
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) throw FormatError(1, "bad header field '" + std::string(part) + "'");
    fields.emplace(std::string(part.substr(0, eq)), std::string(part.substr(eq + 1)));
  }
  for (const char* key : {"d", "n", "generator", "t", "seed"}) {
    if (!fields.contains(key)) throw FormatError(1, std::string("header lacks field '") + key + "'");
  }
  const auto d = static_cast<std::size_t>(parse_uint(fields["d"], 1));
  const auto n = static_cast<std::size_t>(parse_uint(fields["n"], 1));
  DatasetMeta meta;
  meta.generator = fields["generator"];
  meta.seed = parse_uint(fields["seed"], 1);
  if (fields["t"] != "none") meta.degree = static_cast<int>(parse_uint(fields["t"], 1));
  if (auto it = fields.find("min_error"); it != fields.end()) meta.min_error = parse_double(it->second, 1);
  if (auto it = fields.find("margin"); it != fields.end()) meta.margin = parse_double(it->second, 1);
  if (auto it = fields.find("witness"); it != fields.end()) meta.witness = decode_witness(it->second, 1);

  std::vector<double> features;
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != d + 1) {
      throw FormatError(lineno, "expected " + std::to_string(d + 1) + " columns, found " + std::to_string(cells.size()));
    }
    for (std::size_t k = 0; k < d; ++k) features.push_back(parse_double(cells[k], lineno));
    const auto label_text = trim(cells[d]);
    if (label_text != "1" && label_text != "-1" && label_text != "+1") {
      throw FormatError(lineno, "label must be -1 or +1, got '" + std::string(label_text) + "'");
    }
    labels.push_back(label_text == "-1" ? -1 : 1);
  }
  if (labels.size() != n) {
    throw FormatError(lineno, "header declares n=" + std::to_string(n) + " but file has " +
                                  std::to_string(labels.size()) + " rows");
  }
  return Dataset(d, std::move(features), std::move(labels), std::move(meta));
}

void save(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << to_text(data);
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

Dataset load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

}  // namespace landscape
