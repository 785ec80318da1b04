#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"
#include "zograd/acceptance.hpp"
#include "zograd/errors.hpp"
#include "zograd/estimators.hpp"
#include "zograd/numeric.hpp"
#include "zograd/risk.hpp"
#include "zograd/verify.hpp"
#include "zograd/worstcase.hpp"

namespace zograd::cli {

using json = nlohmann::json;

ConfigError::ConfigError(const std::string& message, std::string file, int line)
    : std::runtime_error(message), file_(std::move(file)), line_(line) {}

std::string ConfigError::where() const {
  if (file_.empty()) return "command line";
  return line_ > 0 ? file_ + ":" + std::to_string(line_) : file_;
}

namespace {

const std::set<std::string> kCommands{"bounds", "risk-curve", "brute-force", "sp-demo", "worstcase", "verify"};
const std::set<std::string> kKeys{"command", "a",         "b",   "p",   "q",    "n",      "n_list", "eps",   "estimator",
                                  "delta",   "reps",      "seed", "rho_list", "h", "out", "format", "workers"};

// Where a key's value came from, for error messages.
struct Source {
  std::string file;
  int line = 0;
};

class Reader {
 public:
  Reader(const json& doc, std::map<std::string, Source> sources) : doc_(doc), sources_(std::move(sources)) {}

  bool has(const std::string& key) const { return doc_.contains(key); }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    const auto it = sources_.find(key);
    if (it == sources_.end()) throw ConfigError(key + ": " + message);
    throw ConfigError(key + ": " + message, it->second.file, it->second.line);
  }

  double real(const std::string& key, bool positive) const {
    const auto& v = doc_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    if (positive && !(x > 0.0)) fail(key, "must be positive");
    return x;
  }

  long long integer(const std::string& key, long long lo, long long hi) const {
    return integer_value(key, doc_.at(key), lo, hi);
  }

  long long integer_value(const std::string& key, const json& v, long long lo, long long hi) const {
    if (!v.is_number_integer() && !v.is_number_unsigned()) fail(key, "expected an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi) fail(key, "must be between " + std::to_string(lo) + " and " + std::to_string(hi));
    return x;
  }

  std::string text(const std::string& key) const {
    const auto& v = doc_.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  const json& raw(const std::string& key) const { return doc_.at(key); }

 private:
  const json& doc_;
  std::map<std::string, Source> sources_;
};

int line_of(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

int key_line(const std::string& text, const std::string& key) {
  const std::regex pattern("\"" + key + "\"\\s*:");
  std::smatch m;
  if (std::regex_search(text, m, pattern)) return line_of(text, static_cast<std::size_t>(m.position(0)));
  return 0;
}

json parse_flag(const std::string& key, const std::string& value) {
  static const std::set<std::string> strings{"command", "q", "estimator", "out", "format"};
  if (strings.contains(key)) return value;
  if (key == "delta" && value == "optimal") return value;
  if (key == "n_list" || key == "rho_list") {
    json arr = json::array();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) arr.push_back(parse_flag(key == "n_list" ? "n" : "a", item));
    return arr;
  }
  try {
    auto v = json::parse(value);
    if (!v.is_number()) throw ConfigError(key + ": expected a number, got '" + value + "'");
    return v;
  } catch (const json::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

Norm norm_value(const Reader& r, const json& v) {
  std::string s;
  if (v.is_string()) {
    s = v.get<std::string>();
  } else if (v.is_number_integer()) {
    s = std::to_string(v.get<long long>());
  } else {
    r.fail("q", "expected 1, 2 or \"inf\"");
  }
  try {
    return parse_norm(s);
  } catch (const InputError&) {
    r.fail("q", "expected 1, 2 or \"inf\", got '" + s + "'");
  }
}

}  // namespace

ExperimentConfig load_config(const std::string& config_path, const FlagValues& flags,
                             std::optional<std::uint64_t> default_seed) {
  json doc = json::object();
  std::map<std::string, Source> sources;

  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file", config_path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("invalid JSON: ") + e.what(), config_path, line_of(text, e.byte));
    }
    if (!doc.is_object()) throw ConfigError("top level must be an object", config_path, 1);
    for (const auto& [key, value] : doc.items()) {
      const int line = key_line(text, key);
      if (!kKeys.contains(key)) throw ConfigError("unknown key '" + key + "'", config_path, line);
      sources[key] = {config_path, line};
    }
  }

  for (const auto& [key, value] : flags) {
    if (!kKeys.contains(key)) throw ConfigError("unknown option '" + key + "'");
    doc[key] = parse_flag(key, value);
    sources.erase(key);
  }

  const Reader r(doc, sources);
  ExperimentConfig c;
  if (default_seed) c.seed = *default_seed;

  if (!r.has("command")) throw ConfigError("no command given");
  c.command = r.text("command");
  if (!kCommands.contains(c.command)) r.fail("command", "unknown command '" + c.command + "'");

  if (r.has("a")) c.a = r.real("a", true);
  if (r.has("b")) c.b = r.real("b", true);
  if (r.has("p")) c.p = static_cast<int>(r.integer("p", 1, 1 << 20));
  if (r.has("q")) c.q = norm_value(r, r.raw("q"));
  if (r.has("n") && r.has("n_list")) r.fail("n_list", "give either n or n_list, not both");
  if (r.has("n")) c.n_list = {static_cast<int>(r.integer("n", 1, 1 << 30))};
  if (r.has("n_list")) {
    const auto& arr = r.raw("n_list");
    if (!arr.is_array() || arr.empty()) r.fail("n_list", "expected a non-empty array of integers");
    c.n_list.clear();
    for (const auto& v : arr) c.n_list.push_back(static_cast<int>(r.integer_value("n_list", v, 1, 1 << 30)));
  }
  if (r.has("eps")) c.eps = r.real("eps", true);
  if (r.has("estimator")) {
    c.estimator = r.text("estimator");
    const bool known = c.estimator == "cfd" || c.estimator == "ffd" || c.estimator == "sp" ||
                       (c.estimator.rfind("custom:", 0) == 0 && c.estimator.size() > 7);
    if (!known) r.fail("estimator", "expected cfd, ffd, sp or custom:FILE");
  }
  if (r.has("delta")) {
    const auto& v = r.raw("delta");
    if (v.is_string()) {
      if (v.get<std::string>() != "optimal") r.fail("delta", "expected \"optimal\" or a positive number");
    } else {
      c.delta = r.real("delta", true);
    }
  }
  if (r.has("reps")) c.reps = static_cast<std::uint64_t>(r.integer("reps", 100, 1'000'000'000LL));
  if (r.has("seed")) c.seed = static_cast<std::uint64_t>(r.integer("seed", 0, std::numeric_limits<long long>::max()));
  if (r.has("rho_list")) {
    const auto& arr = r.raw("rho_list");
    if (!arr.is_array() || arr.empty()) r.fail("rho_list", "expected a non-empty array of numbers");
    c.rho_list.clear();
    for (const auto& v : arr) {
      if (!v.is_number() || !std::isfinite(v.get<double>())) r.fail("rho_list", "expected numbers");
      c.rho_list.push_back(v.get<double>());
    }
  }
  if (r.has("h")) c.h = r.real("h", true);
  if (r.has("out")) c.out = r.text("out");
  if (r.has("format")) {
    c.format = r.text("format");
    if (c.format != "csv" && c.format != "json" && c.format != "svg") r.fail("format", "expected csv, json or svg");
    if (c.format == "svg" && c.command != "worstcase") r.fail("format", "svg is only available for worstcase");
  }
  if (r.has("workers")) c.workers = static_cast<unsigned>(r.integer("workers", 0, 1024));

  if (c.command == "brute-force") {
    for (int n : c.n_list) {
      if (n < 2 || n > 4) r.fail(r.has("n_list") ? "n_list" : "n", "brute-force supports n in {2, 3, 4}");
    }
  }
  if (c.command == "worstcase" && c.p > 2) r.fail("p", "worstcase samples p = 1 or p = 2 only");
  if (c.command == "risk-curve" && c.estimator == "cfd") {
    for (int n : c.n_list) {
      if (n % (2 * c.p) != 0) r.fail(r.has("n_list") ? "n_list" : "n", "cfd needs n to be a multiple of 2p");
    }
  }
  if (c.command == "risk-curve" && c.estimator == "ffd") {
    if (c.p != 1) r.fail("p", "ffd is one-dimensional");
    for (int n : c.n_list) {
      if (n % 2 != 0) r.fail(r.has("n_list") ? "n_list" : "n", "ffd needs an even n");
    }
  }
  if (c.command == "risk-curve" && c.estimator == "sp") {
    for (int n : c.n_list) {
      if (n % 2 != 0) r.fail(r.has("n_list") ? "n_list" : "n", "sp needs an even n");
    }
  }
  return c;
}

namespace {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string q_name(Norm q) { return to_string(q); }

std::uint64_t reps_or(const ExperimentConfig& c, std::uint64_t fallback) { return c.reps.value_or(fallback); }

McOptions mc(const ExperimentConfig& c, std::uint64_t salt = 0) {
  return {reps_or(c, 100'000), c.seed + salt, c.workers};
}

LinearDesign load_custom_design(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open design file", path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what(), path);
  }
  const auto as_points = [&](const char* key) {
    if (!doc.contains(key) || !doc[key].is_array()) throw ConfigError(std::string("missing array '") + key + "'", path);
    std::vector<Point> pts;
    for (const auto& v : doc[key]) {
      if (v.is_number()) {
        pts.push_back({v.get<double>()});
      } else if (v.is_array()) {
        Point pt;
        for (const auto& x : v) {
          if (!x.is_number()) throw ConfigError(std::string(key) + ": expected numbers", path);
          pt.push_back(x.get<double>());
        }
        pts.push_back(std::move(pt));
      } else {
        throw ConfigError(std::string(key) + ": expected numbers or arrays of numbers", path);
      }
    }
    return pts;
  };
  try {
    return LinearDesign(as_points("deltas"), as_points("weights"));
  } catch (const InputError& e) {
    throw ConfigError(e.what(), path);
  }
}

}  // namespace

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) out << format_double(v);
            else if constexpr (std::is_same_v<T, long long>) out << v;
            else if constexpr (std::is_same_v<T, std::string>) out << v;
          },
          row[i]);
    }
    out << "\n";
  }
}

void write_json(const Table& table, std::ostream& out) {
  json doc;
  doc["command"] = table.command;
  doc["columns"] = table.columns;
  json rows = json::array();
  for (const auto& row : table.rows) {
    json r = json::array();
    for (const auto& cell : row) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) r.push_back(nullptr);
            else if constexpr (std::is_same_v<T, double>) {
              if (std::isfinite(v)) r.push_back(v);
              else r.push_back(format_double(v));
            } else r.push_back(v);
          },
          cell);
    }
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << "\n";
}

Table bounds_table(const ExperimentConfig& c) {
  Table t{"bounds",
          {"n", "p", "q", "a", "b", "linear_lower", "linear_lower_same_sign", "cfd_upper", "general_lower"},
          {}};
  for (int n : c.n_list) {
    BoundQuery query{n, c.a, c.b, c.p, c.q, BoundFlavor::linear_lower};
    const double lin = bound_value(query);
    query.flavor = BoundFlavor::linear_lower_same_sign;
    const double same = bound_value(query);
    Cell cfd;
    if (n % (2 * c.p) == 0) {
      query.flavor = BoundFlavor::cfd_upper;
      cfd = bound_value(query);
    }
    query.flavor = BoundFlavor::general_lower;
    const double gen = bound_value(query);
    t.rows.push_back({static_cast<long long>(n), static_cast<long long>(c.p), q_name(c.q), c.a, c.b, lin, same, cfd,
                      gen});
  }
  return t;
}

Table risk_curve_table(const ExperimentConfig& c) {
  Table t{"risk-curve", {"n", "delta", "mse", "bias_sq", "variance", "std_error", "bound"}, {}};
  const auto spec = FunctionClassSpec::centered(c.a, c.p, c.q);
  const Point x0(static_cast<std::size_t>(c.p), 0.0);

  const auto push = [&](int n, double delta, const RiskReport& r) {
    const double bound = linear_minimax_lower({n, c.a, c.b, c.p, c.q, BoundFlavor::linear_lower});
    t.rows.push_back({static_cast<long long>(n), delta, r.mse, r.bias_sq, r.variance, r.std_error, bound});
  };

  if (c.estimator.rfind("custom:", 0) == 0) {
    const auto design = load_custom_design(c.estimator.substr(7));
    if (design.dimension() != c.p) throw ConfigError("custom design dimension does not match p");
    push(static_cast<int>(design.size()), std::numeric_limits<double>::quiet_NaN(),
         spike_mc_mse(design, spec, c.b, mc(c)));
    return t;
  }

  for (int n : c.n_list) {
    const auto salt = static_cast<std::uint64_t>(n);
    if (c.estimator == "cfd") {
      const double delta = c.delta.value_or(optimal_delta(c.a, c.b, n, c.p));
      push(n, delta, spike_mc_mse(cfd_design_multi(n, c.p, delta), spec, c.b, mc(c, salt)));
    } else if (c.estimator == "ffd") {
      // The one-sided design has unbounded worst case; measure it on the
      // class member a/2 x^2 instead.
      const double curv = c.a;
      const Function f = [curv](std::span<const double> x) { return 0.5 * curv * x[0] * x[0]; };
      const double grad[] = {0.0};
      double delta = 0.0;
      if (c.delta) {
        delta = *c.delta;
      } else {
        delta = log_golden_section_minimize(
                    [&](double d) { return fixed_function_mse(forward_difference_design(n, d), f, grad, x0, c.b); },
                    1e-6, 1e3, 1e-10)
                    .x;
      }
      push(n, delta, mc_mse(forward_difference_design(n, delta), f, grad, NoiseSpec::gaussian(c.b), x0, mc(c, salt)));
    } else {
      // SP on the linear function 1^T x: its bias is zero, the cross terms
      // of the perturbation make up the risk.
      const Function f = [](std::span<const double> x) { return compensated_sum(x); };
      const Point grad(static_cast<std::size_t>(c.p), 1.0);
      const SPConfig sp{c.h, n, PerturbationLaw::rademacher()};
      push(n, c.h, mc_mse(sp, f, grad, NoiseSpec::gaussian(c.b), x0, mc(c, salt)));
    }
  }
  return t;
}

Table brute_force_table(const ExperimentConfig& c) {
  Table t{"brute-force", {"n", "a", "b", "value", "bound", "designs_evaluated", "j", "delta", "weight"}, {}};
  for (int n : c.n_list) {
    const auto res = brute_force_linear_minimax(n, c.a, c.b);
    const double bound = linear_minimax_lower({n, c.a, c.b, 1, Norm::l2, BoundFlavor::linear_lower});
    for (std::size_t j = 0; j < res.design.size(); ++j) {
      t.rows.push_back({static_cast<long long>(n), c.a, c.b, res.value, bound, static_cast<long long>(res.evaluated),
                        static_cast<long long>(j + 1), res.design.deltas()[j][0], res.design.weights()[j][0]});
    }
  }
  return t;
}

Table sp_demo_table(const ExperimentConfig& c) {
  Table t{"sp-demo", {"rho", "p", "n", "h", "empirical", "std_error", "analytic"}, {}};
  const int n = c.n_list.front();
  if (n % 2 != 0) throw ConfigError("n: sp-demo needs an even n");
  const auto curve = sp_blowup_curve(c.rho_list, c.p, n, c.h, reps_or(c, 100'000), c.seed, c.workers);
  for (const auto& pt : curve) {
    t.rows.push_back({pt.rho, static_cast<long long>(c.p), static_cast<long long>(n), c.h, pt.empirical.mse,
                      pt.empirical.std_error, pt.analytic});
  }
  return t;
}

namespace {

// Sample positions are multiples of the maximizer offset so that the peak
// itself is on the grid.
constexpr int kLine = 2001;
constexpr int kLattice = 101;

ExtremalFunction worstcase_function(const ExperimentConfig& c) {
  return f_star_multi(c.eps, FunctionClassSpec::centered(c.a, c.p, c.q));
}

double peak_offset(const ExtremalFunction& f) { return norm(f.maximizer(), Norm::linf); }

}  // namespace

Table worstcase_table(const ExperimentConfig& c) {
  const auto f = worstcase_function(c);
  const double m = peak_offset(f);
  Table t;
  t.command = "worstcase";
  if (c.p == 1) {
    t.columns = {"x", "f_star"};
    const int half = (kLine - 1) / 2;
    for (int k = 0; k < kLine; ++k) {
      const Point x{m * static_cast<double>(k - half) / (half / 2)};
      t.rows.push_back({x[0], f(x)});
    }
  } else {
    t.columns = {"x1", "x2", "f_star"};
    const int half = (kLattice - 1) / 2;
    for (int i = 0; i < kLattice; ++i) {
      for (int k = 0; k < kLattice; ++k) {
        const Point x{m * static_cast<double>(i - half) / (half / 2), m * static_cast<double>(k - half) / (half / 2)};
        t.rows.push_back({x[0], x[1], f(x)});
      }
    }
  }
  return t;
}

void write_worstcase_svg(const ExperimentConfig& c, std::ostream& out) {
  const auto table = worstcase_table(c);
  constexpr double width = 640.0;
  constexpr double height = 400.0;
  const auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  const auto value = [](const Cell& cell) { return std::get<double>(cell); };

  double lo = 0.0;
  double hi = 0.0;
  const std::size_t fcol = table.columns.size() - 1;
  for (const auto& row : table.rows) {
    lo = std::min(lo, value(row[fcol]));
    hi = std::max(hi, value(row[fcol]));
  }
  const double span = std::max(hi - lo, 1e-300);
  const double xmin = value(table.rows.front()[0]);
  const double xmax = value(table.rows.back()[0]);

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  if (c.p == 1) {
    const double y0 = height - (0.0 - lo) / span * height;
    out << "<line x1=\"0\" y1=\"" << num(y0) << "\" x2=\"" << width << "\" y2=\"" << num(y0)
        << "\" stroke=\"#999\"/>\n<polyline fill=\"none\" stroke=\"#1f4e9a\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const double px = (value(table.rows[i][0]) - xmin) / (xmax - xmin) * width;
      const double py = height - (value(table.rows[i][1]) - lo) / span * height;
      out << (i ? " " : "") << num(px) << "," << num(py);
    }
    out << "\"/>\n";
  } else {
    const double cell_w = width / kLattice;
    const double cell_h = height / kLattice;
    const double amp = std::max(std::abs(lo), std::abs(hi));
    for (std::size_t idx = 0; idx < table.rows.size(); ++idx) {
      const auto i = idx / kLattice;
      const auto k = idx % kLattice;
      const double v = amp > 0.0 ? value(table.rows[idx][2]) / amp : 0.0;
      const int red = v > 0 ? 255 : static_cast<int>(std::lround(255 * (1 + v)));
      const int blue = v < 0 ? 255 : static_cast<int>(std::lround(255 * (1 - v)));
      const int green = static_cast<int>(std::lround(255 * (1 - std::abs(v))));
      out << "<rect x=\"" << num(i * cell_w) << "\" y=\"" << num(height - (k + 1) * cell_h) << "\" width=\""
          << num(cell_w) << "\" height=\"" << num(cell_h) << "\" fill=\"rgb(" << red << "," << green << "," << blue
          << ")\"/>\n";
    }
  }
  out << "</svg>\n";
}

int run(const ExperimentConfig& c, std::ostream& out) {
  if (c.command == "verify") {
    AcceptanceOptions options;
    options.seed = c.seed;
    options.workers = c.workers;
    if (c.reps) {
      options.reps = *c.reps;
      options.rate_reps = std::min<std::uint64_t>(*c.reps, options.rate_reps);
    }
    const auto results = run_acceptance(options);
    bool ok = true;
    if (c.format == "json") {
      json doc;
      doc["command"] = "verify";
      doc["columns"] = {"id", "title", "passed", "detail"};
      doc["rows"] = json::array();
      for (const auto& r : results) {
        doc["rows"].push_back({r.id, r.title, r.passed ? "pass" : "fail", r.detail});
        ok = ok && r.passed;
      }
      out << doc.dump(2) << "\n";
    } else {
      ok = print_acceptance(results, out);
    }
    return ok ? 0 : 1;
  }

  if (c.command == "worstcase" && c.format == "svg") {
    write_worstcase_svg(c, out);
    return 0;
  }

  Table table;
  if (c.command == "bounds") table = bounds_table(c);
  else if (c.command == "risk-curve") table = risk_curve_table(c);
  else if (c.command == "brute-force") table = brute_force_table(c);
  else if (c.command == "sp-demo") table = sp_demo_table(c);
  else table = worstcase_table(c);

  if (c.format == "json") write_json(table, out);
  else write_csv(table, out);
  return 0;
}

}  // namespace zograd::cli
