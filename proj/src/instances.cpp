#include "emsp/instances.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace emsp {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  for (auto& w : s_) w = splitmix64(seed);
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::int64_t Rng::integer(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("empty integer range");
  const double span = static_cast<double>(hi - lo + 1);
  return lo + std::min(static_cast<std::int64_t>(uniform() * span), hi - lo);
}

const char* to_string(Family f) {
  switch (f) {
    case Family::cdp: return "cdp";
    case Family::gdp_f: return "gdp_f";
    case Family::gdp_v: return "gdp_v";
    case Family::blmsdp: return "blmsdp";
  }
  return "?";
}

Family parse_family(std::string_view s) {
  for (Family f : {Family::cdp, Family::gdp_f, Family::gdp_v, Family::blmsdp})
    if (s == to_string(f)) return f;
  throw std::invalid_argument("unknown family '" + std::string(s) +
                              "' (expected cdp, gdp_f, gdp_v or blmsdp)");
}

std::vector<std::string> GeneratorSpec::check() const {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (coords < 1) throw std::invalid_argument("coords must be at least 1");
  std::vector<std::string> warnings;
  if (family == Family::blmsdp) {
    if (p < 1 || p > n) throw std::invalid_argument("p must lie in [1, n]");
    if (!(delta >= 0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be >= 0");
    return warnings;
  }
  if (!(ratio > 0 && ratio < 1)) throw std::invalid_argument("ratio must lie in (0, 1)");
  if (ratio != 0.2 && ratio != 0.3) warnings.push_back("ratio outside {0.2, 0.3}");
  if (family != Family::cdp) {
    if (!(phi > 0 && phi <= 1)) throw std::invalid_argument("phi must lie in (0, 1]");
    if (phi != 0.5 && phi != 0.6) warnings.push_back("phi outside {0.5, 0.6}");
  }
  return warnings;
}

PointSetd random_points(Rng& rng, int n, int coords) {
  Eigen::MatrixXd c(n, coords);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < coords; ++k) c(i, k) = rng.uniform(0, 100);
  return PointSetd(std::move(c));
}

GdpParameters draw_gdp_parameters(Rng& rng, int n) {
  GdpParameters g;
  for (int i = 0; i < n; ++i) {
    const double c = static_cast<double>(rng.integer(1, 1000));
    const double a = rng.uniform(c / 2, 2 * c);
    double lo = std::min(1.0, a) / 100, hi = std::max(1.0, a) / 100;
    if (hi < lo) std::swap(lo, hi);
    g.capacity.push_back(c);
    g.fixed_cost.push_back(a);
    g.variable_cost.push_back(rng.uniform(lo, hi));
  }
  return g;
}

namespace {

std::string instance_name(const GeneratorSpec& spec) {
  return std::string(to_string(spec.family)) + "_n" + std::to_string(spec.n) + "_s" +
         std::to_string(spec.coords) + "_seed" + std::to_string(spec.seed);
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Opens sites in increasing per-unit cost until capacity B is met and
// reports whether that selection fits the budget with t_i = c_i.
bool greedy_certificate(const GdpParameters& g, double B, double K, bool variable) {
  const int n = static_cast<int>(g.capacity.size());
  auto cost = [&](int i) {
    return g.fixed_cost[i] + (variable ? g.variable_cost[i] * g.capacity[i] : 0.0);
  };
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return cost(a) / g.capacity[a] < cost(b) / g.capacity[b]; });
  double cap = 0, spent = 0;
  for (int i : order) {
    if (cap >= B) break;
    cap += g.capacity[i];
    spent += cost(i);
  }
  return cap >= B && spent <= K;
}

EmspInstance gen_gdp(const GeneratorSpec& spec, bool variable) {
  spec.check();
  Rng rng(spec.seed);
  PointSetd pts = random_points(rng, spec.n, spec.coords);
  while (true) {
    GdpParameters g = draw_gdp_parameters(rng, spec.n);
    const double B = spec.ratio * sum(g.capacity);
    double total = 0;
    for (int i = 0; i < spec.n; ++i) total += g.fixed_cost[i] + g.variable_cost[i] * g.capacity[i];
    const double K = spec.phi * total;
    if (!greedy_certificate(g, B, K, variable)) continue;
    ConstraintBlock block = variable
        ? ConstraintBlock(GdpVariableBlock{B, K, g.capacity, g.fixed_cost, g.variable_cost})
        : ConstraintBlock(GdpFixedBlock{B, K, g.capacity, g.fixed_cost});
    EmspInstance inst(instance_name(spec), std::move(pts), {std::move(block)});
    inst.seed = spec.seed;
    return inst;
  }
}

}  // namespace

EmspInstance gen_cdp(const GeneratorSpec& spec) {
  GeneratorSpec s = spec;
  s.family = Family::cdp;
  s.check();
  Rng rng(s.seed);
  PointSetd pts = random_points(rng, s.n, s.coords);
  while (true) {
    std::vector<double> w(s.n);
    for (auto& c : w) c = static_cast<double>(rng.integer(1, 1000));
    const double total = sum(w);
    const double b = s.ratio * total;
    if (!(*std::min_element(w.begin(), w.end()) <= b && b < total)) continue;
    EmspInstance inst(instance_name(s), std::move(pts), {KnapsackBlock{b, std::move(w)}});
    inst.seed = s.seed;
    return inst;
  }
}

EmspInstance gen_gdp_f(const GeneratorSpec& spec) {
  GeneratorSpec s = spec;
  s.family = Family::gdp_f;
  return gen_gdp(s, false);
}

EmspInstance gen_gdp_v(const GeneratorSpec& spec) {
  GeneratorSpec s = spec;
  s.family = Family::gdp_v;
  return gen_gdp(s, true);
}

EmspInstance gen_blmsdp(const PointSetd& points, int p, double delta, std::string name) {
  if (p < 1 || p > points.size()) throw std::invalid_argument("p must lie in [1, n]");
  if (!(delta >= 0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be >= 0");
  std::vector<ConstraintBlock> blocks{CardinalityBlock{Sense::eq, p}};
  if (delta > 0) blocks.push_back(ConflictBlock{delta});
  return EmspInstance(std::move(name), points, std::move(blocks));
}

EmspInstance gen_blmsdp(const GeneratorSpec& spec) {
  GeneratorSpec s = spec;
  s.family = Family::blmsdp;
  s.check();
  Rng rng(s.seed);
  EmspInstance inst = gen_blmsdp(random_points(rng, s.n, s.coords), s.p, s.delta, instance_name(s));
  inst.seed = s.seed;
  return inst;
}

EmspInstance generate(const GeneratorSpec& spec) {
  switch (spec.family) {
    case Family::cdp: return gen_cdp(spec);
    case Family::gdp_f: return gen_gdp_f(spec);
    case Family::gdp_v: return gen_gdp_v(spec);
    case Family::blmsdp: return gen_blmsdp(spec);
  }
  throw std::invalid_argument("unknown family");
}

// ---------------------------------------------------------------------------
// Native format

ParseError::ParseError(int line, int column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + what),
      line_(line),
      column_(column) {}

namespace {

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class Writer {
 public:
  void line(std::initializer_list<std::string> parts) {
    bool first = true;
    for (const auto& p : parts) {
      if (!first) out_ << ' ';
      out_ << p;
      first = false;
    }
    out_ << '\n';
  }
  void raw(const std::string& s) { out_ << s << '\n'; }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

}  // namespace

std::string serialize_instance(const EmspInstance& inst) {
  const int n = inst.n();
  Writer w;
  w.raw("EMSP 1");
  std::string name = inst.name().empty() ? "unnamed" : inst.name();
  std::replace_if(name.begin(), name.end(), [](unsigned char c) { return std::isspace(c); }, '_');
  w.line({"NAME", name});
  if (inst.seed) w.line({"SEED", std::to_string(*inst.seed)});
  const int s = inst.points() ? static_cast<int>(inst.points()->dimension()) : 0;
  w.line({std::to_string(n), std::to_string(s)});
  if (inst.points())
    for (int i = 0; i < n; ++i) {
      std::string row;
      for (int k = 0; k < s; ++k) row += (k ? " " : "") + fmt(inst.points()->coords()(i, k));
      w.raw(row);
    }
  if (inst.distance_source() == DistanceSource::read) {
    w.raw("MATRIX");
    for (int i = 0; i < n; ++i) {
      std::string row;
      for (int j = 0; j < n; ++j) row += (j ? " " : "") + fmt(inst.q()(i, j));
      w.raw(row);
    }
  }
  for (const auto& block : inst.blocks()) {
    if (const auto* b = std::get_if<KnapsackBlock>(&block)) {
      w.line({"KNAPSACK", fmt(b->capacity)});
      for (double v : b->weights) w.raw(fmt(v));
    } else if (const auto* b = std::get_if<CardinalityBlock>(&block)) {
      w.line({b->sense == Sense::eq ? "CARD_EQ" : "CARD_LE", std::to_string(b->p)});
    } else if (const auto* b = std::get_if<GdpFixedBlock>(&block)) {
      w.line({"GDPF", fmt(b->min_capacity), fmt(b->budget)});
      for (int i = 0; i < n; ++i) w.line({fmt(b->capacity[i]), fmt(b->fixed_cost[i])});
    } else if (const auto* b = std::get_if<GdpVariableBlock>(&block)) {
      w.line({"GDPV", fmt(b->min_capacity), fmt(b->budget)});
      for (int i = 0; i < n; ++i)
        w.line({fmt(b->capacity[i]), fmt(b->fixed_cost[i]), fmt(b->variable_cost[i])});
    } else if (const auto* b = std::get_if<ConflictBlock>(&block)) {
      w.line({"CONFLICT", fmt(b->delta)});
    } else if (const auto* b = std::get_if<RowBlock>(&block)) {
      std::string row = std::string("ROW ") + to_string(b->row.sense) + " " + fmt(b->row.rhs);
      for (const auto& t : b->row.terms) row += " " + std::to_string(t.var + 1) + ":" + fmt(t.coef);
      w.raw(row);
    }
  }
  return w.str();
}

namespace {

struct Token {
  std::string_view text;
  int column;
};

struct Line {
  int number;
  std::vector<Token> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, end - pos);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    ++number;
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t')) ++i;
      if (i >= raw.size()) break;
      const std::size_t start = i;
      while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t') ++i;
      line.tokens.push_back({raw.substr(start, i - start), static_cast<int>(start) + 1});
    }
    const bool comment = !line.tokens.empty() && line.tokens.front().text.front() == '#';
    if (!line.tokens.empty() && !comment) lines.push_back(std::move(line));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lines_(tokenize(text)) {}

  EmspInstance run() {
    const Line& head = next("header 'EMSP 1'");
    if (head.tokens.size() != 2 || head.tokens[0].text != "EMSP" || head.tokens[1].text != "1")
      fail(head, 0, "expected header 'EMSP 1'");

    std::string name = "unnamed";
    std::optional<std::uint64_t> seed;
    while (peek_keyword("NAME") || peek_keyword("SEED")) {
      const Line& l = next("");
      expect_count(l, 2);
      if (l.tokens[0].text == "NAME") {
        name = std::string(l.tokens[1].text);
      } else {
        std::uint64_t v = 0;
        auto t = l.tokens[1];
        auto r = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (r.ec != std::errc{} || r.ptr != t.text.data() + t.text.size())
          fail(l, 1, "invalid seed '" + std::string(t.text) + "'");
        seed = v;
      }
    }

    const Line& dims = next("dimension line 'n s'");
    expect_count(dims, 2);
    const int n = integer(dims, 0);
    const int s = integer(dims, 1);
    if (n < 1) fail(dims, 0, "n must be at least 1");
    if (s < 0) fail(dims, 1, "s must be nonnegative");

    std::optional<PointSetd> points;
    if (s > 0) {
      Eigen::MatrixXd c(n, s);
      for (int i = 0; i < n; ++i) {
        const Line& l = next("coordinate line");
        expect_count(l, s);
        for (int k = 0; k < s; ++k) c(i, k) = number(l, k);
      }
      points = PointSetd(std::move(c));
    }

    std::optional<DistanceMatrixd> q;
    if (peek_keyword("MATRIX")) {
      expect_count(next(""), 1);
      Eigen::MatrixXd m(n, n);
      std::vector<const Line*> rows;
      for (int i = 0; i < n; ++i) {
        const Line& l = next("matrix row");
        expect_count(l, n);
        rows.push_back(&l);
        for (int j = 0; j < n; ++j) m(i, j) = number(l, j);
      }
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (m(i, j) != m(j, i))
            fail(*rows[j], i,
                 "matrix not symmetric: entry (" + std::to_string(j + 1) + "," +
                     std::to_string(i + 1) + ") = " + fmt(m(j, i)) + " but (" +
                     std::to_string(i + 1) + "," + std::to_string(j + 1) + ") = " + fmt(m(i, j)));
      q = DistanceMatrixd(std::move(m));
    } else if (!points) {
      fail(dims, 1, "s = 0 requires a MATRIX block");
    }

    std::vector<ConstraintBlock> blocks;
    while (cur_ < lines_.size()) blocks.push_back(block(n));

    try {
      EmspInstance inst = q ? EmspInstance(name, points, *q, std::move(blocks))
                            : EmspInstance(name, std::move(*points), std::move(blocks));
      inst.seed = seed;
      return inst;
    } catch (const std::invalid_argument& e) {
      throw ParseError(lines_.empty() ? 1 : lines_.back().number, 1, e.what());
    }
  }

 private:
  ConstraintBlock block(int n) {
    const Line& l = next("");
    const auto kw = l.tokens[0].text;
    if (kw == "KNAPSACK") {
      expect_count(l, 2);
      KnapsackBlock b{number(l, 1), {}};
      for (int i = 0; i < n; ++i) {
        const Line& r = next("knapsack weight");
        expect_count(r, 1);
        b.weights.push_back(number(r, 0));
      }
      return b;
    }
    if (kw == "CARD_EQ" || kw == "CARD_LE") {
      expect_count(l, 2);
      return CardinalityBlock{kw == "CARD_EQ" ? Sense::eq : Sense::le, integer(l, 1)};
    }
    if (kw == "GDPF") {
      expect_count(l, 3);
      GdpFixedBlock b{number(l, 1), number(l, 2), {}, {}};
      for (int i = 0; i < n; ++i) {
        const Line& r = next("GDPF line 'c a'");
        expect_count(r, 2);
        b.capacity.push_back(number(r, 0));
        b.fixed_cost.push_back(number(r, 1));
      }
      return b;
    }
    if (kw == "GDPV") {
      expect_count(l, 3);
      GdpVariableBlock b{number(l, 1), number(l, 2), {}, {}, {}};
      for (int i = 0; i < n; ++i) {
        const Line& r = next("GDPV line 'c a b'");
        expect_count(r, 3);
        b.capacity.push_back(number(r, 0));
        b.fixed_cost.push_back(number(r, 1));
        b.variable_cost.push_back(number(r, 2));
      }
      return b;
    }
    if (kw == "CONFLICT") {
      expect_count(l, 2);
      return ConflictBlock{number(l, 1)};
    }
    if (kw == "ROW") {
      if (l.tokens.size() < 4) fail(l, 0, "ROW needs a sense, a rhs and at least one term");
      RowBlock b;
      const auto sense = l.tokens[1].text;
      if (sense == "<=") b.row.sense = Sense::le;
      else if (sense == ">=") b.row.sense = Sense::ge;
      else if (sense == "=") b.row.sense = Sense::eq;
      else fail(l, 1, "unknown sense '" + std::string(sense) + "'");
      b.row.rhs = number(l, 2);
      for (std::size_t k = 3; k < l.tokens.size(); ++k) {
        const auto t = l.tokens[k].text;
        const auto colon = t.find(':');
        if (colon == std::string_view::npos) fail(l, k, "expected term 'idx:coef'");
        int idx = 0;
        auto r = std::from_chars(t.data(), t.data() + colon, idx);
        if (r.ec != std::errc{} || r.ptr != t.data() + colon || idx < 1)
          fail(l, k, "invalid variable index in '" + std::string(t) + "'");
        b.row.terms.push_back({idx - 1, parse_double(l, k, t.substr(colon + 1))});
      }
      return b;
    }
    fail(l, 0, "unknown block '" + std::string(kw) + "'");
  }

  bool peek_keyword(std::string_view kw) const {
    return cur_ < lines_.size() && lines_[cur_].tokens[0].text == kw;
  }

  const Line& next(const std::string& what) {
    if (cur_ >= lines_.size()) {
      const int line = lines_.empty() ? 1 : lines_.back().number + 1;
      throw ParseError(line, 1, "unexpected end of input" + (what.empty() ? "" : ", expected " + what));
    }
    return lines_[cur_++];
  }

  [[noreturn]] static void fail(const Line& l, std::size_t k, const std::string& what) {
    const int col = k < l.tokens.size() ? l.tokens[k].column : 1;
    throw ParseError(l.number, col, what);
  }

  static void expect_count(const Line& l, std::size_t count) {
    if (l.tokens.size() != count)
      fail(l, std::min(count, l.tokens.size() - 1),
           "expected " + std::to_string(count) + " fields, found " + std::to_string(l.tokens.size()));
  }

  static double parse_double(const Line& l, std::size_t k, std::string_view t) {
    double v = 0;
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc{} || r.ptr != t.data() + t.size() || !std::isfinite(v))
      fail(l, k, "invalid number '" + std::string(t) + "'");
    return v;
  }

  static double number(const Line& l, std::size_t k) { return parse_double(l, k, l.tokens[k].text); }

  static int integer(const Line& l, std::size_t k) {
    int v = 0;
    const auto t = l.tokens[k].text;
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc{} || r.ptr != t.data() + t.size())
      fail(l, k, "invalid integer '" + std::string(t) + "'");
    return v;
  }

  std::vector<Line> lines_;
  std::size_t cur_ = 0;
};

// RFC 4180 fields of one record; `pos` advances past the record terminator.
std::vector<std::string> csv_record(std::string_view text, std::size_t& pos) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  while (pos < text.size()) {
    const char c = text[pos++];
    if (quoted) {
      if (c == '"') {
        if (pos < text.size() && text[pos] == '"') {
          field += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

}  // namespace

EmspInstance parse_instance(std::string_view text) { return Parser(text).run(); }

CsvPoints load_coordinates_csv(std::string_view text, std::string_view lat_col,
                               std::string_view lon_col) {
  std::size_t pos = 0;
  const auto header = csv_record(text, pos);
  auto find = [&](std::string_view col) {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (trim(header[k]) == col) return k;
    throw std::invalid_argument("missing column '" + std::string(col) + "'");
  };
  const std::size_t lat = find(lat_col), lon = find(lon_col);

  std::vector<std::vector<double>> rows;
  int skipped = 0;
  while (pos < text.size()) {
    const auto rec = csv_record(text, pos);
    if (rec.size() == 1 && trim(rec[0]).empty()) continue;
    auto value = [&](std::size_t k) -> std::optional<double> {
      if (k >= rec.size()) return std::nullopt;
      const std::string t = trim(rec[k]);
      double v = 0;
      auto r = std::from_chars(t.data(), t.data() + t.size(), v);
      if (t.empty() || r.ec != std::errc{} || r.ptr != t.data() + t.size() || !std::isfinite(v))
        return std::nullopt;
      return v;
    };
    const auto a = value(lat), b = value(lon);
    if (a && b) rows.push_back({*a, *b});
    else ++skipped;
  }
  if (rows.empty()) throw std::invalid_argument("no row has both coordinates");
  return {PointSetd::from_rows(rows), skipped};
}

}  // namespace emsp
