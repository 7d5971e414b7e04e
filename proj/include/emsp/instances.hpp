#pragma once

// Seeded generators for the four benchmark families, the native text format,
// and coordinate CSV ingestion.

#include "emsp/model.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace emsp {

/// xoshiro256** (Blackman and Vigna) with its state filled by four successive
/// splitmix64 outputs from the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// (next() >> 11) * 2^-53, in [0, 1).
  double uniform();
  /// lo + (hi - lo) * uniform()
  double uniform(double lo, double hi);
  /// lo + floor(uniform() * (hi - lo + 1)), in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi);

 private:
  std::array<std::uint64_t, 4> s_;
};

enum class Family { cdp, gdp_f, gdp_v, blmsdp };

const char* to_string(Family f);
/// Accepts the names produced by to_string; throws std::invalid_argument.
Family parse_family(std::string_view s);

struct GeneratorSpec {
  Family family = Family::cdp;
  int n = 10;
  int coords = 2;
  /// b / sum c (cdp) or B / sum c (gdp).
  double ratio = 0.2;
  /// K / sum (a_i + b_i c_i) (gdp).
  double phi = 0.5;
  /// Cardinality (blmsdp).
  int p = 2;
  /// Minimum separation (blmsdp).
  double delta = 0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when out of range: n >= 2, coords >= 1,
  /// 0 < ratio < 1, 0 < phi <= 1, 1 <= p <= n, delta >= 0. Returns warnings
  /// for values outside the customary settings ratio in {0.2, 0.3} and
  /// phi in {0.5, 0.6}.
  std::vector<std::string> check() const;
};

/// Draw order: coordinates row by row, then the per-point family parameters
/// in point order. Coordinates are uniform on [0, 100].
PointSetd random_points(Rng& rng, int n, int coords);

struct GdpParameters {
  std::vector<double> capacity;       // c_i, integer in [1, 1000]
  std::vector<double> fixed_cost;     // a_i in [c_i / 2, 2 c_i]
  std::vector<double> variable_cost;  // b_i in [min(1, a_i), max(1, a_i)] / 100
};

/// Per point i: c_i, then a_i, then b_i.
GdpParameters draw_gdp_parameters(Rng& rng, int n);

/// Knapsack row sum c_i x_i <= ratio * sum c_i with integer c_i in [1, 1000];
/// weights are redrawn until min c_i <= b.
EmspInstance gen_cdp(const GeneratorSpec& spec);
/// sum c_i x_i >= B, sum a_i x_i <= K. Parameters are redrawn until a greedy
/// selection certifies a nonempty feasible set.
EmspInstance gen_gdp_f(const GeneratorSpec& spec);
/// As gen_gdp_f with the variable-cost block.
EmspInstance gen_gdp_v(const GeneratorSpec& spec);
/// Cardinality sum x = p plus the conflict rows for delta. Throws on
/// p outside [1, n] or negative delta.
EmspInstance gen_blmsdp(const PointSetd& points, int p, double delta, std::string name = "blmsdp");
/// Random points then gen_blmsdp.
EmspInstance gen_blmsdp(const GeneratorSpec& spec);
/// Dispatches on spec.family; the name encodes family, n, coords and seed.
EmspInstance generate(const GeneratorSpec& spec);

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Native format, line oriented, '#' starts a comment line:
///
///   EMSP 1
///   NAME <token>            optional
///   SEED <uint64>           optional
///   <n> <s>                 s = 0 allowed when MATRIX is present
///   n lines of s coordinates
///   MATRIX                  optional; n lines of n distances, marks them read
///   blocks, each one of
///     KNAPSACK <b>          then n lines <w_i>
///     CARD_EQ <p> | CARD_LE <p>
///     GDPF <B> <K>          then n lines <c_i> <a_i>
///     GDPV <B> <K>          then n lines <c_i> <a_i> <b_i>
///     CONFLICT <delta>
///     ROW <= | >= | = <rhs> <idx>:<coef> ...   (1-based variable indices)
///
/// Numbers are written in shortest round-trip form, so
/// serialize(parse(serialize(inst))) == serialize(inst).
std::string serialize_instance(const EmspInstance& inst);
/// Throws ParseError with 1-based line and column.
EmspInstance parse_instance(std::string_view text);

struct CsvPoints {
  PointSetd points;
  /// Rows skipped for a missing or non-numeric coordinate.
  int skipped = 0;
};

/// Two-coordinate points (lat, lon) from a headed CSV, in file order. Throws
/// std::invalid_argument on a missing column or when no row survives.
CsvPoints load_coordinates_csv(std::string_view text, std::string_view lat_col,
                               std::string_view lon_col);

}  // namespace emsp
