#include "qrpinn/lowdisc.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "qrpinn/errors.h"
#include "qrpinn/rng.h"

namespace qrpinn {

std::string to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::Halton:
      return "halton";
    case SequenceKind::Sobol:
      return "sobol";
    case SequenceKind::UniformRandom:
      return "random";
  }
  return "unknown";
}

SequenceKind parse_sequence_kind(std::string_view name) {
  if (name == "halton") return SequenceKind::Halton;
  if (name == "sobol") return SequenceKind::Sobol;
  if (name == "random" || name == "uniform") return SequenceKind::UniformRandom;
  throw InvalidArgument("unknown sequence kind '" + std::string(name) + "'");
}

PointSet::PointSet(GeneratorSpec spec, std::size_t dim, std::vector<double> coords)
    : spec_(spec), dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw InvalidArgument("PointSet: dimension must be >= 1");
  if (coords_.size() % dim_ != 0) throw InvalidArgument("PointSet: ragged coordinate array");
}

std::vector<double> PointSet::column(std::size_t j) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)(i, j);
  return out;
}

PointSet PointSet::subset(std::span<const std::size_t> indices) const {
  std::vector<double> out;
  out.reserve(indices.size() * dim_);
  for (std::size_t idx : indices) {
    if (idx >= size()) throw InvalidArgument("PointSet::subset: index out of range");
    auto p = point(idx);
    out.insert(out.end(), p.begin(), p.end());
  }
  return PointSet(spec_, dim_, std::move(out));
}

namespace {

void validate_spec(const GeneratorSpec& spec, SequenceKind expected) {
  if (spec.kind != expected) {
    throw InvalidArgument("generator spec kind is " + to_string(spec.kind) + ", expected " +
                          to_string(expected));
  }
  if (spec.dim == 0) throw InvalidArgument("generator spec: dim must be >= 1");
}

constexpr std::uint64_t kExactLimit = std::uint64_t{1} << 53;

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t f = 3; f * f <= n; f += 2) {
    if (n % f == 0) return false;
  }
  return true;
}

std::vector<std::uint32_t> first_primes(std::size_t count) {
  std::vector<std::uint32_t> primes;
  primes.reserve(count);
  for (std::uint32_t c = 2; primes.size() < count; ++c) {
    if (is_prime(c)) primes.push_back(c);
  }
  return primes;
}

double radical_inverse(std::uint64_t index, std::uint32_t base) {
  if (base < 2 || !is_prime(base)) {
    throw InvalidArgument("radical_inverse: base " + std::to_string(base) + " is not a prime >= 2");
  }
  // Reverse the digits into an integer numerator over base^k; one correctly rounded
  // division while both stay below 2^53.
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;
  std::uint64_t rest = index;
  while (rest > 0 && denominator <= kExactLimit / base) {
    numerator = numerator * base + rest % base;
    denominator *= base;
    rest /= base;
  }
  if (rest == 0) return static_cast<double>(numerator) / static_cast<double>(denominator);

  // Too many digits for the exact path: Horner over the digits in extended precision.
  std::vector<std::uint32_t> digits;
  for (std::uint64_t r = index; r > 0; r /= base) digits.push_back(static_cast<std::uint32_t>(r % base));
  long double x = 0.0L;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) x = (*it + x) / base;
  // Rounding can reach 1 for indices whose digits are all base-1.
  return std::min(static_cast<double>(x), std::nextafter(1.0, 0.0));
}

PointSet halton(std::size_t n, const GeneratorSpec& spec) {
  validate_spec(spec, SequenceKind::Halton);
  const auto primes = first_primes(spec.dim);
  std::vector<double> coords(n * spec.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t index = spec.offset + i;
    for (std::size_t j = 0; j < spec.dim; ++j) coords[i * spec.dim + j] = radical_inverse(index, primes[j]);
  }
  return PointSet(spec, spec.dim, std::move(coords));
}

std::vector<DirectionEntry> parse_direction_numbers(std::istream& in) {
  std::vector<DirectionEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] < '0' || line[first] > '9') {
      if (entries.empty()) continue;  // header
      throw InvalidArgument("direction numbers: unexpected text on line " + std::to_string(line_no));
    }
    std::istringstream row(line);
    DirectionEntry e;
    std::uint64_t a = 0;
    if (!(row >> e.dimension >> e.degree >> a) || e.degree == 0 || e.degree > 32) {
      throw InvalidArgument("direction numbers: malformed row on line " + std::to_string(line_no));
    }
    e.coefficients = static_cast<std::uint32_t>(a);
    for (unsigned k = 1; k <= e.degree; ++k) {
      std::uint64_t m = 0;
      if (!(row >> m)) {
        throw InvalidArgument("direction numbers: missing m values on line " + std::to_string(line_no));
      }
      if (m % 2 == 0 || m >= (std::uint64_t{1} << k)) {
        throw InvalidArgument("direction numbers: m_" + std::to_string(k) +
                              " must be odd and < 2^k on line " + std::to_string(line_no));
      }
      e.initial_m.push_back(static_cast<std::uint32_t>(m));
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<DirectionEntry> load_direction_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open direction-number file " + path);
  return parse_direction_numbers(in);
}

const std::vector<DirectionEntry>& bundled_direction_numbers() {
  static const std::vector<DirectionEntry> entries = [] {
    std::istringstream in{std::string(bundled_direction_text())};
    return parse_direction_numbers(in);
  }();
  return entries;
}

SobolDirectionTable SobolDirectionTable::build(std::size_t dim, unsigned max_bits,
                                               std::span<const DirectionEntry> entries) {
  if (dim == 0) throw InvalidArgument("Sobol table: dim must be >= 1");
  if (max_bits < 1 || max_bits > 52) throw InvalidArgument("Sobol table: max_bits must be in [1, 52]");
  if (dim > entries.size() + 1) {
    throw UnsupportedDimension("Sobol table: dimension " + std::to_string(dim) +
                               " exceeds available direction numbers (" +
                               std::to_string(entries.size() + 1) + ")");
  }
  SobolDirectionTable table;
  table.max_bits_ = max_bits;
  table.columns_.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    Column& col = table.columns_[j];
    col.m.assign(max_bits, 1);
    if (j > 0) {
      const DirectionEntry& e = entries[j - 1];
      const unsigned s = e.degree;
      col.degree = s;
      col.coefficients = e.coefficients;
      for (unsigned k = 0; k < std::min(s, max_bits); ++k) col.m[k] = e.initial_m[k];
      // m_k = 2 a_1 m_{k-1} ^ 4 a_2 m_{k-2} ^ ... ^ 2^s m_{k-s} ^ m_{k-s}  (1-based k)
      for (unsigned k = s; k < max_bits; ++k) {
        std::uint64_t m = col.m[k - s] ^ (col.m[k - s] << s);
        for (unsigned r = 1; r < s; ++r) {
          const std::uint64_t a_r = (e.coefficients >> (s - 1 - r)) & 1u;
          if (a_r) m ^= col.m[k - r] << r;
        }
        col.m[k] = m;
      }
    }
    col.v.resize(max_bits);
    for (unsigned k = 0; k < max_bits; ++k) col.v[k] = col.m[k] << (max_bits - 1 - k);
  }
  return table;
}

SobolDirectionTable SobolDirectionTable::build(std::size_t dim, unsigned max_bits) {
  return build(dim, max_bits, bundled_direction_numbers());
}

PointSet sobol(std::size_t n, const GeneratorSpec& spec, const SobolDirectionTable& table) {
  validate_spec(spec, SequenceKind::Sobol);
  if (spec.dim > table.dim()) {
    throw InvalidArgument("sobol: table has " + std::to_string(table.dim()) + " dimensions, spec needs " +
                          std::to_string(spec.dim));
  }
  const unsigned bits = table.max_bits();
  const std::uint64_t capacity = std::uint64_t{1} << bits;
  if (spec.offset > capacity || n > capacity - spec.offset) {
    throw CapacityExceeded("sobol: offset + n exceeds 2^" + std::to_string(bits) + " points");
  }
  const double scale = std::ldexp(1.0, -static_cast<int>(bits));
  std::vector<double> coords(n * spec.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t index = spec.offset + i;
    for (std::size_t j = 0; j < spec.dim; ++j) {
      const auto& v = table.column(j).v;
      std::uint64_t t = 0;
      for (unsigned r = 0; (index >> r) != 0; ++r) {
        if ((index >> r) & 1u) t ^= v[r];
      }
      coords[i * spec.dim + j] = static_cast<double>(t) * scale;
    }
  }
  return PointSet(spec, spec.dim, std::move(coords));
}

PointSet sobol(std::size_t n, const GeneratorSpec& spec) {
  return sobol(n, spec, SobolDirectionTable::build(spec.dim));
}

PointSet uniform_random(std::size_t n, const GeneratorSpec& spec) {
  validate_spec(spec, SequenceKind::UniformRandom);
  std::vector<double> coords(n * spec.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t base = (spec.offset + i) * spec.dim;
    for (std::size_t j = 0; j < spec.dim; ++j) {
      coords[i * spec.dim + j] = to_unit_interval(counter_hash(spec.seed, base + j));
    }
  }
  return PointSet(spec, spec.dim, std::move(coords));
}

PointSet generate(std::size_t n, const GeneratorSpec& spec) {
  switch (spec.kind) {
    case SequenceKind::Halton:
      return halton(n, spec);
    case SequenceKind::Sobol:
      return sobol(n, spec);
    case SequenceKind::UniformRandom:
      return uniform_random(n, spec);
  }
  throw InvalidArgument("generate: unknown sequence kind");
}

PointSet scale_to_box(const PointSet& ps, std::span<const double> lower, std::span<const double> upper) {
  const std::size_t d = ps.dim();
  if (lower.size() != d || upper.size() != d) throw InvalidArgument("scale_to_box: box dimension mismatch");
  for (std::size_t j = 0; j < d; ++j) {
    if (!(lower[j] < upper[j])) throw InvalidArgument("scale_to_box: degenerate box in coordinate " + std::to_string(j));
  }
  std::vector<double> coords(ps.coords().begin(), ps.coords().end());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double& x = coords[i * d + j];
      x = lower[j] + (upper[j] - lower[j]) * x;
    }
  }
  return PointSet(ps.spec(), d, std::move(coords));
}

void write_csv(std::ostream& out, const PointSet& ps) {
  const std::size_t d = ps.dim() == 0 ? ps.spec().dim : ps.dim();
  out << "i";
  for (std::size_t j = 0; j < d; ++j) out << ",x" << (j + 1);
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < ps.size(); ++i) {
    out << (ps.spec().offset + i);
    for (std::size_t j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", ps(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace qrpinn
