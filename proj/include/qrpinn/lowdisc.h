#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qrpinn {

enum class SequenceKind { Halton, Sobol, UniformRandom };

std::string to_string(SequenceKind kind);
// Accepts "halton", "sobol", "random"/"uniform" (case-sensitive lower case).
SequenceKind parse_sequence_kind(std::string_view name);

// Declarative description of a point source. `seed` only matters for UniformRandom;
// `offset` is the sequence index of the first emitted point.
struct GeneratorSpec {
  SequenceKind kind = SequenceKind::Sobol;
  std::size_t dim = 1;
  std::uint64_t seed = 0;
  std::uint64_t offset = 0;

  bool operator==(const GeneratorSpec&) const = default;
};

// N points in d dimensions, row-major, in generation order.
class PointSet {
 public:
  PointSet() = default;
  PointSet(GeneratorSpec spec, std::size_t dim, std::vector<double> coords);

  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return coords_.empty(); }
  const GeneratorSpec& spec() const { return spec_; }

  double operator()(std::size_t i, std::size_t j) const { return coords_[i * dim_ + j]; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const double> coords() const { return coords_; }

  // Coordinate j of every point, in order.
  std::vector<double> column(std::size_t j) const;

  // Points at the given indices, in the given order.
  PointSet subset(std::span<const std::size_t> indices) const;

  bool operator==(const PointSet&) const = default;

 private:
  GeneratorSpec spec_{};
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

bool is_prime(std::uint64_t n);
// First `count` primes, starting at 2.
std::vector<std::uint32_t> first_primes(std::size_t count);

// Base-b digit reversal of `index` about the radix point. Throws InvalidArgument
// unless base is a prime >= 2.
double radical_inverse(std::uint64_t index, std::uint32_t base);

PointSet halton(std::size_t n, const GeneratorSpec& spec);

// One primitive polynomial row of the direction-number data: degree s, interior
// coefficient bits a (a_1 is the most significant of the s-1 bits) and the initial
// odd integers m_1..m_s.
struct DirectionEntry {
  std::size_t dimension = 0;
  unsigned degree = 0;
  std::uint32_t coefficients = 0;
  std::vector<std::uint32_t> initial_m;
};

// Parses the standard "d s a m_1 ... m_s" format. A header line starting with a
// non-digit is skipped. Throws InvalidArgument on malformed rows.
std::vector<DirectionEntry> parse_direction_numbers(std::istream& in);
std::vector<DirectionEntry> load_direction_numbers(const std::string& path);

// Raw text of the bundled new-joe-kuo-6 data (dimensions 2..1111).
std::string_view bundled_direction_text();
const std::vector<DirectionEntry>& bundled_direction_numbers();

inline constexpr unsigned kDefaultSobolBits = 30;

class SobolDirectionTable {
 public:
  struct Column {
    unsigned degree = 0;
    std::uint32_t coefficients = 0;
    std::vector<std::uint64_t> m;  // m_1..m_{max_bits}
    std::vector<std::uint64_t> v;  // v_k = m_k << (max_bits - k), k = 1..max_bits
  };

  // Dimension 1 is van der Corput (all m = 1); dimension j >= 2 uses entries[j - 2].
  // Throws UnsupportedDimension if the data runs out, InvalidArgument for bad max_bits.
  static SobolDirectionTable build(std::size_t dim, unsigned max_bits,
                                   std::span<const DirectionEntry> entries);
  static SobolDirectionTable build(std::size_t dim, unsigned max_bits = kDefaultSobolBits);

  std::size_t dim() const { return columns_.size(); }
  unsigned max_bits() const { return max_bits_; }
  const Column& column(std::size_t j) const { return columns_[j]; }

 private:
  unsigned max_bits_ = 0;
  std::vector<Column> columns_;
};

// Point i has coordinate j equal to the XOR of v_{r+1,j} over the set bits r of
// (offset + i), scaled by 2^-max_bits. Throws CapacityExceeded when an index needs
// more than max_bits bits.
PointSet sobol(std::size_t n, const GeneratorSpec& spec, const SobolDirectionTable& table);
PointSet sobol(std::size_t n, const GeneratorSpec& spec);

PointSet uniform_random(std::size_t n, const GeneratorSpec& spec);

// Dispatches on spec.kind.
PointSet generate(std::size_t n, const GeneratorSpec& spec);

// Coordinatewise affine map of the unit cube onto [lower, upper].
PointSet scale_to_box(const PointSet& ps, std::span<const double> lower,
                      std::span<const double> upper);

// CSV with header "i,x1,...,xd"; index column is the global sequence index.
void write_csv(std::ostream& out, const PointSet& ps);

}  // namespace qrpinn
