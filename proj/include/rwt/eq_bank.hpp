#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rwt/expr.hpp"

namespace rwt {

enum class BankSet { kSimple, kComplex };

std::string_view to_string(BankSet set);
// Accepts "simple" or "complex"; throws Error(kInvalidParam) otherwise.
BankSet parse_bank_set(std::string_view text);

struct BankEntry {
  BankSet set = BankSet::kSimple;
  int n_inputs = 0;
  std::string r2;  // published test R^2, kept as printed
  std::string text;
  Expr expression;
};

class EquationBank {
 public:
  explicit EquationBank(std::vector<BankEntry> entries);

  const std::vector<BankEntry>& entries() const { return entries_; }
  // Throws Error(kNotFound) for an unknown (set, n_inputs) pair.
  const BankEntry& lookup(BankSet set, int n_inputs) const;

 private:
  std::vector<BankEntry> entries_;
};

// Shipped bank file contents, identical to data/equation_bank.csv.
std::string_view embedded_bank_text();

// Parses a bank file: a version comment, the header
// "set,n_inputs,r2,expression", then 20 records. Each record line must hash
// (FNV-1a 64) to the embedded checksum for its slot. Throws
// Error(kSchemaMismatch) for structural problems and Error(kChecksumMismatch)
// when a record differs from the shipped transcription.
EquationBank load_bank(std::istream& in);
EquationBank load_bank_file(const std::string& path);

// The embedded bank, parsed and verified once.
const EquationBank& default_bank();

struct PoleScan {
  std::size_t points = 0;
  std::size_t pole_errors = 0;
  std::size_t domain_errors = 0;
  double min_abs_denominator = 0.0;   // over successful evaluations
  std::vector<double> closest_point;  // where that minimum occurred
};

// Evaluates `e` at uniform random points of [0,1]^dims.
PoleScan pole_scan(const Expr& e, int dims, std::size_t points, std::uint64_t seed);

}  // namespace rwt
