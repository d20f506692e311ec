#include "rwt/eq_bank.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "rwt/error.hpp"
#include "rwt/rng.hpp"
#include "rwt/text.hpp"

namespace rwt {

namespace {

constexpr std::string_view kBankText = R"BANK(# rwt equation bank v1
set,n_inputs,r2,expression
simple,1,0.8207,0.85*x1 + 0.04
simple,2,0.8224,0.85*x1 + 0.013/(-4.8*x2 - 0.19) + 0.05
simple,3,0.8441,0.87*x1 - 0.009/(-9.7*x2 + 9.8) - 0.15*x3 + 0.06
simple,4,0.8611,0.82*x1 + 0.012/(-0.2*x2 - 0.106) - 0.15*x3 - 0.10*x4 + 0.235
simple,5,0.8639,0.85*x1 + 0.0026/(-3.0*x2 - 0.092) - 0.14*x3 - 0.15*x4 + 0.0004/(-7.2*x5 + 3.5) + 0.1528
simple,6,0.8701,0.81*x1 + 0.0079/(-0.6*x2 - 0.04) - 0.14*x3 - 0.15*x4 + 0.0003/(-0.6*x5 + 0.032) - 0.0806*x6 + 0.2224
simple,7,0.8750,0.81*x1 + 0.003/(-0.002*x2 - 0.008) - 0.14*x3 - 0.15*x4 - 0.008/(-10.0*x5 - 0.2) - 0.081*x6 + 0.009*x7 + 0.556
simple,8,0.8795,0.83*x1 + 0.018/(-1.40*x2 - 0.18) - 0.15*x3 - 0.14*x4 + 0.002/(0.18 - 1.41*x5) - 0.074*x6 - 0.016*x7 + 0.012*x8 + 0.21
simple,9,0.8801,0.84*x1 + 0.015/(-2.81*x2 - 0.19) - 0.15*x3 - 0.15*x4 + 0.00012/(-0.99*x5 + 0.50) - 0.071*x6 - 0.04*x7 - 0.015*x8 + 0.00012/(0.80 - x9)^2 + 0.20
simple,10,0.8805,0.86*x1 + 0.011/(-5.0*x2 - 0.19) - 0.14*x3 - 0.14*x4 - 0.004/(-0.39*x5 - 0.14) - 0.071*x6 - 0.012*x7 + 0.063*x8 + 0.12/(-0.18*x9 - 1)^2 + 1.0e-5/(-x10 - 0.02)^2 + 0.03
complex,1,0.8421,-0.36*cos(1.65*x1 + 8.28) - 0.031 + 2.0e-5/(-0.007 - exp(-9.99*x1))^2
complex,2,0.8474,1.85 - 1.76*cos(-0.29*cos(3.62*x1 + 6.16) + 13.19 + 0.054/(-6.42*x2 - 0.18))
complex,3,0.8773,1.64*(exp(-2.33*x1) + 0.01*cos(10.0*x2 - 4.6) + 0.15*(-x3 - 0.018)^2 - 0.75)^2 + 0.17
complex,4,0.8859,-0.122 - 0.028/(-0.52*exp(-4.93*x1) - 0.015*cos(4.75*x2 + 6.02) - 0.013*cos(2.22*x3 - 3.21) - 0.02*exp(2.18*x4) - 0.05)
complex,5,0.8982,0.061/(-0.86*tanh(3.32*x1 - 0.20) - 0.01*cos(2.37*x2 - 7.70) + 0.026*cos(2.36*x3 + 9.399) - 0.009*log(9.86 - 9.81*x4) + 0.005*cos(8.96*x5 + 4.19) + 0.99)
complex,6,0.9053,-2.091 + 0.075/(1.61*exp(-1.70*(-x1 - 0.84)^2) - 0.004*cos(7.20*x2 - 4.99) - 0.022*cos(2.26*x3 + 6.37) + 0.14 - 0.041*cos(1.36*x4 + 6.02) - 0.004*cos(8.58*x5 + 1.01) - 0.015*(0.83 - x6)^2)
complex,7,0.9115,-0.011 - 0.55/(-3.10*exp(-4.67*(-x1 - 0.12)^2) - 0.008/(0.18 - 2.42*x2) - 0.68*exp(-2.49*(1 - 0.5*x3)^2) - 0.79*cos(0.88*x4 + 9.23) + 0.03*cos(9.86*x5 + 0.79) + 0.227/(-0.28*x6 - 1)^2 + 0.011*exp(1.6*x7) - 1.54)
complex,8,0.9130,-0.0037 - 0.026/(-0.247*exp(-3.17*(-x1 - 0.374)^2) - 0.0327*exp(-5.032*x2) - 0.0091*(-x3 - 0.34)^2 - 0.0002*exp(3.8*x4) + 0.0003/(0.16 - 0.81*x5) - 0.0053*x6 - 0.0026*cos(5.0014*x7 - 0.19) + 0.018*(0.49 - x8)^2 - 0.027)
complex,9,0.9182,-0.30 - 0.013/(0.02*(1 - 0.96*x1)^2 - 0.001*exp(-11.8*(0.063 - x2)^2) - 0.002*(-x3 - 0.23)^2 - 5.0e-5*exp(3.8*x4) + 0.0003/(0.37 - 2.0*x5) + 0.004*exp(-0.46*x6) + 0.001*cos(7.13*x7 + 2.81) + 1.0e-5/(-x8 - 0.092)^2 + 0.0023*(0.35 - x9)^2 - 0.014)
complex,10,0.9220,-0.42 + 0.062/(0.036*cos(2.71*x1 + 0.72) + 0.011*(0.63 - x2)^2 + 0.007*(-x3 - 0.36)^2 + 0.004*exp(3.2*x4) - 0.017*exp(-10.0*x5) + 0.002*cos(3.54*x6 + 3.42) - 0.009*cos(5.26*x7 + 9.36) + 0.10 - 0.02*(0.45 - x8)^2 - 0.011*(0.34 - x9)^2 + 3.0e-5*tan(9.40*x10 + 1.60))
)BANK";

constexpr std::string_view kBankHeader = "set,n_inputs,r2,expression";
constexpr std::size_t kBankSize = 20;

// One checksum per record line, simple 1..10 then complex 1..10.
constexpr std::array<std::uint64_t, kBankSize> kRecordChecksums = {
    0xa41c96db6a323f70ULL,
    0xa639fb7d658e22eeULL,
    0xc22673218c075dabULL,
    0x80d5da525058eb5aULL,
    0x1a3c16674d668465ULL,
    0xd7ab7cf0bacc53b4ULL,
    0xb89ca181a106f89bULL,
    0xb37135eecd7f3a27ULL,
    0xca2ca09f1f0eff08ULL,
    0x9713e025a450d319ULL,
    0x1be379b1ce968a52ULL,
    0x22e3fbcf0763ff4dULL,
    0x0c95f3e1f13d8e23ULL,
    0xea972e255220b41bULL,
    0xfa5aca06d73e449dULL,
    0x0a18836a416751ceULL,
    0x39339aa0fff31e47ULL,
    0xa73a326640983dc1ULL,
    0xd77d95c166350a0bULL,
    0x3e64216ed4457746ULL,
};

std::size_t slot_of(BankSet set, int n_inputs) {
  return (set == BankSet::kSimple ? 0 : 10) + static_cast<std::size_t>(n_inputs - 1);
}

}  // namespace

std::string_view to_string(BankSet set) {
  return set == BankSet::kSimple ? "simple" : "complex";
}

BankSet parse_bank_set(std::string_view text) {
  if (text == "simple") return BankSet::kSimple;
  if (text == "complex") return BankSet::kComplex;
  throw Error(ErrorCode::kInvalidParam, "equation set must be simple or complex");
}

EquationBank::EquationBank(std::vector<BankEntry> entries) : entries_(std::move(entries)) {}

const BankEntry& EquationBank::lookup(BankSet set, int n_inputs) const {
  for (const auto& e : entries_) {
    if (e.set == set && e.n_inputs == n_inputs) return e;
  }
  throw Error(ErrorCode::kNotFound, "no " + std::string(to_string(set)) + " equation with " +
                                        std::to_string(n_inputs) + " inputs");
}

std::string_view embedded_bank_text() { return kBankText; }

EquationBank load_bank(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<BankEntry> entries;
  std::array<bool, kBankSize> filled{};
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kBankHeader) {
        throw Error(ErrorCode::kSchemaMismatch, "bank header must be '" +
                                                    std::string(kBankHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 4) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "bank line " + std::to_string(line_no) + " needs 4 fields");
    }
    BankEntry entry;
    entry.set = parse_bank_set(fields[0]);
    const auto n = parse_double(fields[1]);
    if (!n || *n < 1 || *n > 10 || *n != static_cast<int>(*n)) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "bank line " + std::to_string(line_no) + " has a bad input count");
    }
    entry.n_inputs = static_cast<int>(*n);
    const std::size_t slot = slot_of(entry.set, entry.n_inputs);
    if (filled[slot]) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "bank line " + std::to_string(line_no) + " repeats an entry");
    }
    if (fnv1a64(line) != kRecordChecksums[slot]) {
      throw Error(ErrorCode::kChecksumMismatch,
                  "bank line " + std::to_string(line_no) + " differs from the transcription");
    }
    filled[slot] = true;
    entry.r2 = std::string(fields[2]);
    entry.text = std::string(fields[3]);
    entry.expression = parse_expression(entry.text, entry.n_inputs);
    entries.push_back(std::move(entry));
  }
  if (entries.size() != kBankSize) {
    throw Error(ErrorCode::kSchemaMismatch, "bank must hold 20 entries, found " +
                                                std::to_string(entries.size()));
  }
  return EquationBank(std::move(entries));
}

EquationBank load_bank_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open " + path);
  return load_bank(in);
}

const EquationBank& default_bank() {
  static const EquationBank bank = [] {
    std::istringstream in{std::string(kBankText)};
    return load_bank(in);
  }();
  return bank;
}

PoleScan pole_scan(const Expr& e, int dims, std::size_t points, std::uint64_t seed) {
  PoleScan scan;
  scan.points = points;
  scan.min_abs_denominator = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  std::vector<double> x(static_cast<std::size_t>(dims));
  for (std::size_t p = 0; p < points; ++p) {
    for (double& v : x) v = rng.uniform();
    try {
      const EvalResult r = evaluate_checked(e, x);
      if (r.min_abs_denominator < scan.min_abs_denominator) {
        scan.min_abs_denominator = r.min_abs_denominator;
        scan.closest_point = x;
      }
    } catch (const Error& err) {
      if (err.code() == ErrorCode::kPoleError) {
        ++scan.pole_errors;
      } else if (err.code() == ErrorCode::kDomainError) {
        ++scan.domain_errors;
      } else {
        throw;
      }
    }
  }
  return scan;
}

}  // namespace rwt
