#pragma once

#include <string>
#include <vector>

#include "bwt/classifier.hpp"
#include "bwt/dataset.hpp"
#include "bwt/fpe.hpp"
#include "bwt/key.hpp"

namespace bwt {

/// Mean of 1(f(x_i) = y_i); inputs go through the provider key when given.
double accuracy(const Classifier& model, const Dataset& data,
                const DefenseKey* key = nullptr,
                const FpeLookup* table = nullptr);

struct AsrResult {
  double clean_acc = 0.0;        // clean-correct fraction
  double asr_eq12 = 0.0;         // 1(clean-correct and attack flips) over N
  double asr_prefiltered = 0.0;  // same numerator over clean-correct count
};

/// Attack success rates from per-sample outcome flags; both the literal
/// definition over N and the clean-correct-prefiltered variant.
AsrResult asr_from_outcomes(const std::vector<bool>& clean_correct,
                            const std::vector<bool>& adv_correct);

/// One row of the experiment report.
struct ReportRow {
  std::string defense;  // "standard" or "protected"
  std::string kind;     // "none", "shuffle", "flip", "ffx"
  int block = 0;
  std::string attack;   // "none", "pgd", "spsa", ...
  double epsilon = 0.0;
  double clean_acc = 0.0;
  double asr_eq12 = 0.0;
  double asr_prefiltered = 0.0;
  double seconds = 0.0;
};

std::string report_csv_header();
std::string report_csv_row(const ReportRow& row);

}  // namespace bwt
