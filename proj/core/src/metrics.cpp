#include "bwt/metrics.hpp"

#include <cstdio>

#include "bwt/errors.hpp"
#include "bwt/transforms.hpp"

namespace bwt {

double accuracy(const Classifier& model, const Dataset& data,
                const DefenseKey* key, const FpeLookup* table) {
  if (data.size() == 0) throw Error("accuracy: empty dataset");
  FpeLookup scratch;
  if (key != nullptr && key->kind == TransformKind::Ffx && table == nullptr) {
    scratch = build_lookup(key->password);
    table = &scratch;
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const ImageTensor& x = data.images[i];
    const int pred = key != nullptr
                         ? model.predict(transform(x, *key, table))
                         : model.predict(x);
    if (pred == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / data.size();
}

AsrResult asr_from_outcomes(const std::vector<bool>& clean_correct,
                            const std::vector<bool>& adv_correct) {
  if (clean_correct.empty() || clean_correct.size() != adv_correct.size())
    throw Error("asr_from_outcomes: empty or mismatched outcome vectors");
  std::size_t clean = 0, flipped = 0;
  for (std::size_t i = 0; i < clean_correct.size(); ++i) {
    if (clean_correct[i]) {
      ++clean;
      if (!adv_correct[i]) ++flipped;
    }
  }
  AsrResult out;
  const double n = static_cast<double>(clean_correct.size());
  out.clean_acc = clean / n;
  out.asr_eq12 = flipped / n;
  out.asr_prefiltered = clean == 0 ? 0.0 : static_cast<double>(flipped) / clean;
  return out;
}

std::string report_csv_header() {
  return "defense,kind,block,attack,epsilon,clean_acc,asr_eq12,"
         "asr_prefiltered,seconds\n";
}

std::string report_csv_row(const ReportRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%s,%d,%s,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                row.defense.c_str(), row.kind.c_str(), row.block,
                row.attack.c_str(), row.epsilon, row.clean_acc, row.asr_eq12,
                row.asr_prefiltered, row.seconds);
  return buf;
}

}  // namespace bwt
