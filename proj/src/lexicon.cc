// Copyright 2026 The Convention Sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "convention/lexicon.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace convention {

namespace {

double ClampedSigmoid(double x) {
  const double s = 1.0 / (1.0 + std::exp(-x));
  return std::clamp(s, kSigmoidClamp, 1.0 - kSigmoidClamp);
}

int ParsePrimitive(const std::string& token) {
  if (token.size() < 2 || token[0] != 'u') {
    throw ConventionError("bad utterance token '" + token + "'");
  }
  std::size_t used = 0;
  const int value = std::stoi(token.substr(1), &used);
  if (used != token.size() - 1) throw ConventionError("bad utterance token '" + token + "'");
  return value;
}

}  // namespace

Utterance Utterance::Primitive(int primitive) {
  if (primitive < 0) throw ConventionError("negative primitive index");
  return Utterance({primitive, primitive}, 1);
}

Utterance Utterance::Conjunction(int a, int b) {
  if (a < 0 || b < 0) throw ConventionError("negative primitive index");
  if (a == b) throw ConventionError("conjunction needs two distinct primitives");
  return Utterance({std::min(a, b), std::max(a, b)}, 2);
}

std::string Utterance::ToString() const {
  std::string out = "u" + std::to_string(primitives_[0]);
  if (size_ == 2) out += "+u" + std::to_string(primitives_[1]);
  return out;
}

Utterance Utterance::FromString(const std::string& text) {
  const auto plus = text.find('+');
  if (plus == std::string::npos) return Primitive(ParsePrimitive(text));
  return Conjunction(ParsePrimitive(text.substr(0, plus)), ParsePrimitive(text.substr(plus + 1)));
}

double utterance_cost(const Utterance& u) { return static_cast<double>(u.size()); }

Vocabulary::Vocabulary(int n_objects, int n_primitives, bool conjunctions)
    : n_objects_(n_objects), n_primitives_(n_primitives), conjunctions_(conjunctions) {
  if (n_objects < 2) throw ConventionError("need at least 2 objects");
  if (n_primitives < 1) throw ConventionError("need at least 1 primitive");
  if (conjunctions && n_primitives < 2) {
    throw ConventionError("conjunctions need at least 2 primitives");
  }
  for (int p = 0; p < n_primitives; ++p) utterances_.push_back(Utterance::Primitive(p));
  if (conjunctions) {
    for (int a = 0; a < n_primitives; ++a) {
      for (int b = a + 1; b < n_primitives; ++b) {
        utterances_.push_back(Utterance::Conjunction(a, b));
      }
    }
  }
}

int Vocabulary::IndexOf(const Utterance& u) const {
  const auto it = std::find(utterances_.begin(), utterances_.end(), u);
  if (it == utterances_.end()) {
    throw ConventionError("utterance " + u.ToString() + " is not in the vocabulary");
  }
  return static_cast<int>(it - utterances_.begin());
}

bool Vocabulary::Contains(const Utterance& u) const {
  return std::find(utterances_.begin(), utterances_.end(), u) != utterances_.end();
}

void Vocabulary::CheckObject(ObjectId o) const {
  if (o.index < 0 || o.index >= n_objects_) {
    throw ConventionError("object index " + std::to_string(o.index) + " out of range");
  }
}

double meaning_value(std::span<const double> values, int n_primitives, const Utterance& u,
                     ObjectId o) {
  const auto row = values.subspan(static_cast<std::size_t>(o.index) * n_primitives, n_primitives);
  if (!u.is_conjunction()) return row[u.primitive(0)];
  const double p = ClampedSigmoid(row[u.primitive(0)]) * ClampedSigmoid(row[u.primitive(1)]);
  return std::log(p) - std::log1p(-p);
}

double meaning_value(const LexiconMatrix& phi, const Utterance& u, ObjectId o) {
  if (o.index < 0 || o.index >= phi.n_objects()) throw ConventionError("object out of range");
  for (int p : u.primitives()) {
    if (p >= phi.n_primitives()) throw ConventionError("primitive out of range");
  }
  const double value = meaning_value(phi.values(), phi.n_primitives(), u, o);
  if (!std::isfinite(value)) {
    throw ConventionError("non-finite meaning for " + u.ToString() + " on object " +
                          std::to_string(o.index));
  }
  return value;
}

std::array<double, 2> conjunction_gradient(double x, double y) {
  // d/dx logit(s(x) s(y)) = (1 - s(x)) / (1 - s(x) s(y)); a clamped factor
  // contributes nothing.
  const double sx_raw = 1.0 / (1.0 + std::exp(-x));
  const double sy_raw = 1.0 / (1.0 + std::exp(-y));
  const double sx = std::clamp(sx_raw, kSigmoidClamp, 1.0 - kSigmoidClamp);
  const double sy = std::clamp(sy_raw, kSigmoidClamp, 1.0 - kSigmoidClamp);
  const double denom = 1.0 - sx * sy;
  const double gx = (sx == sx_raw) ? (1.0 - sx) / denom : 0.0;
  const double gy = (sy == sy_raw) ? (1.0 - sy) / denom : 0.0;
  return {gx, gy};
}

const char* RoleName(PartnerRole role) {
  return role == PartnerRole::kSpeaker ? "speaker" : "listener";
}

void ObservationLog::Append(const ObservationRecord& record) {
  if (!records_.empty() && record.trial_index <= records_.back().trial_index) {
    throw ConventionError("observation trial indices must be strictly increasing");
  }
  records_.push_back(record);
}

}  // namespace convention
