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

#ifndef CONVENTION_LEXICON_H_
#define CONVENTION_LEXICON_H_

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace convention {

// Raised for malformed inputs: bad shapes, invalid indices, broken configs.
class ConventionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lower clamp for sigmoid outputs before the logit in conjunction meanings.
inline constexpr double kSigmoidClamp = 1e-9;

struct ObjectId {
  int index = 0;
  friend bool operator==(ObjectId, ObjectId) = default;
  friend auto operator<=>(ObjectId, ObjectId) = default;
};

// A primitive word or a conjunction of two distinct primitives. Conjunctions
// are stored with their primitives in ascending order so that u_a+u_b and
// u_b+u_a compare equal.
class Utterance {
 public:
  static Utterance Primitive(int primitive);
  static Utterance Conjunction(int a, int b);

  int size() const { return size_; }
  bool is_conjunction() const { return size_ == 2; }
  int primitive(int i) const { return primitives_[i]; }
  std::span<const int> primitives() const { return {primitives_.data(), static_cast<std::size_t>(size_)}; }

  // "u0" or "u0+u2".
  std::string ToString() const;
  static Utterance FromString(const std::string& text);

  friend bool operator==(const Utterance&, const Utterance&) = default;

 private:
  Utterance(std::array<int, 2> primitives, int size) : primitives_(primitives), size_(size) {}
  std::array<int, 2> primitives_{0, 0};
  int size_ = 1;
};

double utterance_cost(const Utterance& u);

// The utterances available in a scenario: every primitive, followed by every
// conjunction of two distinct primitives when conjunctions are enabled.
class Vocabulary {
 public:
  Vocabulary() : Vocabulary(2, 2, false) {}
  Vocabulary(int n_objects, int n_primitives, bool conjunctions);

  int n_objects() const { return n_objects_; }
  int n_primitives() const { return n_primitives_; }
  bool conjunctions() const { return conjunctions_; }
  int n_utterances() const { return static_cast<int>(utterances_.size()); }
  const std::vector<Utterance>& utterances() const { return utterances_; }
  const Utterance& utterance(int i) const { return utterances_[i]; }

  // Position of u in utterances(); throws if u is not in the vocabulary.
  int IndexOf(const Utterance& u) const;
  bool Contains(const Utterance& u) const;
  void CheckObject(ObjectId o) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.n_objects_ == b.n_objects_ && a.n_primitives_ == b.n_primitives_ &&
           a.conjunctions_ == b.conjunctions_;
  }

 private:
  int n_objects_;
  int n_primitives_;
  bool conjunctions_;
  std::vector<Utterance> utterances_;
};

// Object-major matrix of real-valued utterance/object strengths. The tag keeps
// partner lexicons and the community-level hyper-lexicon from being mixed up.
template <typename Tag>
class StrengthMatrix {
 public:
  StrengthMatrix() = default;
  StrengthMatrix(int n_objects, int n_primitives, double fill = 0.0)
      : n_objects_(n_objects), n_primitives_(n_primitives),
        values_(static_cast<std::size_t>(n_objects) * n_primitives, fill) {
    if (n_objects < 2 || n_primitives < 1) {
      throw ConventionError("lexicon needs at least 2 objects and 1 primitive");
    }
  }
  StrengthMatrix(int n_objects, int n_primitives, std::vector<double> values)
      : n_objects_(n_objects), n_primitives_(n_primitives), values_(std::move(values)) {
    if (values_.size() != static_cast<std::size_t>(n_objects) * n_primitives) {
      throw ConventionError("lexicon values do not match shape");
    }
  }

  int n_objects() const { return n_objects_; }
  int n_primitives() const { return n_primitives_; }
  std::size_t size() const { return values_.size(); }

  double& at(int object, int primitive) { return values_[Offset(object, primitive)]; }
  double at(int object, int primitive) const { return values_[Offset(object, primitive)]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool Matches(const Vocabulary& vocab) const {
    return n_objects_ == vocab.n_objects() && n_primitives_ == vocab.n_primitives();
  }

  friend bool operator==(const StrengthMatrix&, const StrengthMatrix&) = default;

 private:
  std::size_t Offset(int object, int primitive) const {
    return static_cast<std::size_t>(object) * n_primitives_ + primitive;
  }
  int n_objects_ = 0;
  int n_primitives_ = 0;
  std::vector<double> values_;
};

struct PartnerLexiconTag {};
struct CommunityLexiconTag {};
using LexiconMatrix = StrengthMatrix<PartnerLexiconTag>;
using HyperLexicon = StrengthMatrix<CommunityLexiconTag>;

// Meaning of u applied to o under an object-major strength table laid out as
// n_objects x n_primitives. Primitives are looked up directly; conjunctions
// combine their constituents with the product T-norm in probability space.
double meaning_value(std::span<const double> values, int n_primitives, const Utterance& u,
                     ObjectId o);
double meaning_value(const LexiconMatrix& phi, const Utterance& u, ObjectId o);

// Partial derivatives of the conjunction meaning logit(s(x) s(y)) with respect
// to x and y, honoring the sigmoid clamp.
std::array<double, 2> conjunction_gradient(double x, double y);

enum class PartnerRole { kSpeaker, kListener };

const char* RoleName(PartnerRole role);

struct ObservationRecord {
  int trial_index = 0;
  Utterance utterance = Utterance::Primitive(0);
  ObjectId object;
  // The role the partner played on this trial; selects which of its actions
  // (utterance or object choice) carries the likelihood.
  PartnerRole partner_role = PartnerRole::kSpeaker;
};

class ObservationLog {
 public:
  ObservationLog() = default;
  explicit ObservationLog(int partner_id) : partner_id_(partner_id) {}

  int partner_id() const { return partner_id_; }
  const std::vector<ObservationRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }

  // Trial indices must be strictly increasing.
  void Append(const ObservationRecord& record);

 private:
  int partner_id_ = 0;
  std::vector<ObservationRecord> records_;
};

}  // namespace convention

#endif  // CONVENTION_LEXICON_H_
