#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sau/errors.hpp"
#include "sau/ortho_family.hpp"
#include "sau/pursuit.hpp"
#include "sau/rational.hpp"
#include "sau/step_function.hpp"

namespace sau {

// b_j: indicator of the j-th dyadic interval in level order.
// j = 0 is [0,1); j = 2^l - 1 + i is [i/2^l, (i+1)/2^l).
StepFn dense_element(std::uint64_t j);

// Level l and offset i of dense index j.
std::pair<unsigned, std::uint64_t> dyadic_position(std::uint64_t j);

struct PairIndex {
  std::uint64_t j = 0;  // 1-based dense index
  std::uint64_t k = 0;  // precision level, eps = 2^-k

  friend auto operator<=>(const PairIndex&, const PairIndex&) = default;
};

// m-th pair (m >= 1) in Cantor anti-diagonal order: s = j + k ascending,
// then j ascending.
PairIndex pair_index(std::uint64_t m);

struct StageRecord {
  std::uint64_t m = 0;
  std::uint64_t j = 0;
  std::uint64_t k = 0;
  std::size_t units_added = 0;
  Rational residual_norm2_sq;

  friend bool operator==(const StageRecord&, const StageRecord&) = default;
};

struct BasisState {
  OrthoFamily family;
  std::vector<StageRecord> stage_log;
  std::set<PairIndex> processed;

  friend bool operator==(const BasisState&, const BasisState&) = default;
};

struct StageOptions {
  LyapunovOptions lyapunov{};
  std::function<void(const StageRecord&, const BasisState&)> on_stage;
};

// Stage m: pursue b_{j_m - 1} against the current family with eps = 2^-k_m and
// append the units found. Throws StageError on ceiling aborts.
void advance_stage(BasisState& state, const StageOptions& opts = {});

// Runs stages 1..stages from the family {1}.
BasisState run_stages(std::uint64_t stages, const StageOptions& opts = {});

// Wraps an abort inside a stage with its index.
class StageError : public CeilingError {
 public:
  StageError(const CeilingError& cause, std::uint64_t stage);
  std::uint64_t stage() const noexcept { return stage_; }

 private:
  std::uint64_t stage_;
};

enum class PairStatus { pass, fail, not_certified };

std::string to_string(PairStatus s);

struct PairCertificate {
  std::uint64_t j = 0;
  std::uint64_t k = 0;
  PairStatus status = PairStatus::not_certified;
  std::optional<Rational> distance_sq;  // set for processed pairs
  Rational bound;                       // 2^{-2k}
};

struct GramWitness {
  std::size_t row = 0;
  std::size_t col = 0;
  Rational value;
};

struct ValueWitness {
  std::size_t member = 0;
  std::size_t cell = 0;
  Rational lo;
  Rational hi;
  Rational value;
};

struct VerifyReport {
  bool first_member_is_one = false;
  bool gram_pass = false;
  std::vector<GramWitness> gram_witnesses;  // first few failing entries
  bool unitary_pass = false;
  std::vector<ValueWitness> value_witnesses;
  std::vector<PairCertificate> pairs;
  bool completeness_pass = false;

  bool pass() const { return first_member_is_one && gram_pass && unitary_pass && completeness_pass; }
};

// Exact Gram check, +-1 check of every member, and distance certificates for
// every processed (j, k) with j <= j_max, k <= k_max. Pairs in range that were
// never processed are reported as not certified. jobs > 1 spreads the Gram
// entries and pair certificates over worker threads.
VerifyReport verify_basis(const BasisState& state, std::uint64_t j_max, std::uint64_t k_max, unsigned jobs = 1);

// Largest j and k among processed pairs (0, 0 when none).
PairIndex processed_extent(const BasisState& state);

struct TraceVectorEntry {
  Rational lhs;  // tau(u x u)
  Rational rhs;  // tau(x)
  bool equal = false;
};

struct TraceVectorReport {
  std::vector<TraceVectorEntry> entries;
  bool pass() const;
};

// Certifies tau(u x u) = tau(x) for every x.
TraceVectorReport trace_vector_certificate(const SAUnitaryFn& u, const std::vector<StepFn>& xs);

}  // namespace sau
