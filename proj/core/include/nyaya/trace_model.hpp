#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Domain types for the six-phase Nyaya reasoning trace and its frontmatter.
// All types are immutable values after construction and safe to share
// between concurrent workers.

namespace nyaya {

enum class Phase {
  samshaya = 0,
  pramana,
  pancha_avayava,
  tarka,
  hetvabhasa,
  nirnaya,
};
inline constexpr int kPhaseCount = 6;

// Canonical phase order Samshaya -> Pramana -> Pancha Avayava -> Tarka ->
// Hetvabhasa -> Nirnaya.
const std::array<Phase, kPhaseCount>& canonical_phase_order();
std::string_view phase_name(Phase p);

enum class DoubtType {
  samana_dharma_upapatti,
  aneka_dharma_upapatti,
  vipratipatti,
  upalabdhi_avyavastha,
  anupalabdhi_avyavastha,
};

const std::vector<DoubtType>& all_doubt_types();
std::string_view doubt_type_key(DoubtType t);

// A doubt-type field value. Non-canonical surface forms are retained with
// their normalized key so error messages can quote them verbatim.
struct DoubtValue {
  std::string raw;                     // surface text as written
  std::string key;                     // normalize_enum_token(raw)
  std::optional<DoubtType> canonical;  // set iff key is canonical

  bool is_canonical() const { return canonical.has_value(); }
};

enum class PramanaKind { pratyaksha, anumana, upamana, shabda };

const std::vector<PramanaKind>& all_pramana_kinds();
std::string_view pramana_kind_key(PramanaKind k);

enum class AnumanaSubtype { purvavat, sheshavat, samanyatodrishta };

std::optional<AnumanaSubtype> anumana_subtype_from_key(std::string_view key);
std::string_view anumana_subtype_key(AnumanaSubtype s);

// One evidence-source block. Content is opaque prose; inference subtype
// annotations are collected when present (model outputs often omit them).
struct PramanaBlock {
  std::string content;
  std::vector<AnumanaSubtype> subtypes;

  bool present = false;  // subsection header seen
};

enum class FallacySet { canonical, alternate, either };

// canonical: Savyabhichara, Viruddha, Prakaranasama, Sadhyasama, Kalaatita
// alternate: Savyabhichara, Viruddha, Asiddha, Satpratipaksha, Badhita
const std::vector<std::string>& fallacy_keys(FallacySet set);

struct Syllogism {
  std::string topic;
  std::string pratijna;
  std::string hetu;
  std::string udaharana;
  std::string upanaya;
  std::string nigamana;

  bool complete() const;
  std::vector<std::string> missing_members() const;
};

enum class TarkaForm { four_field, single_test };

struct TarkaPhase {
  TarkaForm form = TarkaForm::four_field;
  std::string hypothesis;
  std::string consequence;
  std::string analysis;
  std::string resolution;
  std::string test;  // single_test form only

  bool field_complete() const;
};

struct HetvabhasaPhase {
  // normalized fallacy key -> check text ("No", "none_detected", prose)
  std::map<std::string, std::string> checks;
  std::string reasoning;

  // Number of distinct keys of the given set that were checked, 0..5.
  int checked_count(FallacySet set) const;
};

enum class NirnayaStatus { definitive_knowledge, hypothesis_requiring_verification };
enum class Confidence { high, medium, low };

struct NirnayaPhase {
  std::optional<NirnayaStatus> status;
  std::string final_answer;
  std::string justification;
  std::optional<Confidence> confidence;
};

struct SamshayaPhase {
  std::optional<DoubtValue> doubt_type;
  std::string justification;
};

struct Frontmatter {
  std::string id;
  std::string problem_type;  // constraint_satisfaction | boolean_sat | ...
  std::optional<std::string> difficulty;
  std::string ground_truth;
  std::optional<bool> z3_verifiable;
  std::optional<bool> negative_example;
  std::map<std::string, std::string> metadata;
};

const std::vector<std::string>& known_problem_types();

struct NyayaTrace {
  SamshayaPhase samshaya;
  std::map<PramanaKind, PramanaBlock> pramana;
  std::vector<Syllogism> pancha_avayava;
  TarkaPhase tarka;
  HetvabhasaPhase hetvabhasa;
  NirnayaPhase nirnaya;
  std::array<bool, kPhaseCount> phase_presence{};  // canonical order
  std::string leading_text;                        // text before the first phase header

  bool phase_present(Phase p) const { return phase_presence[static_cast<int>(p)]; }
  int phases_present() const;
};

// Lowercases, strips bold markers and parenthetical glosses, collapses
// whitespace and joins with underscores. Total and idempotent.
//   "Vipratipatti (Conflicting possibilities to determine)" -> "vipratipatti"
std::string normalize_enum_token(std::string_view surface);

std::optional<DoubtType> doubt_type_from_key(std::string_view key);

}  // namespace nyaya
