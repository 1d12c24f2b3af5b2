#include "nyaya/trace_model.hpp"

#include <algorithm>

#include "text_util.hpp"

namespace nyaya {

const std::array<Phase, kPhaseCount>& canonical_phase_order() {
  static const std::array<Phase, kPhaseCount> order = {
      Phase::samshaya, Phase::pramana, Phase::pancha_avayava,
      Phase::tarka,    Phase::hetvabhasa, Phase::nirnaya,
  };
  return order;
}

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::samshaya: return "Samshaya";
    case Phase::pramana: return "Pramana";
    case Phase::pancha_avayava: return "Pancha Avayava";
    case Phase::tarka: return "Tarka";
    case Phase::hetvabhasa: return "Hetvabhasa";
    case Phase::nirnaya: return "Nirnaya";
  }
  return "";
}

const std::vector<DoubtType>& all_doubt_types() {
  static const std::vector<DoubtType> all = {
      DoubtType::samana_dharma_upapatti, DoubtType::aneka_dharma_upapatti,
      DoubtType::vipratipatti,           DoubtType::upalabdhi_avyavastha,
      DoubtType::anupalabdhi_avyavastha,
  };
  return all;
}

std::string_view doubt_type_key(DoubtType t) {
  switch (t) {
    case DoubtType::samana_dharma_upapatti: return "samana_dharma_upapatti";
    case DoubtType::aneka_dharma_upapatti: return "aneka_dharma_upapatti";
    case DoubtType::vipratipatti: return "vipratipatti";
    case DoubtType::upalabdhi_avyavastha: return "upalabdhi_avyavastha";
    case DoubtType::anupalabdhi_avyavastha: return "anupalabdhi_avyavastha";
  }
  return "";
}

std::optional<DoubtType> doubt_type_from_key(std::string_view key) {
  for (DoubtType t : all_doubt_types()) {
    if (doubt_type_key(t) == key) return t;
  }
  return std::nullopt;
}

const std::vector<PramanaKind>& all_pramana_kinds() {
  static const std::vector<PramanaKind> all = {
      PramanaKind::pratyaksha, PramanaKind::anumana,
      PramanaKind::upamana,    PramanaKind::shabda,
  };
  return all;
}

std::string_view pramana_kind_key(PramanaKind k) {
  switch (k) {
    case PramanaKind::pratyaksha: return "pratyaksha";
    case PramanaKind::anumana: return "anumana";
    case PramanaKind::upamana: return "upamana";
    case PramanaKind::shabda: return "shabda";
  }
  return "";
}

std::optional<AnumanaSubtype> anumana_subtype_from_key(std::string_view key) {
  if (key == "purvavat") return AnumanaSubtype::purvavat;
  if (key == "sheshavat") return AnumanaSubtype::sheshavat;
  if (key == "samanyatodrishta") return AnumanaSubtype::samanyatodrishta;
  return std::nullopt;
}

std::string_view anumana_subtype_key(AnumanaSubtype s) {
  switch (s) {
    case AnumanaSubtype::purvavat: return "purvavat";
    case AnumanaSubtype::sheshavat: return "sheshavat";
    case AnumanaSubtype::samanyatodrishta: return "samanyatodrishta";
  }
  return "";
}

const std::vector<std::string>& fallacy_keys(FallacySet set) {
  static const std::vector<std::string> canonical = {
      "savyabhichara", "viruddha", "prakaranasama", "sadhyasama", "kalaatita",
  };
  static const std::vector<std::string> alternate = {
      "savyabhichara", "viruddha", "asiddha", "satpratipaksha", "badhita",
  };
  static const std::vector<std::string> either = [] {
    std::vector<std::string> u = canonical;
    for (const auto& k : alternate) {
      if (std::find(u.begin(), u.end(), k) == u.end()) u.push_back(k);
    }
    return u;
  }();
  switch (set) {
    case FallacySet::canonical: return canonical;
    case FallacySet::alternate: return alternate;
    case FallacySet::either: return either;
  }
  return either;
}

bool Syllogism::complete() const { return missing_members().empty(); }

std::vector<std::string> Syllogism::missing_members() const {
  std::vector<std::string> missing;
  if (text::trim(pratijna).empty()) missing.emplace_back("pratijna");
  if (text::trim(hetu).empty()) missing.emplace_back("hetu");
  if (text::trim(udaharana).empty()) missing.emplace_back("udaharana");
  if (text::trim(upanaya).empty()) missing.emplace_back("upanaya");
  if (text::trim(nigamana).empty()) missing.emplace_back("nigamana");
  return missing;
}

bool TarkaPhase::field_complete() const {
  if (form == TarkaForm::single_test) return !text::trim(test).empty();
  return !text::trim(hypothesis).empty() && !text::trim(consequence).empty() &&
         !text::trim(analysis).empty() && !text::trim(resolution).empty();
}

int HetvabhasaPhase::checked_count(FallacySet set) const {
  int count = 0;
  for (const auto& key : fallacy_keys(set)) {
    if (checks.count(key) > 0) ++count;
  }
  return count;
}

int NyayaTrace::phases_present() const {
  int n = 0;
  for (bool b : phase_presence) n += b ? 1 : 0;
  return n;
}

std::string normalize_enum_token(std::string_view surface) {
  std::string s = text::strip_bold(surface);
  s = text::strip_parentheticals(s);
  std::string norm = text::normalize_for_match(s);
  for (char& c : norm) {
    if (c == ' ') c = '_';
  }
  return norm;
}

}  // namespace nyaya
