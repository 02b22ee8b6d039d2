#include "wepadim/subband.hpp"

#include <algorithm>
#include <bit>

#include "wepadim/error.hpp"

namespace wepadim {

std::string_view to_string(Subband s) noexcept {
  switch (s) {
    case Subband::LL: return "LL";
    case Subband::LH: return "LH";
    case Subband::HL: return "HL";
    case Subband::HH: return "HH";
  }
  return "??";
}

Subband parse_subband(std::string_view name) {
  if (name == "LL") return Subband::LL;
  if (name == "LH") return Subband::LH;
  if (name == "HL") return Subband::HL;
  if (name == "HH") return Subband::HH;
  fail(ErrorKind::config, "unknown subband '" + std::string(name) + "'");
}

SubbandSet::SubbandSet(const std::vector<Subband>& members) {
  if (members.empty()) fail(ErrorKind::config, "subband set must not be empty");
  for (const Subband s : members) {
    const auto bit = static_cast<std::uint8_t>(1U << static_cast<unsigned>(s));
    if (mask_ & bit) fail(ErrorKind::config, "duplicate subband " + std::string(to_string(s)));
    mask_ = static_cast<std::uint8_t>(mask_ | bit);
  }
}

SubbandSet SubbandSet::parse(std::string_view text) {
  if (text == "all") return SubbandSet(std::uint8_t{0x0F});
  std::vector<Subband> members;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find_first_of(",_+ ", start);
    const std::string_view token = text.substr(start, end == std::string_view::npos ? end : end - start);
    if (!token.empty()) members.push_back(parse_subband(token));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return SubbandSet(members);
}

std::vector<SubbandSet> SubbandSet::all_nonempty() {
  std::vector<SubbandSet> out;
  for (unsigned m = 1; m < 16; ++m) out.push_back(SubbandSet(static_cast<std::uint8_t>(m)));
  return out;
}

std::size_t SubbandSet::size() const noexcept {
  return static_cast<std::size_t>(std::popcount(static_cast<unsigned>(mask_)));
}

std::vector<Subband> SubbandSet::members() const {
  std::vector<Subband> out;
  for (unsigned i = 0; i < 4; ++i) {
    if ((mask_ >> i) & 1U) out.push_back(static_cast<Subband>(i));
  }
  return out;
}

std::string SubbandSet::key() const {
  std::vector<std::string> names;
  for (const Subband s : members()) names.emplace_back(to_string(s));
  std::sort(names.begin(), names.end());
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += '_';
    out += names[i];
  }
  return out;
}

}  // namespace wepadim
