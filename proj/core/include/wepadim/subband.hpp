#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wepadim {

/// Canonical order LL < LH < HL < HH fixes embedding channel layout.
enum class Subband : std::uint8_t { LL = 0, LH = 1, HL = 2, HH = 3 };

std::string_view to_string(Subband s) noexcept;
Subband parse_subband(std::string_view name);

/// Non-empty set of subbands.
class SubbandSet {
 public:
  /// Throws a config error for an empty or duplicated list.
  explicit SubbandSet(const std::vector<Subband>& members);

  /// Accepts "LL,LH,HL", "HL_LH_LL", "LL+HH" or "all".
  static SubbandSet parse(std::string_view text);

  /// All 15 non-empty combinations, ordered by bitmask value.
  static std::vector<SubbandSet> all_nonempty();

  bool contains(Subband s) const noexcept { return (mask_ >> static_cast<unsigned>(s)) & 1U; }
  std::size_t size() const noexcept;
  std::vector<Subband> members() const;  // canonical order
  std::uint8_t bits() const noexcept { return mask_; }

  /// Names sorted alphabetically and joined with '_' (e.g. "HL_LH_LL"),
  /// the row key used in result tables.
  std::string key() const;

  friend bool operator==(const SubbandSet&, const SubbandSet&) = default;
  friend auto operator<=>(const SubbandSet&, const SubbandSet&) = default;

 private:
  explicit SubbandSet(std::uint8_t mask) : mask_(mask) {}
  std::uint8_t mask_ = 0;
};

}  // namespace wepadim
