#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lightcone {

/// Single-site Pauli letter.
enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(Pauli p);
Pauli pauli_from_char(char c);

/**
 * @brief Tensor product of single-site Pauli matrices times a phase i^phase_exp.
 *
 * Letters are stored as two bit planes (x, z) packed 64 sites per word:
 * I=(0,0), X=(1,0), Y=(1,1), Z=(0,1). Products and commutation signs are
 * evaluated a word at a time.
 *
 * Site s of an n-site string is the (n-1-s)-th bit of a computational basis
 * index, i.e. site 0 is the leftmost tensor factor.
 */
class PauliString {
 public:
  explicit PauliString(std::size_t n_sites);

  /// Parses "XIZY" (site 0 first). An optional leading "+", "-", "i", "-i"
  /// sets the phase.
  static PauliString from_letters(std::string_view text);
  static PauliString single(std::size_t n_sites, std::size_t site, Pauli p);
  static PauliString two_site(std::size_t n_sites, std::size_t i, Pauli pi,
                              std::size_t j, Pauli pj);

  std::size_t n_sites() const noexcept { return n_sites_; }
  int phase_exp() const noexcept { return phase_; }

  Pauli letter(std::size_t site) const;
  void set_letter(std::size_t site, Pauli p);

  PauliString with_phase(int phase_exp) const;
  PauliString unphased() const { return with_phase(0); }

  bool is_identity() const noexcept;
  std::size_t weight() const noexcept;
  std::vector<std::size_t> support() const;

  /// Number of Y letters; the string equals i^(phase + #Y) X^x Z^z.
  std::size_t y_count() const noexcept;

  std::span<const std::uint64_t> x_words() const noexcept { return x_; }
  std::span<const std::uint64_t> z_words() const noexcept { return z_; }

  std::string to_string() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend std::strong_ordering operator<=>(const PauliString& a,
                                          const PauliString& b);

  friend PauliString operator*(const PauliString& a, const PauliString& b);

 private:
  void check_site(std::size_t site) const;

  std::size_t n_sites_;
  std::vector<std::uint64_t> x_;
  std::vector<std::uint64_t> z_;
  std::uint8_t phase_ = 0;
};

/// Product a*b including the accumulated phase.
PauliString pauli_mul(const PauliString& a, const PauliString& b);

/// +1 if a and b commute, -1 if they anticommute.
int commute_sign(const PauliString& a, const PauliString& b);

}  // namespace lightcone
