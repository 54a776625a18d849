#include "lightcone/pauli.hpp"

#include <algorithm>
#include <bit>

#include "lightcone/errors.hpp"

namespace lightcone {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t n_sites) {
  return (n_sites + kWordBits - 1) / kWordBits;
}

void check_sizes(const PauliString& a, const PauliString& b) {
  if (a.n_sites() != b.n_sites()) {
    throw ArgumentError("Pauli string size mismatch: " +
                        std::to_string(a.n_sites()) + " vs " +
                        std::to_string(b.n_sites()));
  }
}

}  // namespace

char to_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': case 'i': return Pauli::I;
    case 'X': case 'x': return Pauli::X;
    case 'Y': case 'y': return Pauli::Y;
    case 'Z': case 'z': return Pauli::Z;
    default:
      throw ArgumentError(std::string("not a Pauli letter: '") + c + "'");
  }
}

PauliString::PauliString(std::size_t n_sites)
    : n_sites_(n_sites), x_(word_count(n_sites), 0), z_(word_count(n_sites), 0) {
  if (n_sites == 0) throw ArgumentError("Pauli string needs at least one site");
}

PauliString PauliString::from_letters(std::string_view text) {
  int phase = 0;
  if (text.starts_with("-i")) {
    phase = 3;
    text.remove_prefix(2);
  } else if (text.starts_with("+i")) {
    phase = 1;
    text.remove_prefix(2);
  } else if (text.starts_with('i')) {
    phase = 1;
    text.remove_prefix(1);
  } else if (text.starts_with('-')) {
    phase = 2;
    text.remove_prefix(1);
  } else if (text.starts_with('+')) {
    text.remove_prefix(1);
  }
  PauliString s(text.size());
  for (std::size_t site = 0; site < text.size(); ++site) {
    s.set_letter(site, pauli_from_char(text[site]));
  }
  s.phase_ = static_cast<std::uint8_t>(phase);
  return s;
}

PauliString PauliString::single(std::size_t n_sites, std::size_t site,
                                Pauli p) {
  PauliString s(n_sites);
  s.set_letter(site, p);
  return s;
}

PauliString PauliString::two_site(std::size_t n_sites, std::size_t i, Pauli pi,
                                  std::size_t j, Pauli pj) {
  if (i == j) throw ArgumentError("two_site needs distinct sites");
  PauliString s(n_sites);
  s.set_letter(i, pi);
  s.set_letter(j, pj);
  return s;
}

void PauliString::check_site(std::size_t site) const {
  if (site >= n_sites_) {
    throw ArgumentError("site " + std::to_string(site) + " out of range for " +
                        std::to_string(n_sites_) + " sites");
  }
}

Pauli PauliString::letter(std::size_t site) const {
  check_site(site);
  const std::uint64_t bit = std::uint64_t{1} << (site % kWordBits);
  const bool x = x_[site / kWordBits] & bit;
  const bool z = z_[site / kWordBits] & bit;
  if (x && z) return Pauli::Y;
  if (x) return Pauli::X;
  if (z) return Pauli::Z;
  return Pauli::I;
}

void PauliString::set_letter(std::size_t site, Pauli p) {
  check_site(site);
  const std::uint64_t bit = std::uint64_t{1} << (site % kWordBits);
  auto& xw = x_[site / kWordBits];
  auto& zw = z_[site / kWordBits];
  xw &= ~bit;
  zw &= ~bit;
  if (p == Pauli::X || p == Pauli::Y) xw |= bit;
  if (p == Pauli::Z || p == Pauli::Y) zw |= bit;
}

PauliString PauliString::with_phase(int phase_exp) const {
  PauliString s = *this;
  s.phase_ = static_cast<std::uint8_t>(((phase_exp % 4) + 4) % 4);
  return s;
}

bool PauliString::is_identity() const noexcept {
  return std::all_of(x_.begin(), x_.end(), [](auto w) { return w == 0; }) &&
         std::all_of(z_.begin(), z_.end(), [](auto w) { return w == 0; });
}

std::size_t PauliString::weight() const noexcept {
  std::size_t w = 0;
  for (std::size_t i = 0; i < x_.size(); ++i) w += std::popcount(x_[i] | z_[i]);
  return w;
}

std::size_t PauliString::y_count() const noexcept {
  std::size_t w = 0;
  for (std::size_t i = 0; i < x_.size(); ++i) w += std::popcount(x_[i] & z_[i]);
  return w;
}

std::vector<std::size_t> PauliString::support() const {
  std::vector<std::size_t> out;
  for (std::size_t site = 0; site < n_sites_; ++site) {
    if (letter(site) != Pauli::I) out.push_back(site);
  }
  return out;
}

std::string PauliString::to_string() const {
  static constexpr const char* kPrefix[4] = {"", "i", "-", "-i"};
  std::string out = kPrefix[phase_];
  for (std::size_t site = 0; site < n_sites_; ++site) out += to_char(letter(site));
  return out;
}

std::strong_ordering operator<=>(const PauliString& a, const PauliString& b) {
  if (auto c = a.n_sites_ <=> b.n_sites_; c != 0) return c;
  if (auto c = a.x_ <=> b.x_; c != 0) return c;
  if (auto c = a.z_ <=> b.z_; c != 0) return c;
  return a.phase_ <=> b.phase_;
}

PauliString operator*(const PauliString& a, const PauliString& b) {
  check_sizes(a, b);
  PauliString out(a.n_sites_);
  // Per-site products: YZ=iX, XY=iZ, ZX=iY contribute +1 to the exponent of
  // i; the reversed orders contribute -1.
  int exponent = a.phase_ + b.phase_;
  for (std::size_t w = 0; w < a.x_.size(); ++w) {
    const std::uint64_t ax = a.x_[w], az = a.z_[w], bx = b.x_[w], bz = b.z_[w];
    const std::uint64_t a_x = ax & ~az, a_y = ax & az, a_z = ~ax & az;
    const std::uint64_t b_x = bx & ~bz, b_y = bx & bz, b_z = ~bx & bz;
    const std::uint64_t plus = (a_y & b_z) | (a_x & b_y) | (a_z & b_x);
    const std::uint64_t minus = (a_y & b_x) | (a_x & b_z) | (a_z & b_y);
    exponent += std::popcount(plus) - std::popcount(minus);
    out.x_[w] = ax ^ bx;
    out.z_[w] = az ^ bz;
  }
  out.phase_ = static_cast<std::uint8_t>(((exponent % 4) + 4) % 4);
  return out;
}

PauliString pauli_mul(const PauliString& a, const PauliString& b) {
  return a * b;
}

int commute_sign(const PauliString& a, const PauliString& b) {
  check_sizes(a, b);
  const auto ax = a.x_words(), az = a.z_words();
  const auto bx = b.x_words(), bz = b.z_words();
  unsigned parity = 0;
  for (std::size_t w = 0; w < ax.size(); ++w) {
    parity ^= std::popcount((ax[w] & bz[w]) ^ (az[w] & bx[w])) & 1u;
  }
  return parity ? -1 : 1;
}

}  // namespace lightcone
