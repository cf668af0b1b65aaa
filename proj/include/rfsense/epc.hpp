// Copyright 2026 The rfsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Sensor samples carried in a 96-bit EPC, and the I2C-EEPROM view of the
// tag chip's non-volatile memory that the reader inventories over the air.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rfsense/errors.hpp"

namespace rfsense {

// ---------------------------------------------------------------------------
// CRC-16 as used by the air interface: poly 0x1021, preset 0xFFFF, MSB first,
// ones-complement on transmission. Running the register over a message
// followed by its transmitted CRC leaves the residue 0x1D0F.

inline constexpr std::uint16_t kCrc16Poly = 0x1021;
inline constexpr std::uint16_t kCrc16Preset = 0xFFFF;
inline constexpr std::uint16_t kCrc16Residue = 0x1D0F;

namespace detail {

inline constexpr std::array<std::uint16_t, 256> make_crc16_table() {
  std::array<std::uint16_t, 256> table{};
  for (unsigned i = 0; i < 256; ++i) {
    std::uint16_t r = static_cast<std::uint16_t>(i << 8);
    for (int b = 0; b < 8; ++b) {
      r = (r & 0x8000) ? static_cast<std::uint16_t>((r << 1) ^ kCrc16Poly)
                       : static_cast<std::uint16_t>(r << 1);
    }
    table[i] = r;
  }
  return table;
}

inline constexpr auto kCrc16Table = make_crc16_table();

}  // namespace detail

class Crc16 {
 public:
  constexpr void update_bit(bool bit) {
    const bool feedback = ((reg_ >> 15) & 1u) != static_cast<unsigned>(bit);
    reg_ = static_cast<std::uint16_t>(reg_ << 1);
    if (feedback) reg_ ^= kCrc16Poly;
  }

  constexpr void update_byte(std::uint8_t byte) {
    reg_ = static_cast<std::uint16_t>(
        (reg_ << 8) ^ detail::kCrc16Table[((reg_ >> 8) ^ byte) & 0xFF]);
  }

  constexpr void update_word(std::uint16_t word) {
    update_byte(static_cast<std::uint8_t>(word >> 8));
    update_byte(static_cast<std::uint8_t>(word & 0xFF));
  }

  constexpr void update(std::span<const std::uint8_t> bytes) {
    for (auto b : bytes) update_byte(b);
  }

  constexpr void update(std::span<const std::uint16_t> words) {
    for (auto w : words) update_word(w);
  }

  void update(const std::vector<bool>& bits) {
    for (bool b : bits) update_bit(b);
  }

  /// Raw register (before complement).
  constexpr std::uint16_t reg() const { return reg_; }
  /// Value placed on the wire / in StoredCRC.
  constexpr std::uint16_t transmitted() const {
    return static_cast<std::uint16_t>(~reg_);
  }

 private:
  std::uint16_t reg_ = kCrc16Preset;
};

inline std::uint16_t crc16(const std::vector<bool>& bits) {
  Crc16 c;
  c.update(bits);
  return c.transmitted();
}

inline std::uint16_t crc16(std::span<const std::uint8_t> bytes) {
  Crc16 c;
  c.update(bytes);
  return c.transmitted();
}

inline std::uint16_t crc16(std::span<const std::uint16_t> words) {
  Crc16 c;
  c.update(words);
  return c.transmitted();
}

inline std::uint16_t crc16_register(const std::vector<bool>& bits) {
  Crc16 c;
  c.update(bits);
  return c.reg();
}

// ---------------------------------------------------------------------------
// EPC layout
//
//   word0  scheme tag (8) | node id (8)
//   word1  sequence counter, wraps at 2^16
//   word2  000000 | 10-bit ADC code
//   word3-5 fixed namespace filler

inline constexpr std::uint8_t kSchemeTag = 0x5D;
inline constexpr std::array<std::uint16_t, 3> kEpcFiller = {0x5246, 0x5345,
                                                            0x4E53};
inline constexpr std::uint32_t kMaxSampleCode = 1023;

struct Epc96 {
  std::array<std::uint16_t, 6> words{};
  friend bool operator==(const Epc96&, const Epc96&) = default;
};

struct SensorSample {
  std::uint8_t node_id = 0;
  std::uint16_t seq = 0;
  std::uint16_t code = 0;
  friend bool operator==(const SensorSample&, const SensorSample&) = default;
};

inline Epc96 encode_epc(int node_id, std::uint32_t seq, std::uint32_t code) {
  if (node_id < 0 || node_id > 255) {
    throw InvalidArgument("encode_epc: node_id must be in [0, 255]");
  }
  if (code > kMaxSampleCode) {
    throw InvalidArgument("encode_epc: sample code must be in [0, 1023]");
  }
  Epc96 epc;
  epc.words[0] = static_cast<std::uint16_t>((kSchemeTag << 8) | node_id);
  epc.words[1] = static_cast<std::uint16_t>(seq & 0xFFFF);
  epc.words[2] = static_cast<std::uint16_t>(code);
  for (std::size_t i = 0; i < kEpcFiller.size(); ++i) epc.words[3 + i] = kEpcFiller[i];
  return epc;
}

inline SensorSample decode_epc(const Epc96& epc) {
  if ((epc.words[0] >> 8) != kSchemeTag) {
    throw UnknownSchemeError("decode_epc: unknown EPC scheme header");
  }
  if ((epc.words[2] & 0xFC00) != 0) {
    throw UnknownSchemeError("decode_epc: reserved sample bits set");
  }
  return SensorSample{static_cast<std::uint8_t>(epc.words[0] & 0xFF), epc.words[1],
                      epc.words[2]};
}

// ---------------------------------------------------------------------------
// Tag memory

inline constexpr std::size_t kNvmBudgetBits = 2176;

/// PC word for an EPC of `epc_words` words: length in bits 15..11, all
/// other flags clear.
inline constexpr std::uint16_t pc_word(std::size_t epc_words) {
  return static_cast<std::uint16_t>((epc_words & 0x1F) << 11);
}

inline constexpr std::size_t pc_length_words(std::uint16_t pc) { return pc >> 11; }

struct BankLayout {
  std::size_t reserved_bits = 64;
  std::size_t epc_bits = 128;
  std::size_t tid_bits = 96;
  std::size_t user_bits = kNvmBudgetBits - 64 - 128 - 96;

  std::size_t total_bits() const {
    return reserved_bits + epc_bits + tid_bits + user_bits;
  }

  void validate() const {
    for (std::size_t b : {reserved_bits, epc_bits, tid_bits, user_bits}) {
      if (b % 16 != 0) throw CapacityError("bank sizes must be whole 16-bit words");
    }
    if (total_bits() > kNvmBudgetBits) {
      throw CapacityError("bank sizes exceed the 2176-bit NVM budget");
    }
  }
};

enum class Bank { Reserved, Epc, Tid, User };

inline std::string_view bank_name(Bank b) {
  switch (b) {
    case Bank::Reserved: return "RESERVED";
    case Bank::Epc: return "EPC";
    case Bank::Tid: return "TID";
    case Bank::User: return "USER";
  }
  return "?";
}

class TagMemory {
 public:
  TagMemory() : TagMemory(BankLayout{}) {}

  explicit TagMemory(const BankLayout& layout) {
    layout.validate();
    reserved_.assign(layout.reserved_bits / 16, 0);
    epc_.assign(layout.epc_bits / 16, 0);
    tid_.assign(layout.tid_bits / 16, 0);
    user_.assign(layout.user_bits / 16, 0);
  }

  std::vector<std::uint16_t>& bank(Bank b) {
    switch (b) {
      case Bank::Reserved: return reserved_;
      case Bank::Epc: return epc_;
      case Bank::Tid: return tid_;
      case Bank::User: return user_;
    }
    return user_;
  }
  const std::vector<std::uint16_t>& bank(Bank b) const {
    return const_cast<TagMemory*>(this)->bank(b);
  }

  std::size_t total_bits() const {
    return 16 * (reserved_.size() + epc_.size() + tid_.size() + user_.size());
  }

  friend bool operator==(const TagMemory&, const TagMemory&) = default;

 private:
  std::vector<std::uint16_t> reserved_, epc_, tid_, user_;
};

/// StoredCRC over PC || EPC as held in the EPC bank.
inline std::uint16_t stored_crc_for(std::uint16_t pc,
                                    std::span<const std::uint16_t> epc_words) {
  Crc16 c;
  c.update_word(pc);
  c.update(epc_words);
  return c.transmitted();
}

/// I2C-side write of a new EPC: EPC words, PC length, StoredCRC.
inline TagMemory commit(TagMemory mem, const Epc96& epc) {
  auto& bank = mem.bank(Bank::Epc);
  if (bank.size() < 2 + epc.words.size()) {
    throw CapacityError("commit: EPC bank too small for a 96-bit EPC");
  }
  const std::uint16_t pc = pc_word(epc.words.size());
  bank[1] = pc;
  for (std::size_t i = 0; i < epc.words.size(); ++i) bank[2 + i] = epc.words[i];
  bank[0] = stored_crc_for(pc, epc.words);
  return mem;
}

inline bool verify_stored_crc(const TagMemory& mem) {
  const auto& bank = mem.bank(Bank::Epc);
  if (bank.size() < 2) return false;
  const std::size_t len = pc_length_words(bank[1]);
  if (bank.size() < 2 + len) return false;
  // Residue check over PC || EPC || StoredCRC, the way a reader does it.
  Crc16 c;
  c.update(std::span<const std::uint16_t>(bank.data() + 1, len + 1));
  c.update_word(bank[0]);
  return c.reg() == kCrc16Residue;
}

/// Wireless read-back: the EPC as an inventory would report it, or nullopt
/// when the stored CRC does not verify or the PC length is not 96 bits.
inline std::optional<Epc96> read_epc(const TagMemory& mem) {
  if (!verify_stored_crc(mem)) return std::nullopt;
  const auto& bank = mem.bank(Bank::Epc);
  if (pc_length_words(bank[1]) != 6) return std::nullopt;
  Epc96 epc;
  for (std::size_t i = 0; i < 6; ++i) epc.words[i] = bank[2 + i];
  return epc;
}

// One bank per line, "NAME:" followed by big-endian hex words.
inline std::string hex_dump(const TagMemory& mem) {
  std::ostringstream os;
  static constexpr char kHex[] = "0123456789ABCDEF";
  for (Bank b : {Bank::Reserved, Bank::Epc, Bank::Tid, Bank::User}) {
    os << bank_name(b) << ':';
    for (std::uint16_t w : mem.bank(b)) {
      os << ' ' << kHex[(w >> 12) & 0xF] << kHex[(w >> 8) & 0xF]
         << kHex[(w >> 4) & 0xF] << kHex[w & 0xF];
    }
    os << '\n';
  }
  return os.str();
}

inline TagMemory parse_hex_dump(std::string_view text) {
  BankLayout layout{0, 0, 0, 0};
  std::array<std::vector<std::uint16_t>, 4> words;
  std::array<bool, 4> seen{};
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw InvalidArgument("hex dump: missing bank name");
    const std::string name = line.substr(0, colon);
    int idx = -1;
    for (int i = 0; i < 4; ++i) {
      if (bank_name(static_cast<Bank>(i)) == name) idx = i;
    }
    if (idx < 0 || seen[idx]) throw InvalidArgument("hex dump: bad bank '" + name + "'");
    seen[idx] = true;
    std::istringstream ws(line.substr(colon + 1));
    std::string tok;
    while (ws >> tok) {
      if (tok.size() != 4) throw InvalidArgument("hex dump: words are 4 hex digits");
      std::size_t pos = 0;
      unsigned long v = 0;
      try {
        v = std::stoul(tok, &pos, 16);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != 4) throw InvalidArgument("hex dump: bad hex word '" + tok + "'");
      words[idx].push_back(static_cast<std::uint16_t>(v));
    }
  }
  layout.reserved_bits = 16 * words[0].size();
  layout.epc_bits = 16 * words[1].size();
  layout.tid_bits = 16 * words[2].size();
  layout.user_bits = 16 * words[3].size();
  TagMemory mem(layout);
  for (int i = 0; i < 4; ++i) mem.bank(static_cast<Bank>(i)) = words[i];
  return mem;
}

}  // namespace rfsense
