#pragma once

// Flat binary serialization for the sieved tables, so the CLI can reuse
// them across invocations. Layout is versioned and documented in
// docs/table-format.md; all integers little-endian.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfprime/digest.hpp"
#include "sfprime/tables.hpp"
#include "sfprime/version.hpp"

namespace sfprime {

enum class TableKind : uint32_t {
  prime = 1,
  mobius = 2,
  mangoldt = 3,
  divisor = 4,
};

namespace detail {

inline constexpr char table_magic[4] = {'S', 'F', 'P', 'T'};

struct TableHeader {
  char magic[4];
  uint32_t version;
  uint32_t kind;
  uint32_t aux;          // divisor order; 0 for other kinds
  uint64_t limit;
  uint64_t payload_bytes;
};
static_assert(sizeof(TableHeader) == 32);

inline void write_blob(const std::string& path, TableKind kind, uint32_t aux,
                       uint64_t limit, const void* payload, uint64_t bytes) {
  TableHeader h{};
  std::memcpy(h.magic, table_magic, 4);
  h.version = table_format_version;
  h.kind = static_cast<uint32_t>(kind);
  h.aux = aux;
  h.limit = limit;
  h.payload_bytes = bytes;

  Fnv1a64 sum;
  sum.update(&h, sizeof h);
  sum.update(payload, bytes);
  uint64_t check = sum.value();

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f.write(reinterpret_cast<const char*>(&h), sizeof h);
  f.write(static_cast<const char*>(payload), static_cast<std::streamsize>(bytes));
  f.write(reinterpret_cast<const char*>(&check), sizeof check);
  if (!f) throw std::runtime_error("short write: " + path);
}

inline std::vector<char> read_blob(const std::string& path, TableKind kind,
                                   TableHeader& h) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for read: " + path);
  f.read(reinterpret_cast<char*>(&h), sizeof h);
  if (!f || std::memcmp(h.magic, table_magic, 4) != 0)
    throw std::runtime_error("bad table magic: " + path);
  if (h.version != table_format_version)
    throw std::runtime_error("unsupported table format version in " + path);
  if (h.kind != static_cast<uint32_t>(kind))
    throw std::runtime_error("table kind mismatch in " + path);
  std::vector<char> payload(h.payload_bytes);
  f.read(payload.data(), static_cast<std::streamsize>(payload.size()));
  uint64_t check = 0;
  f.read(reinterpret_cast<char*>(&check), sizeof check);
  if (!f) throw std::runtime_error("truncated table file: " + path);
  Fnv1a64 sum;
  sum.update(&h, sizeof h);
  sum.update(payload.data(), payload.size());
  if (sum.value() != check)
    throw std::runtime_error("table checksum mismatch in " + path);
  return payload;
}

}  // namespace detail

inline void save_table(const PrimeTable& t, const std::string& path) {
  detail::write_blob(path, TableKind::prime, 0, t.limit, t.bits.data(),
                     t.bits.size() * sizeof(uint64_t));
}

inline PrimeTable load_prime_table(const std::string& path) {
  detail::TableHeader h{};
  auto payload = detail::read_blob(path, TableKind::prime, h);
  PrimeTable t;
  t.limit = h.limit;
  t.bits.resize(payload.size() / sizeof(uint64_t));
  std::memcpy(t.bits.data(), payload.data(), payload.size());
  for (uint64_t n = 2; n <= t.limit; ++n)
    if (t.is_prime(n)) t.primes.push_back(n);
  return t;
}

inline void save_table(const MobiusTable& t, const std::string& path) {
  detail::write_blob(path, TableKind::mobius, 0, t.limit, t.mu.data(),
                     t.mu.size() * sizeof(int8_t));
}

inline MobiusTable load_mobius_table(const std::string& path) {
  detail::TableHeader h{};
  auto payload = detail::read_blob(path, TableKind::mobius, h);
  MobiusTable t;
  t.limit = h.limit;
  t.mu.resize(payload.size());
  std::memcpy(t.mu.data(), payload.data(), payload.size());
  return t;
}

inline void save_table(const MangoldtTable& t, const std::string& path) {
  detail::write_blob(path, TableKind::mangoldt, 0, t.limit, t.lam.data(),
                     t.lam.size() * sizeof(double));
}

inline MangoldtTable load_mangoldt_table(const std::string& path) {
  detail::TableHeader h{};
  auto payload = detail::read_blob(path, TableKind::mangoldt, h);
  MangoldtTable t;
  t.limit = h.limit;
  t.lam.resize(payload.size() / sizeof(double));
  std::memcpy(t.lam.data(), payload.data(), payload.size());
  return t;
}

inline void save_table(const DivisorTable& t, const std::string& path) {
  detail::write_blob(path, TableKind::divisor, t.order, t.limit, t.tau.data(),
                     t.tau.size() * sizeof(uint64_t));
}

inline DivisorTable load_divisor_table(const std::string& path) {
  detail::TableHeader h{};
  auto payload = detail::read_blob(path, TableKind::divisor, h);
  DivisorTable t;
  t.order = h.aux;
  t.limit = h.limit;
  t.tau.resize(payload.size() / sizeof(uint64_t));
  std::memcpy(t.tau.data(), payload.data(), payload.size());
  return t;
}

// Checksum of a serialized table file (header + payload digest as stored).
inline std::string table_file_checksum(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  Fnv1a64 sum;
  char buf[1 << 16];
  while (f.read(buf, sizeof buf) || f.gcount() > 0) {
    sum.update(buf, static_cast<std::size_t>(f.gcount()));
    if (!f) break;
  }
  return sum.hex();
}

}  // namespace sfprime
