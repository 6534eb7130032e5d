#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lookdrift {

/// Tagged binary container used for checkpoints.
///
/// Layout (little-endian):
///   "LKDRCKPT"  u32 version  u32 record_count
///   record*:    u16 name_len  name  u8 type  u64 count  payload
///               type 1 = f64[count], 2 = u64[count], 3 = utf-8 text (count bytes)
///   u64 FNV-1a hash of every preceding byte
///
/// Doubles are stored as raw IEEE-754 bits, so a save/load round trip is exact.
class CheckpointWriter {
 public:
  void add(const std::string& name, std::span<const double> values);
  void add(const std::string& name, std::span<const std::uint64_t> values);
  void add_text(const std::string& name, std::string_view text);

  std::string bytes() const;

 private:
  void header(const std::string& name, std::uint8_t type, std::uint64_t count);

  std::string body_;
  std::uint32_t records_ = 0;
};

class CheckpointReader {
 public:
  /// Validates magic, version, structure and hash. Throws CheckpointError.
  explicit CheckpointReader(std::string_view bytes);

  std::vector<double> f64(const std::string& name) const;
  std::vector<std::uint64_t> u64(const std::string& name) const;
  std::string text(const std::string& name) const;
  bool has(const std::string& name) const { return records_.contains(name); }

 private:
  struct Record {
    std::uint8_t type;
    std::uint64_t count;
    std::string payload;
  };
  const Record& get(const std::string& name, std::uint8_t type) const;

  std::map<std::string, Record> records_;
};

}  // namespace lookdrift
