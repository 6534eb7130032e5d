#include "lookdrift/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "lookdrift/errors.hpp"

namespace lookdrift {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

constexpr std::string_view kMagic = "LKDRCKPT";
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kF64 = 1, kU64 = 2, kText = 3;

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Cursor {
 public:
  explicit Cursor(std::string_view data) : data_(data) {}

  template <class T>
  T take(const char* what) {
    T v;
    std::memcpy(&v, take_bytes(sizeof(T), what).data(), sizeof(T));
    return v;
  }

  std::string_view take_bytes(std::size_t n, const std::string& what) {
    if (data_.size() - pos_ < n) throw CheckpointError("checkpoint truncated while reading " + what);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

void CheckpointWriter::header(const std::string& name, std::uint8_t type, std::uint64_t count) {
  if (name.empty() || name.size() > 0xFFFF) throw CheckpointError("bad record name");
  put<std::uint16_t>(body_, static_cast<std::uint16_t>(name.size()));
  body_ += name;
  put<std::uint8_t>(body_, type);
  put<std::uint64_t>(body_, count);
  ++records_;
}

void CheckpointWriter::add(const std::string& name, std::span<const double> values) {
  header(name, kF64, values.size());
  body_.append(reinterpret_cast<const char*>(values.data()), values.size_bytes());
}

void CheckpointWriter::add(const std::string& name, std::span<const std::uint64_t> values) {
  header(name, kU64, values.size());
  body_.append(reinterpret_cast<const char*>(values.data()), values.size_bytes());
}

void CheckpointWriter::add_text(const std::string& name, std::string_view text) {
  header(name, kText, text.size());
  body_ += text;
}

std::string CheckpointWriter::bytes() const {
  std::string out(kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, records_);
  out += body_;
  put<std::uint64_t>(out, fnv1a(out));
  return out;
}

CheckpointReader::CheckpointReader(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 16 || bytes.substr(0, kMagic.size()) != kMagic) {
    throw CheckpointError("not a checkpoint file (bad magic)");
  }
  const std::string_view content = bytes.substr(0, bytes.size() - 8);
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + content.size(), 8);
  if (stored != fnv1a(content)) throw CheckpointError("checkpoint hash mismatch (corrupt file)");

  Cursor cur(content.substr(kMagic.size()));
  const auto version = cur.take<std::uint32_t>("version");
  if (version != kVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto count = cur.take<std::uint32_t>("record count");
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = cur.take<std::uint16_t>("record name length");
    const std::string name(cur.take_bytes(name_len, "record name"));
    Record r;
    r.type = cur.take<std::uint8_t>(name.c_str());
    r.count = cur.take<std::uint64_t>(name.c_str());
    std::uint64_t width = 1;
    if (r.type == kF64 || r.type == kU64) {
      width = 8;
    } else if (r.type != kText) {
      throw CheckpointError("field '" + name + "': unknown record type");
    }
    if (r.count > content.size() / width) throw CheckpointError("field '" + name + "': bad length");
    r.payload = std::string(cur.take_bytes(r.count * width, "field '" + name + "'"));
    records_.emplace(name, std::move(r));
  }
  if (!cur.done()) throw CheckpointError("trailing bytes after last record");
}

const CheckpointReader::Record& CheckpointReader::get(const std::string& name,
                                                      std::uint8_t type) const {
  const auto it = records_.find(name);
  if (it == records_.end()) throw CheckpointError("field '" + name + "': missing");
  if (it->second.type != type) throw CheckpointError("field '" + name + "': wrong type");
  return it->second;
}

std::vector<double> CheckpointReader::f64(const std::string& name) const {
  const Record& r = get(name, kF64);
  std::vector<double> out(r.count);
  std::memcpy(out.data(), r.payload.data(), r.payload.size());
  return out;
}

std::vector<std::uint64_t> CheckpointReader::u64(const std::string& name) const {
  const Record& r = get(name, kU64);
  std::vector<std::uint64_t> out(r.count);
  std::memcpy(out.data(), r.payload.data(), r.payload.size());
  return out;
}

std::string CheckpointReader::text(const std::string& name) const {
  return get(name, kText).payload;
}

}  // namespace lookdrift
