#include "cli_support.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "stclt/error.hpp"

namespace stclt::cli {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(const std::string& data) : data_(data) {}

  bool done() const { return pos_ == data_.size(); }

  std::uint64_t raw(int bytes) {
    if (data_.size() - pos_ < static_cast<std::size_t>(bytes))
      throw Error("eigenvalue cache truncated at byte " + std::to_string(pos_));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += bytes;
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(raw(4)); }
  double f64() { return std::bit_cast<double>(raw(8)); }

 private:
  const std::string& data_;
  std::size_t pos_ = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

long to_long(const std::string& s) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("not an integer: '" + s + "'");
  }
  if (used != s.size()) throw InvalidArgument("not an integer: '" + s + "'");
  return v;
}

}  // namespace

std::vector<CacheRecord> read_cache(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return {};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open eigenvalue cache " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < sizeof kCacheMagic || std::memcmp(data.data(), kCacheMagic, sizeof kCacheMagic))
    throw Error(path.string() + " is not an STCLT v1 eigenvalue cache");
  const std::string body = data.substr(sizeof kCacheMagic);
  Reader r(body);
  std::vector<CacheRecord> out;
  while (!r.done()) {
    CacheRecord rec;
    rec.weight = r.u32();
    rec.prime = r.u32();
    const std::uint32_t count = r.u32();
    rec.values.resize(count);
    for (auto& v : rec.values) v = r.f64();
    rec.residual_max = r.f64();
    out.push_back(std::move(rec));
  }
  return out;
}

void write_cache(const std::filesystem::path& path, std::vector<CacheRecord> records) {
  std::sort(records.begin(), records.end(), [](const CacheRecord& a, const CacheRecord& b) {
    return std::tie(a.weight, a.prime) < std::tie(b.weight, b.prime);
  });
  std::string out(kCacheMagic, sizeof kCacheMagic);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (i > 0 && rec.weight == records[i - 1].weight && rec.prime == records[i - 1].prime)
      throw ConsistencyError("duplicate cache record for weight " + std::to_string(rec.weight) +
                             ", prime " + std::to_string(rec.prime));
    for (double v : rec.values)
      if (!(std::abs(v) <= 2 + kDeligneTolerance))
        throw ConsistencyError("cache value " + std::to_string(v) + " outside [-2, 2] at weight " +
                               std::to_string(rec.weight) + ", prime " +
                               std::to_string(rec.prime));
    put_u32(out, rec.weight);
    put_u32(out, rec.prime);
    put_u32(out, static_cast<std::uint32_t>(rec.values.size()));
    for (double v : rec.values) put_f64(out, v);
    put_f64(out, rec.residual_max);
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidArgument("cannot write eigenvalue cache " + tmp.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<CacheRecord> records_from_table(const EigenvalueTable& table) {
  std::vector<CacheRecord> out;
  for (std::size_t i = 0; i < table.primes.size(); ++i) {
    CacheRecord rec;
    rec.weight = static_cast<std::uint32_t>(table.weight);
    rec.prime = static_cast<std::uint32_t>(table.primes[i]);
    for (int f = 0; f < table.dim(); ++f) {
      rec.values.push_back(table.values[f][i]);
      rec.residual_max = std::max(rec.residual_max, table.residuals[f][i]);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::optional<EigenvalueTable> table_from_cache(const std::vector<CacheRecord>& records, int weight,
                                               long pmax) {
  std::map<int, const CacheRecord*> by_prime;
  for (const auto& r : records)
    if (static_cast<int>(r.weight) == weight) by_prime[static_cast<int>(r.prime)] = &r;
  EigenvalueTable t;
  t.weight = weight;
  const int d = dim_cusp_forms(weight);
  t.values.assign(d, {});
  t.residuals.assign(d, {});
  for (int p : primes_up_to(pmax)) {
    auto it = by_prime.find(p);
    if (it == by_prime.end()) return std::nullopt;
    if (static_cast<int>(it->second->values.size()) != d)
      throw ConsistencyError("cache record for weight " + std::to_string(weight) + ", prime " +
                             std::to_string(p) + " has the wrong number of forms");
    t.primes.push_back(p);
    for (int f = 0; f < d; ++f) {
      t.values[f].push_back(it->second->values[f]);
      t.residuals[f].push_back(it->second->residual_max);
    }
  }
  return t;
}

std::vector<int> parse_weights(const std::string& spec) {
  std::set<int> out;
  for (const auto& part : split(spec, ',')) {
    const auto r = split(part, ':');
    if (r.size() == 1) {
      out.insert(static_cast<int>(to_long(r[0])));
    } else if (r.size() == 2 || r.size() == 3) {
      const long a = to_long(r[0]), b = to_long(r[1]);
      const long step = r.size() == 3 ? to_long(r[2]) : 2;
      if (step <= 0 || a > b) throw InvalidArgument("bad weight range '" + part + "'");
      for (long k = a; k <= b; k += step) out.insert(static_cast<int>(k));
    } else {
      throw InvalidArgument("bad weight range '" + part + "'");
    }
  }
  for (int k : out)
    if (k < 2 || k % 2) throw InvalidArgument("weights must be even and >= 2, got " + std::to_string(k));
  return {out.begin(), out.end()};
}

std::vector<RealInterval> parse_intervals(const std::string& spec) {
  std::string s = spec;
  // "[a,b],[c,d]" -> "a:b;c:d"
  if (s.find('[') != std::string::npos) {
    std::string t;
    bool inside = false;
    for (char c : s) {
      if (c == '[') inside = true;
      else if (c == ']') { inside = false; t.push_back(';'); }
      else if (c == ',' && inside) t.push_back(':');
      else if (c == ',' && !inside) continue;
      else t.push_back(c);
    }
    s = t;
  }
  std::vector<RealInterval> out;
  for (const auto& part : split(s, ';')) {
    const auto ab = split(part, ':');
    if (ab.size() != 2) throw InvalidArgument("bad interval '" + part + "'");
    out.push_back(make_real_interval(to_double(ab[0]), to_double(ab[1])));
  }
  if (out.empty()) throw InvalidArgument("no intervals in '" + spec + "'");
  return out;
}

std::vector<int> parse_int_list(const std::string& spec) {
  std::vector<int> out;
  for (const auto& part : split(spec, ',')) out.push_back(static_cast<int>(to_long(part)));
  return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void apply_config(RunConfig& c, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "weights") c.weights = parse_weights(value);
    else if (key == "pmax") c.pmax = to_long(value);
    else if (key == "x") c.x = to_double(value);
    else if (key == "intervals") c.intervals = parse_intervals(value);
    else if (key == "M") c.M = static_cast<int>(to_long(value));
    else if (key == "M_list") c.M_list = parse_int_list(value);
    else if (key == "moment_max") c.moment_max = static_cast<int>(to_long(value));
    else if (key == "p") c.p = static_cast<int>(to_long(value));
    else if (key == "cache") c.cache = value;
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "threads") c.threads = static_cast<int>(to_long(value));
    else throw InvalidArgument("unknown config key '" + key + "'");
  }
}

void validate(const RunConfig& c) {
  if (!(c.x >= 2)) throw InvalidArgument("x must be >= 2");
  for (const auto& I : c.intervals)
    if (!(-2 <= I.a && I.a <= I.b && I.b <= 2))
      throw InvalidArgument("intervals must lie in [-2, 2]");
  if (c.threads < 1) throw InvalidArgument("threads must be >= 1");
  if (c.moment_max < 1) throw InvalidArgument("moment_max must be >= 1");
  if (c.M && *c.M < 3) throw InvalidArgument("M must be >= 3");
}

}  // namespace stclt::cli
