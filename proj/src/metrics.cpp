#include "brsim/metrics.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace brsim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Moments {
  double mean = kNaN;
  double sd = kNaN;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) {
    m.sd = 0.0;
    return m;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return m;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

double parse_number(const std::string& s) {
  if (s == "nan") return kNaN;
  return std::stod(s);
}

}  // namespace

std::string_view to_string(PacketStatus status) {
  switch (status) {
    case PacketStatus::Pending: return "pending";
    case PacketStatus::Delivered: return "delivered";
    case PacketStatus::Dropped: return "dropped";
  }
  return "?";
}

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::None: return "none";
    case DropReason::RetryLimit: return "retry-limit";
    case DropReason::ChannelAccess: return "channel-access";
    case DropReason::HopCap: return "hop-cap";
    case DropReason::Horizon: return "horizon";
  }
  return "?";
}

std::size_t RunMetrics::delivered() const {
  std::size_t n = 0;
  for (const auto& p : packets) n += p.status == PacketStatus::Delivered ? 1 : 0;
  return n;
}

std::size_t RunMetrics::dropped() const {
  std::size_t n = 0;
  for (const auto& p : packets) n += p.status == PacketStatus::Dropped ? 1 : 0;
  return n;
}

double RunMetrics::mean_hops() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& p : packets) {
    if (p.status != PacketStatus::Delivered) continue;
    sum += p.hops;
    ++n;
  }
  return n == 0 ? kNaN : sum / static_cast<double>(n);
}

double RunMetrics::mean_per_hop_distance() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& h : hops) {
    if (!h.success) continue;
    sum += h.distance_m;
    ++n;
  }
  return n == 0 ? kNaN : sum / static_cast<double>(n);
}

double RunMetrics::delivery_ratio() const {
  if (packets.empty()) return kNaN;
  return static_cast<double>(delivered()) / static_cast<double>(packets.size());
}

std::vector<AggregateRow> summarize(std::span<const RunMetrics> runs) {
  if (runs.empty()) throw EmptyInput("summarize needs at least one run");

  struct Group {
    std::vector<double> hops, distance, ratio;
    std::size_t runs = 0;
  };
  std::vector<std::pair<std::string, std::size_t>> order;
  std::map<std::pair<std::string, std::size_t>, Group> groups;
  for (const auto& r : runs) {
    auto key = std::make_pair(r.protocol, r.node_count);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    Group& g = it->second;
    ++g.runs;
    if (double v = r.mean_hops(); !std::isnan(v)) g.hops.push_back(v);
    if (double v = r.mean_per_hop_distance(); !std::isnan(v)) g.distance.push_back(v);
    if (double v = r.delivery_ratio(); !std::isnan(v)) g.ratio.push_back(v);
  }

  std::vector<AggregateRow> rows;
  for (const auto& key : order) {
    const Group& g = groups.at(key);
    const Moments h = moments(g.hops);
    const Moments d = moments(g.distance);
    const Moments q = moments(g.ratio);
    rows.push_back(AggregateRow{key.first, key.second, g.runs, h.mean, h.sd, d.mean, d.sd, q.mean, q.sd});
  }
  return rows;
}

void write_csv(std::span<const AggregateRow> rows, std::ostream& out) {
  out << kCsvHeader << "\r\n";
  for (const auto& r : rows) {
    out << csv_field(r.protocol) << ',' << r.node_count << ',' << r.seed_count << ','
        << number(r.mean_hops) << ',' << number(r.sd_hops) << ',' << number(r.mean_perhop_distance_m)
        << ',' << number(r.sd_perhop_distance_m) << ',' << number(r.delivery_ratio) << "\r\n";
  }
}

void write_csv(std::span<const AggregateRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(rows, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<AggregateRow> read_csv(std::istream& in) {
  std::vector<AggregateRow> rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::runtime_error("unexpected CSV header: " + line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) throw std::runtime_error("malformed CSV row: " + line);
    AggregateRow r;
    r.protocol = f[0];
    r.node_count = std::stoul(f[1]);
    r.seed_count = std::stoul(f[2]);
    r.mean_hops = parse_number(f[3]);
    r.sd_hops = parse_number(f[4]);
    r.mean_perhop_distance_m = parse_number(f[5]);
    r.sd_perhop_distance_m = parse_number(f[6]);
    r.delivery_ratio = parse_number(f[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_hop_trace(const RunMetrics& metrics, std::ostream& out) {
  out << "#uid\tfrom\tto\ttime_ms\tdistance_m\tsuccess\tattempts\thop_count\n";
  for (const auto& h : metrics.hops) {
    out << h.packet_uid << '\t' << h.from.value << '\t' << h.to.value << '\t' << h.time.count() << '\t'
        << std::fixed << std::setprecision(3) << h.distance_m << '\t' << (h.success ? 1 : 0) << '\t'
        << h.attempts << '\t' << h.hop_count << '\n';
  }
}

void write_route_trace(const RunMetrics& metrics, std::ostream& out) {
  out << "#uid\tsource\tstatus\treason\thops\tgenerated_ms\tfinished_ms\troute\n";
  for (const auto& p : metrics.packets) {
    out << p.uid << '\t' << p.source.value << '\t' << to_string(p.status) << '\t' << to_string(p.reason)
        << '\t' << p.hops << '\t' << p.generated.count() << '\t' << p.finished.count() << '\t';
    for (std::size_t i = 0; i < p.route.size(); ++i) {
      if (i > 0) out << '-';
      out << p.route[i].value;
    }
    out << '\n';
  }
}

}  // namespace brsim
