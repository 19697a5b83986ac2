#include "exosc/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "exosc/error.hpp"

namespace exosc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Json opt_num(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? Json(*v) : Json(nullptr);
}

std::optional<double> opt_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

double parse_number(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) throw Error(Errc::DomainError, "empty number");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
    throw Error(Errc::DomainError, "not a finite number: '" + s + "'");
  return v;
}

std::vector<double> parse_grid(const std::string& spec) {
  if (spec.find(':') == std::string::npos) return {parse_number(spec)};
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw Error(Errc::DomainError, "grid must be lo:hi:n, got '" + spec + "'");
  const double lo = parse_number(parts[0]), hi = parse_number(parts[1]);
  const double nd = parse_number(parts[2]);
  if (nd < 1.0 || nd != std::floor(nd) || nd > 1e6)
    throw Error(Errc::DomainError, "grid count must be a positive integer, got '" + parts[2] + "'");
  const auto n = static_cast<std::size_t>(nd);
  if (n == 1) return {lo};
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  v.back() = hi;
  return v;
}

std::vector<double> parse_list(const std::string& spec) {
  std::vector<double> v;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ',');) v.push_back(parse_number(p));
  if (v.empty()) throw Error(Errc::EmptyInput, "empty list");
  return v;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::stringstream ss(text);
  int lineno = 0;
  for (std::string line; std::getline(ss, line);) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::DomainError, "config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty()) throw Error(Errc::DomainError, "config line " + std::to_string(lineno) + ": empty key");
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

std::vector<std::string> merge_config(const std::vector<std::string>& args,
                                      const std::vector<std::pair<std::string, std::string>>& cfg) {
  std::set<std::string> given;
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  std::vector<std::string> out = args;
  for (const auto& [k, v] : cfg) {
    if (given.count(k)) continue;
    out.push_back("--" + k);
    out.push_back(v);
  }
  return out;
}

unsigned env_threads() {
  if (const char* s = std::getenv("EXOSC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Json to_json(const SweepResultRow& r) {
  Json v = Json::object();
  for (const auto& [k, x] : r.values) v[k] = x;
  return {{"index", r.index},
          {"values", v},
          {"classification", r.classification},
          {"fixed_point_x", opt_num(r.fixed_point_x)},
          {"period", opt_num(r.period)},
          {"hausdorff", opt_num(r.hausdorff)},
          {"floquet", opt_num(r.floquet)},
          {"error", r.error}};
}

SweepResultRow sweep_row_from_json(const Json& j) {
  try {
    SweepResultRow r;
    r.index = j.at("index").get<std::size_t>();
    for (const auto& [k, x] : j.at("values").items()) r.values[k] = x.get<double>();
    r.classification = j.at("classification").get<std::string>();
    r.fixed_point_x = opt_from(j, "fixed_point_x");
    r.period = opt_from(j, "period");
    r.hausdorff = opt_from(j, "hausdorff");
    r.floquet = opt_from(j, "floquet");
    r.error = j.at("error").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::DomainError, std::string("bad sweep row: ") + e.what());
  }
}

std::vector<SweepPoint> sweep_grid(const std::vector<SweepAxis>& axes) {
  std::size_t total = 1;
  for (const auto& a : axes) {
    if (a.values.empty()) throw Error(Errc::EmptyInput, "axis '" + a.name + "' has no values");
    total *= a.values.size();
  }
  std::vector<SweepPoint> pts(total);
  for (std::size_t i = 0; i < total; ++i) {
    pts[i].index = i;
    std::size_t rem = i;
    for (std::size_t k = axes.size(); k-- > 0;) {
      pts[i].values[axes[k].name] = axes[k].values[rem % axes[k].values.size()];
      rem /= axes[k].values.size();
    }
  }
  return pts;
}

std::string sweep_signature(const std::vector<SweepAxis>& axes, const std::string& extra) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (const auto& a : axes) {
    os << a.name << '=';
    for (double v : a.values) os << v << ',';
    os << ';';
  }
  os << extra;
  return os.str();
}

SweepOutcome run_sweep(const std::vector<SweepAxis>& axes, const std::string& signature, const SweepFn& fn,
                       const std::string& journal_path, unsigned threads) {
  const auto pts = sweep_grid(axes);
  SweepOutcome out;
  std::vector<std::optional<SweepResultRow>> done(pts.size());

  std::ofstream journal;
  if (!journal_path.empty()) {
    bool have_header = false;
    {
      std::ifstream in(journal_path);
      std::string line;
      if (in && std::getline(in, line) && !line.empty()) {
        const Json h = Json::parse(line, nullptr, false);
        if (h.is_discarded() || !h.contains("signature") || h.at("signature") != signature)
          throw Error(Errc::DomainError, "journal '" + journal_path + "' belongs to a different sweep");
        have_header = true;
        while (std::getline(in, line)) {
          const Json j = Json::parse(line, nullptr, false);
          if (j.is_discarded()) continue;  // torn last line of an interrupted run
          SweepResultRow r = sweep_row_from_json(j);
          if (r.index < done.size() && !done[r.index]) {
            done[r.index] = std::move(r);
            ++out.resumed;
          }
        }
      }
    }
    bool needs_newline = false;
    if (std::ifstream tail(journal_path, std::ios::binary | std::ios::ate); tail && tail.tellg() > 0) {
      tail.seekg(-1, std::ios::end);
      needs_newline = tail.get() != '\n';
    }
    journal.open(journal_path, std::ios::app);
    if (!journal) throw Error(Errc::DomainError, "cannot open journal '" + journal_path + "'");
    if (needs_newline) journal << '\n';
    if (!have_header) journal << Json{{"signature", signature}}.dump() << '\n' << std::flush;
  }

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (!done[i]) todo.push_back(i);

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < todo.size();) {
      const SweepPoint& p = pts[todo[k]];
      SweepResultRow r;
      try {
        r = fn(p);
      } catch (const std::exception& e) {
        r = SweepResultRow{};
        r.classification = "Error";
        r.error = e.what();
      }
      r.index = p.index;
      r.values = p.values;
      std::lock_guard<std::mutex> lk(mu);
      if (journal.is_open()) journal << to_json(r).dump() << '\n' << std::flush;
      done[p.index] = std::move(r);
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, todo.size()))));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (auto& r : done) {
    if (!r->error.empty()) ++out.failed;
    out.rows.push_back(std::move(*r));
  }
  return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepAxis>& axes, const std::vector<SweepResultRow>& rows) {
  const auto old = os.precision(17);
  os << "index";
  for (const auto& a : axes) os << ',' << a.name;
  os << ",classification,fixed_point_x,period,hausdorff,floquet,error\n";
  auto opt = [&](const std::optional<double>& v) {
    os << ',';
    if (v) os << *v;
  };
  for (const auto& r : rows) {
    os << r.index;
    for (const auto& a : axes) os << ',' << r.values.at(a.name);
    os << ',' << r.classification;
    opt(r.fixed_point_x);
    opt(r.period);
    opt(r.hausdorff);
    opt(r.floquet);
    os << ',';
    if (!r.error.empty()) {
      std::string e = r.error;
      std::replace(e.begin(), e.end(), '"', '\'');
      os << '"' << e << '"';
    }
    os << '\n';
  }
  os.precision(old);
}

}  // namespace exosc
