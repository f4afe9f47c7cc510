#include "dynkc/stream.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace dynkc {

namespace {

std::vector<std::string_view> split_single_spaces(std::string_view line, std::size_t lineno) {
  std::vector<std::string_view> toks;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t sp = line.find(' ', start);
    std::string_view tok =
        sp == std::string_view::npos ? line.substr(start) : line.substr(start, sp - start);
    if (tok.empty()) throw ParseError("empty token (double or trailing space?)", lineno);
    toks.push_back(tok);
    if (sp == std::string_view::npos) break;
    start = sp + 1;
  }
  return toks;
}

std::uint64_t parse_id(std::string_view tok, std::size_t lineno) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("bad id '" + std::string(tok) + "'", lineno);
  return v;
}

double parse_real(std::string_view tok, std::size_t lineno) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw ParseError("bad real '" + std::string(tok) + "'", lineno);
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  DYNKC_CHECK(ec == std::errc(), "to_chars failed");
  return std::string(buf, ptr);
}

Stream parse_stream(std::string_view text) {
  Stream s;
  std::unordered_set<PointId> live;
  bool saw_event = false;
  bool have_insert = false;
  PointId max_insert_id = 0;
  std::size_t inferred_dim = 0;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line =
        nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (line.empty()) {
      if (nl == std::string_view::npos) break;  // trailing newline
      throw ParseError("empty line", lineno);
    }
    if (line[0] == '#') {
      if (saw_event) throw ParseError("header after events", lineno);
      auto toks = split_single_spaces(line, lineno);
      if (toks[0] == "#dim") {
        if (toks.size() != 2 || !s.matrix_path.empty() || s.dim != 0)
          throw ParseError("bad or duplicate #dim header", lineno);
        s.dim = parse_id(toks[1], lineno);
        if (s.dim == 0) throw ParseError("#dim must be positive", lineno);
      } else if (toks[0] == "#matrix") {
        if (toks.size() != 2 || s.dim != 0 || !s.matrix_path.empty())
          throw ParseError("bad or duplicate #matrix header", lineno);
        s.matrix_path = std::string(toks[1]);
      } else {
        throw ParseError("unknown header '" + std::string(toks[0]) + "'", lineno);
      }
      continue;
    }
    saw_event = true;
    auto toks = split_single_spaces(line, lineno);
    if (toks[0] == "+") {
      if (toks.size() < 2) throw ParseError("insertion needs an id", lineno);
      UpdateEvent ev{UpdateEvent::Kind::kInsert, parse_id(toks[1], lineno), {}};
      if (have_insert && ev.id <= max_insert_id)
        throw ParseError("insertion ids must be strictly increasing", lineno);
      if (s.matrix_mode()) {
        if (toks.size() != 2) throw ParseError("matrix-mode insertions take no coordinates", lineno);
      } else {
        if (toks.size() == 2) throw ParseError("euclidean insertion needs coordinates", lineno);
        for (std::size_t i = 2; i < toks.size(); ++i)
          ev.coords.push_back(parse_real(toks[i], lineno));
        std::size_t expect = s.dim != 0 ? s.dim : inferred_dim;
        if (expect != 0 && ev.coords.size() != expect)
          throw ParseError("coordinate count does not match earlier insertions", lineno);
        inferred_dim = ev.coords.size();
      }
      have_insert = true;
      max_insert_id = ev.id;
      live.insert(ev.id);
      s.events.push_back(std::move(ev));
    } else if (toks[0] == "-") {
      if (toks.size() != 2) throw ParseError("deletion takes exactly an id", lineno);
      PointId id = parse_id(toks[1], lineno);
      if (!live.count(id)) throw ParseError("deletion of a point that is not live", lineno);
      live.erase(id);
      s.events.push_back(UpdateEvent{UpdateEvent::Kind::kDelete, id, {}});
    } else {
      throw ParseError("unknown event '" + std::string(toks[0]) + "'", lineno);
    }
    if (nl == std::string_view::npos) break;
  }
  return s;
}

std::string serialize_stream(const Stream& s) {
  std::string out;
  if (s.dim != 0) out += "#dim " + std::to_string(s.dim) + "\n";
  if (!s.matrix_path.empty()) out += "#matrix " + s.matrix_path + "\n";
  for (const auto& ev : s.events) {
    out += ev.kind == UpdateEvent::Kind::kInsert ? "+ " : "- ";
    out += std::to_string(ev.id);
    for (double c : ev.coords) {
      out += ' ';
      out += format_double(c);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::vector<double>> parse_matrix(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::size_t n = 0;
  if (!(in >> n) || n == 0) throw ValidationError("matrix file must start with a positive size");
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(in >> m[i][j])) throw ValidationError("matrix file is truncated");
  double extra;
  if (in >> extra) throw ValidationError("matrix file has trailing data");
  return m;
}

StreamGenerator::StreamGenerator(const GeneratorConfig& cfg)
    : cfg_(cfg), rng_(derive_seed(cfg.seed, 0xdcba)) {
  if (cfg_.dim == 0) throw ValidationError("generator dimension must be positive");
  if (!(cfg_.delete_fraction >= 0.0 && cfg_.delete_fraction <= 1.0))
    throw ValidationError("delete_fraction must be in [0,1]");
  for (std::size_t i = 0; i < cfg_.n_init; ++i) initial_.push_back(make_insert_uniform());
  if (cfg_.kind == GeneratorKind::kChurn) {
    // churn measures placement against the running diameter of the live set
    for (std::size_t a = 0; a < live_.size(); ++a)
      for (std::size_t b = a + 1; b < live_.size(); ++b) {
        double s = 0.0;
        for (std::size_t d = 0; d < cfg_.dim; ++d) {
          double v = coords_[live_[a]][d] - coords_[live_[b]][d];
          s += v * v;
        }
        diameter_ = std::max(diameter_, std::sqrt(s));
      }
  }
}

UpdateEvent StreamGenerator::make_insert_uniform() {
  std::vector<double> c(cfg_.dim);
  for (auto& v : c) v = uniform_real(rng_) * 100.0;
  PointId id = next_id_++;
  live_.push_back(id);
  if (coords_.size() <= id) coords_.resize(id + 1);
  coords_[id] = c;
  return UpdateEvent{UpdateEvent::Kind::kInsert, id, std::move(c)};
}

UpdateEvent StreamGenerator::make_delete(PointId id) {
  auto it = std::lower_bound(live_.begin(), live_.end(), id);
  DYNKC_CHECK(it != live_.end() && *it == id, "generator deleting a non-live point");
  live_.erase(it);
  return UpdateEvent{UpdateEvent::Kind::kDelete, id, {}};
}

UpdateEvent StreamGenerator::next(const SolutionView& solution) {
  ++step_;
  switch (cfg_.kind) {
    case GeneratorKind::kObliviousRandom: {
      bool del = !live_.empty() && uniform_real(rng_) < cfg_.delete_fraction;
      if (del) return make_delete(live_[uniform_index(rng_, live_.size())]);
      return make_insert_uniform();
    }
    case GeneratorKind::kAdaptiveDeleteCenter: {
      std::vector<PointId> sol = solution ? solution() : std::vector<PointId>{};
      for (PointId id : sol) {
        if (first_seen_.size() <= id) first_seen_.resize(id + 1, -1);
        if (first_seen_[id] < 0) first_seen_[id] = seen_serial_++;
      }
      bool del = uniform_real(rng_) < cfg_.delete_fraction;
      if (del) {
        // most recently first-appearing live solution member, ties to the
        // larger id, so fresh replacement centers get knocked out first
        std::optional<PointId> best;
        std::int64_t best_seen = -1;
        for (PointId id : sol) {
          if (!std::binary_search(live_.begin(), live_.end(), id)) continue;
          std::int64_t seen = first_seen_[id];
          if (seen > best_seen || (seen == best_seen && best && id > *best)) {
            best = id;
            best_seen = seen;
          }
        }
        if (best) return make_delete(*best);
      }
      return make_insert_uniform();
    }
    case GeneratorKind::kChurn: {
      if (churn_pending_delete_) {
        PointId id = *churn_pending_delete_;
        churn_pending_delete_.reset();
        diameter_ = diameter_stack_.back();
        diameter_stack_.pop_back();
        return make_delete(id);
      }
      DYNKC_CHECK(!live_.empty(), "churn needs a nonempty live set");
      PointId base = live_.front();
      std::size_t axis = churn_serial_++ % cfg_.dim;
      std::vector<double> c = coords_[base];
      c[axis] += 3.0 * diameter_ + 1.0;
      PointId id = next_id_++;
      diameter_stack_.push_back(diameter_);
      for (PointId q : live_) {
        double s = 0.0;
        for (std::size_t d = 0; d < cfg_.dim; ++d) {
          double v = c[d] - coords_[q][d];
          s += v * v;
        }
        diameter_ = std::max(diameter_, std::sqrt(s));
      }
      live_.push_back(id);  // ids are increasing, so live_ stays sorted
      if (coords_.size() <= id) coords_.resize(id + 1);
      coords_[id] = c;
      churn_pending_delete_ = id;
      return UpdateEvent{UpdateEvent::Kind::kInsert, id, std::move(c)};
    }
  }
  throw InternalError("unreachable generator kind");
}

}  // namespace dynkc
