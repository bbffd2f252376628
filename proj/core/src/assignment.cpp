#include "pilotreuse/assignment.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <stdexcept>

namespace pilotreuse {
namespace {

void require_shape(int cells, int users) {
  depth_count_for(cells);
  if (users < 1) throw std::invalid_argument("K must be at least 1");
}

void require_length(const PilotAssignment& p) {
  require_shape(p.cells, p.users);
  if (p.depth_count() != depth_count_for(p.cells))
    throw std::invalid_argument("assignment vector has length " +
                                std::to_string(p.p.size()) + ", expected " +
                                std::to_string(depth_count_for(p.cells)));
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > UINT64_MAX - b ? UINT64_MAX : a + b;
}

}  // namespace

int depth_count_for(int cells) {
  const int m = log3_exact(cells);
  if (m < 2)
    throw std::invalid_argument("L = " + std::to_string(cells) +
                                " is not a power of 3 with at least 9 cells");
  return m;
}

bool is_valid(const PilotAssignment& p) {
  require_length(p);
  const int m = p.depth_count();
  // sum p_i 3^{-i} = K, scaled by 3^{m-1}.
  std::int64_t weighted = 0;
  for (int i = 0; i < m; ++i) {
    if (p.p[i] < 0 || p.p[i] > p.users * pow3(i)) return false;
    weighted += p.p[i] * pow3(m - 1 - i);
  }
  return weighted == p.users * pow3(m - 1);
}

std::int64_t pilot_length(const PilotAssignment& p) {
  std::int64_t n = 0;
  for (std::int64_t x : p.p) n += x;
  return n;
}

TransitionVector to_transition(const PilotAssignment& p) {
  if (!is_valid(p)) throw std::invalid_argument("invalid assignment " + format_vector(p.p));
  const int m = p.depth_count();
  TransitionVector t;
  t.t.resize(m - 1);
  t.t[0] = p.users - p.p[0];
  for (int i = 1; i < m - 1; ++i) t.t[i] = 3 * t.t[i - 1] - p.p[i];
  return t;
}

PilotAssignment from_transition(const TransitionVector& t, int cells, int users) {
  require_shape(cells, users);
  const int m = depth_count_for(cells);
  if (static_cast<int>(t.t.size()) != m - 1)
    throw std::invalid_argument("transition vector has length " +
                                std::to_string(t.t.size()) + ", expected " +
                                std::to_string(m - 1));
  PilotAssignment p{cells, users, std::vector<std::int64_t>(m)};
  p.p[0] = users - t.t[0];
  for (int i = 1; i < m - 1; ++i) p.p[i] = 3 * t.t[i - 1] - t.t[i];
  p.p[m - 1] = 3 * t.t[m - 2];
  for (int i = 0; i < m; ++i) {
    if (p.p[i] < 0 || (i < m - 1 && t.t[i] < 0))
      throw std::invalid_argument("transition vector " + format_vector(t.t) +
                                  " is not a feasible partition sequence");
  }
  return p;
}

PilotAssignment full_reuse(int cells, int users) {
  require_shape(cells, users);
  PilotAssignment p{cells, users, std::vector<std::int64_t>(depth_count_for(cells), 0)};
  p.p[0] = users;
  return p;
}

std::string format_vector(const std::vector<std::int64_t>& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(p[i]);
  }
  return out;
}

std::vector<std::int64_t> parse_vector(const std::string& text) {
  std::vector<std::int64_t> out;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first == last) throw std::invalid_argument("empty assignment vector");
  for (;;) {
    std::int64_t value = 0;
    // Entries are non-negative, so a sign here means an empty field.
    if (*first == '-') throw std::invalid_argument("malformed assignment vector '" + text + "'");
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first)
      throw std::invalid_argument("malformed assignment vector '" + text + "'");
    out.push_back(value);
    if (ptr == last) break;
    if (*ptr != '-' || ptr + 1 == last)
      throw std::invalid_argument("malformed assignment vector '" + text + "'");
    first = ptr + 1;
  }
  return out;
}

AssignmentEnumerator::AssignmentEnumerator(int cells, int users,
                                           std::optional<std::int64_t> filter)
    : cells_(cells), users_(users) {
  require_shape(cells, users);
  m_ = depth_count_for(cells);
  if (filter) {
    if (!is_valid_pilot_length(cells, users, *filter)) {
      warning_ = true;
      done_ = true;
      return;
    }
    target_ = (*filter - users) / 2;
  }
  t_.assign(m_ - 1, 0);
  prefix_.assign(m_, 0);
}

PilotAssignment AssignmentEnumerator::current() const {
  return from_transition(TransitionVector{t_}, cells_, users_);
}

// Fills positions from..end with the largest feasible values. Descending t in
// lexicographic order is ascending p.
bool AssignmentEnumerator::descend(std::size_t from) {
  const std::size_t n = t_.size();
  for (std::size_t k = from; k < n; ++k) {
    std::int64_t hi = k == 0 ? users_ : 3 * t_[k - 1];
    std::int64_t lo = 0;
    if (target_) {
      const std::int64_t remaining = *target_ - prefix_[k];
      // Largest total that positions k.. can contribute per unit of t_k.
      const std::int64_t weight = (pow3(static_cast<int>(n - k)) - 1) / 2;
      hi = std::min(hi, remaining);
      lo = (remaining + weight - 1) / weight;
    }
    if (hi < lo) return false;
    t_[k] = hi;
    if (k + 1 < prefix_.size()) prefix_[k + 1] = prefix_[k] + t_[k];
  }
  return true;
}

bool AssignmentEnumerator::advance() {
  const std::size_t n = t_.size();
  for (std::size_t k = n; k-- > 0;) {
    std::int64_t lo = 0;
    if (target_) {
      const std::int64_t weight = (pow3(static_cast<int>(n - k)) - 1) / 2;
      lo = (*target_ - prefix_[k] + weight - 1) / weight;
    }
    while (t_[k] > lo) {
      --t_[k];
      if (k + 1 < prefix_.size()) prefix_[k + 1] = prefix_[k] + t_[k];
      if (descend(k + 1)) return true;
    }
  }
  return false;
}

std::optional<PilotAssignment> AssignmentEnumerator::next() {
  if (done_) return std::nullopt;
  const bool ok = started_ ? advance() : descend(0);
  started_ = true;
  if (!ok) {
    done_ = true;
    return std::nullopt;
  }
  return current();
}

AssignmentEnumerator enumerate_assignments(int cells, int users,
                                           std::optional<std::int64_t> filter) {
  return AssignmentEnumerator(cells, users, filter);
}

std::uint64_t assignment_count(int cells, int users,
                               std::optional<std::int64_t> filter) {
  require_shape(cells, users);
  const int m = depth_count_for(cells);
  if (filter) {
    std::uint64_t count = 0;
    auto e = enumerate_assignments(cells, users, filter);
    while (e.next()) count = sat_add(count, 1);
    return count;
  }
  // g[x] = completions of positions k+1.. given t_k = x, built from the back.
  const std::int64_t widest = users * pow3(m - 2);
  if (widest > 100'000'000) return UINT64_MAX;
  std::vector<std::uint64_t> g(static_cast<std::size_t>(widest) + 1, 1);
  for (int k = m - 3; k >= 0; --k) {
    std::vector<std::uint64_t> prefix(g.size() + 1, 0);
    for (std::size_t y = 0; y < g.size(); ++y) prefix[y + 1] = sat_add(prefix[y], g[y]);
    const std::int64_t width = users * pow3(k);
    std::vector<std::uint64_t> next(static_cast<std::size_t>(width) + 1);
    for (std::int64_t x = 0; x <= width; ++x) next[x] = prefix[3 * x + 1];
    g = std::move(next);
  }
  std::uint64_t total = 0;
  for (std::int64_t x = 0; x <= users; ++x) total = sat_add(total, g[x]);
  return total;
}

bool is_valid_pilot_length(int cells, int users, std::int64_t n) {
  require_shape(cells, users);
  const std::int64_t top = static_cast<std::int64_t>(cells) * users / 3;
  return n >= users && n <= top && (n - users) % 2 == 0;
}

std::vector<std::int64_t> valid_pilot_lengths(int cells, int users) {
  require_shape(cells, users);
  std::vector<std::int64_t> out;
  const std::int64_t top = static_cast<std::int64_t>(cells) * users / 3;
  for (std::int64_t n = users; n <= top; n += 2) out.push_back(n);
  return out;
}

int chi(std::int64_t pilot_length, int users) {
  if (users < 1) throw std::invalid_argument("K must be at least 1");
  if (pilot_length < users || (pilot_length - users) % 2 != 0)
    throw std::invalid_argument("pilot length " + std::to_string(pilot_length) +
                                " has the wrong parity or is below K");
  const std::int64_t acts = (pilot_length - users) / 2;
  int k = 0;
  std::int64_t covered = users;
  while (covered <= acts) {
    ++k;
    covered += users * pow3(k);
  }
  return k;
}

PilotRealization realize(const PilotAssignment& p, const HexLattice& lattice) {
  if (!is_valid(p)) throw std::invalid_argument("invalid assignment " + format_vector(p.p));
  if (lattice.cell_count() != p.cells)
    throw std::invalid_argument("lattice has " + std::to_string(lattice.cell_count()) +
                                " cells, assignment expects " + std::to_string(p.cells));
  const int m = p.depth_count();
  PilotRealization out;
  out.cells = p.cells;
  out.users = p.users;
  out.pilot_count = pilot_length(p);

  std::vector<PilotLeaf> open;
  for (int k = 0; k < p.users; ++k) open.push_back({k, {0, 0}});
  for (int depth = 0; depth < m; ++depth) {
    const auto leaves = static_cast<std::size_t>(p.p[depth]);
    out.leaves.insert(out.leaves.end(), open.begin(), open.begin() + leaves);
    std::vector<PilotLeaf> children;
    for (std::size_t n = leaves; n < open.size(); ++n) {
      const PilotLeaf& node = open[n];
      for (int j = 0; j < 3; ++j) {
        const std::int64_t index =
            depth == 0 ? (node.tree + j) % 3 : node.coset.index * 3 + j;
        children.push_back({node.tree, {depth + 1, index}});
      }
    }
    open = std::move(children);
  }

  const auto& cells = lattice.cells();
  out.pilot_of.assign(cells.size() * p.users, -1);
  for (std::size_t id = 0; id < out.leaves.size(); ++id) {
    const PilotLeaf& leaf = out.leaves[id];
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (lattice.coset_of(cells[c], leaf.coset.depth) == leaf.coset)
        out.pilot_of[c * p.users + leaf.tree] = static_cast<std::int32_t>(id);
    }
  }
  return out;
}

}  // namespace pilotreuse
