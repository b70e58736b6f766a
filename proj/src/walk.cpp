#include "wsaw/walk.hpp"

#include <stdexcept>
#include <unordered_map>

namespace wsaw {

Walk::Walk(int dim, std::vector<std::uint8_t> steps, int torus_r)
    : dim_(dim), torus_r_(torus_r), steps_(std::move(steps)) {
  if (dim_ < 1) throw std::invalid_argument("walk dimension must be >= 1");
  if (torus_r_ != 0 && torus_r_ < 3)
    throw std::invalid_argument("torus side r must be >= 3");
  for (std::uint8_t s : steps_)
    if (s >= 2 * dim_) throw std::invalid_argument("step code out of range");
}

Walk Walk::from_positions(const std::vector<Point>& positions, int torus_r) {
  if (positions.empty()) throw std::invalid_argument("need at least the origin");
  const int d = static_cast<int>(positions.front().size());
  for (Coord c : positions.front())
    if (c != 0) throw std::invalid_argument("walks start at the origin");
  std::vector<std::uint8_t> steps;
  steps.reserve(positions.size() - 1);
  for (std::size_t k = 1; k < positions.size(); ++k) {
    if (static_cast<int>(positions[k].size()) != d)
      throw std::invalid_argument("inconsistent dimension");
    int axis = -1, sign = 0;
    for (int i = 0; i < d; ++i) {
      Coord diff = positions[k][i] - positions[k - 1][i];
      if (torus_r > 0) diff = torus_rep(diff, torus_r);
      if (diff == 0) continue;
      if (axis >= 0 || (diff != 1 && diff != -1))
        throw std::invalid_argument("positions are not a nearest-neighbour walk");
      axis = i;
      sign = diff;
    }
    if (axis < 0) throw std::invalid_argument("zero step in position sequence");
    steps.push_back(static_cast<std::uint8_t>(2 * axis + (sign < 0 ? 1 : 0)));
  }
  return Walk(d, std::move(steps), torus_r);
}

Point Walk::position(int k) const {
  Point p = lifted_position(k);
  if (torus()) return torus_rep(p, torus_r_);
  return p;
}

std::vector<Point> Walk::positions() const {
  std::vector<Point> out;
  out.reserve(steps_.size() + 1);
  Point p(dim_, 0);
  out.push_back(torus() ? torus_rep(p, torus_r_) : p);
  for (std::uint8_t s : steps_) {
    p[step_axis(s)] += step_sign(s);
    out.push_back(torus() ? torus_rep(p, torus_r_) : p);
  }
  return out;
}

Point Walk::lifted_position(int k) const {
  if (k < 0 || k > length()) throw std::out_of_range("time index out of range");
  Point p(dim_, 0);
  for (int i = 0; i < k; ++i) p[step_axis(steps_[i])] += step_sign(steps_[i]);
  return p;
}

Walk lift_walk(const Walk& w) {
  if (!w.torus())
    throw std::invalid_argument("lift_walk expects a torus walk");
  return Walk(w.dim(), w.steps(), 0);
}

Walk project_walk(const Walk& w, int r) {
  if (w.torus()) throw std::invalid_argument("project_walk expects a Z^d walk");
  if (r < 3) throw std::invalid_argument("torus side r must be >= 3");
  return Walk(w.dim(), w.steps(), r);
}

namespace {

void check_interval(const Walk& w, int a, int b) {
  if (a < 0 || b > w.length() || a > b)
    throw std::invalid_argument("invalid time interval");
}

// Multiplicity-table contact count over positions reduced by `reduce`.
template <class Reduce>
std::int64_t count_contacts(const Walk& w, int a, int b, Reduce reduce) {
  std::unordered_map<Point, int, PointHash> mult;
  mult.reserve(static_cast<std::size_t>(b - a + 1));
  std::int64_t contacts = 0;
  Point p = w.lifted_position(a);
  contacts += mult[reduce(p)]++;  // 0 for the first site
  for (int k = a + 1; k <= b; ++k) {
    std::uint8_t s = w.steps()[k - 1];
    p[step_axis(s)] += step_sign(s);
    contacts += mult[reduce(p)]++;
  }
  return contacts;
}

}  // namespace

int pair_interaction(const Walk& w, int s, int t) {
  if (s < 0 || t > w.length() || s >= t)
    throw std::invalid_argument("pair_interaction requires 0 <= s < t <= n");
  return w.position(s) == w.position(t) ? -1 : 0;
}

std::int64_t contact_count(const Walk& w, int a, int b) {
  check_interval(w, a, b);
  if (w.torus()) {
    const int r = w.torus_side();
    return count_contacts(w, a, b, [r](const Point& p) { return torus_rep(p, r); });
  }
  return count_contacts(w, a, b, [](const Point& p) { return p; });
}

double interaction_weight(const Walk& w, double beta, int a, int b) {
  return contact_weight_pow(beta, contact_count(w, a, b));
}

std::int64_t contact_count_mod(const Walk& w, int r, int a, int b) {
  check_interval(w, a, b);
  if (w.torus()) throw std::invalid_argument("contact_count_mod expects a Z^d walk");
  if (r < 3) throw std::invalid_argument("torus side r must be >= 3");
  return count_contacts(w, a, b, [r](const Point& p) { return torus_rep(p, r); });
}

double interaction_weight_mod(const Walk& w, double beta, int r, int a, int b) {
  return contact_weight_pow(beta, contact_count_mod(w, r, a, b));
}

}  // namespace wsaw
