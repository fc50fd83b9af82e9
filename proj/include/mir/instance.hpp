#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mir/errors.hpp"
#include "mir/rng.hpp"
#include "mir/sets.hpp"
#include "mir/valuation.hpp"

namespace mir {

struct Instance {
  Profile profile;
  std::string name;
  std::uint64_t seed = 0;
};

namespace detail {

inline nlohmann::json set_to_json(ItemSet s) { return s.items(); }

inline ItemSet set_from_json(const nlohmann::json& j) {
  ItemSet s;
  for (const auto& e : j) s.add(e.get<int>());
  return s;
}

}  // namespace detail

inline nlohmann::json bidder_to_json(const Valuation& v) {
  nlohmann::json j;
  switch (v.kind()) {
    case Valuation::Kind::additive:
      j["type"] = "additive";
      j["weights"] = v.weights();
      break;
    case Valuation::Kind::coverage: {
      j["type"] = "coverage";
      j["element_weights"] = v.element_weights();
      std::vector<std::vector<int>> covers;
      for (std::uint64_t c : v.covers()) covers.push_back(ItemSet(c).items());
      j["covers"] = covers;
      break;
    }
    case Valuation::Kind::xos:
      j["type"] = "xos";
      j["clauses"] = v.clauses();
      break;
    case Valuation::Kind::mild_desires: {
      j["type"] = "mild_desires";
      j["a"] = v.target_size();
      std::vector<std::vector<int>> family;
      for (ItemSet f : v.family()) family.push_back(f.items());
      j["family"] = family;
      break;
    }
    case Valuation::Kind::almost_single_minded:
      j["type"] = "almost_single_minded";
      j["target"] = detail::set_to_json(v.target());
      break;
    case Valuation::Kind::induced_single_minded:
      j["type"] = "single_minded";
      j["target"] = detail::set_to_json(v.target());
      break;
    case Valuation::Kind::explicit_table:
      j["type"] = "explicit";
      j["table"] = v.table();
      break;
  }
  return j;
}

inline Valuation bidder_from_json(int m, const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "additive")
    return Valuation::additive(m, j.at("weights").get<std::vector<Value>>());
  if (type == "coverage") {
    std::vector<std::uint64_t> covers;
    for (const auto& c : j.at("covers")) covers.push_back(detail::set_from_json(c).bits);
    return Valuation::coverage(m, j.at("element_weights").get<std::vector<Value>>(),
                               std::move(covers));
  }
  if (type == "xos")
    return Valuation::xos(m, j.at("clauses").get<std::vector<std::vector<Value>>>());
  if (type == "mild_desires") {
    std::vector<ItemSet> family;
    for (const auto& f : j.at("family")) family.push_back(detail::set_from_json(f));
    return Valuation::mild_desires(m, j.at("a").get<int>(), std::move(family));
  }
  if (type == "almost_single_minded")
    return Valuation::almost_single_minded(m, detail::set_from_json(j.at("target")));
  if (type == "single_minded")
    return Valuation::induced_single_minded(m, detail::set_from_json(j.at("target")));
  if (type == "explicit")
    return Valuation::explicit_table(m, j.at("table").get<std::vector<Value>>());
  throw MalformedInputError("instance: unknown bidder type " + type);
}

inline void write_instance(std::ostream& os, const Instance& inst) {
  nlohmann::json j;
  j["m"] = inst.profile.m;
  j["denominator"] = inst.profile.denominator;
  j["seed"] = inst.seed;
  j["name"] = inst.name;
  nlohmann::json bidders = nlohmann::json::array();
  for (const auto& v : inst.profile.bidders) bidders.push_back(bidder_to_json(v));
  j["bidders"] = bidders;
  os << j.dump(2) << "\n";
}

inline Instance read_instance(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInputError(std::string("instance: bad JSON: ") + e.what());
  }
  Instance inst;
  inst.profile.m = j.at("m").get<int>();
  inst.profile.denominator = j.value("denominator", Value{1});
  inst.seed = j.value("seed", std::uint64_t{0});
  inst.name = j.value("name", std::string{});
  for (const auto& b : j.at("bidders"))
    inst.profile.bidders.push_back(bidder_from_json(inst.profile.m, b));
  return inst;
}

struct GenParams {
  Value max_weight = 20;   // additive weights, clause weights
  Value max_step = 6;      // explicit-table marginal steps
  int universe = 0;        // coverage universe; 0 means min(2m, 24)
  int clauses = 3;         // xos clause count (used by tests)
};

// Reproducible instance families. single_minded partitions a random
// permutation into n near-equal disjoint targets, so OPT = n by construction.
inline Instance gen_instance(const std::string& kind, int m, int n, std::uint64_t seed,
                             const GenParams& params = {}) {
  Rng rng(seed);
  Instance inst;
  inst.seed = seed;
  inst.profile.m = m;
  inst.name = kind + "_m" + std::to_string(m) + "_n" + std::to_string(n) + "_s" +
              std::to_string(seed);

  for (int i = 0; i < n; ++i) {
    if (kind == "additive") {
      std::vector<Value> w(m);
      for (auto& x : w) x = rng.range(0, params.max_weight);
      inst.profile.bidders.push_back(Valuation::additive(m, std::move(w)));
    } else if (kind == "coverage") {
      const int u = params.universe > 0 ? params.universe : std::min(2 * m, 24);
      std::vector<Value> w(u);
      for (auto& x : w) x = rng.range(1, 8);
      std::vector<std::uint64_t> covers(m);
      for (auto& c : covers)
        for (int e = 0; e < u; ++e)
          if (rng.below(3) == 0) c |= std::uint64_t{1} << e;
      inst.profile.bidders.push_back(Valuation::coverage(m, std::move(w), std::move(covers)));
    } else if (kind == "mild_desires") {
      const int a = 1 + static_cast<int>(rng.below(std::min(m, 3)));
      const int fam = 1 + static_cast<int>(rng.below(3));
      std::vector<ItemSet> family;
      for (int f = 0; f < fam; ++f) {
        ItemSet set;
        while (set.count() < a) set.add(static_cast<int>(rng.below(m)));
        if (std::find(family.begin(), family.end(), set) == family.end())
          family.push_back(set);
      }
      inst.profile.bidders.push_back(Valuation::mild_desires(m, a, std::move(family)));
    } else if (kind == "explicit") {
      if (m > 16) throw ScaleRefusedError("gen explicit: m > 16");
      std::vector<Value> t(std::size_t{1} << m, 0);
      for (std::uint64_t s = 1; s < t.size(); ++s) {
        Value floor = 0;
        for (std::uint64_t b = s; b; b &= b - 1)
          floor = std::max(floor, t[s & ~(b & (~b + 1))]);
        t[s] = floor + rng.range(0, params.max_step);
      }
      inst.profile.bidders.push_back(Valuation::explicit_table(m, std::move(t)));
    } else if (kind != "single_minded") {
      throw MalformedInputError("gen_instance: unknown kind " + kind);
    }
  }

  if (kind == "single_minded") {
    std::vector<int> perm(m);
    for (int j = 0; j < m; ++j) perm[j] = j;
    for (int j = m - 1; j > 0; --j)
      std::swap(perm[j], perm[rng.below(static_cast<std::uint32_t>(j + 1))]);
    int at = 0;
    for (int i = 0; i < n; ++i) {
      const int take = m / n + (i < m % n ? 1 : 0);
      ItemSet part;
      for (int x = 0; x < take; ++x) part.add(perm[at++]);
      inst.profile.bidders.push_back(Valuation::induced_single_minded(m, part));
    }
  }
  return inst;
}

}  // namespace mir
