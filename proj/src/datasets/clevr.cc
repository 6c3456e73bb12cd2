#include "uqbench/datasets/clevr.h"

#include <algorithm>
#include <map>
#include <set>

#include "uqbench/core/errors.h"
#include "uqbench/core/jsonl.h"
#include "uqbench/core/random.h"

namespace uqbench::datasets {
namespace {

std::size_t idx(Attribute a) { return static_cast<std::size_t>(a); }
std::size_t idx(Direction d) { return static_cast<std::size_t>(d); }

std::string article_for(const std::string& word) {
  return std::string("aeiou").find(word.front()) != std::string::npos ? "an" : "a";
}

// Every CLEVR shape noun (and "object") pluralizes regularly.
std::string plural_of(const std::string& noun) { return noun + "s"; }

std::vector<int> matching(const SceneGraph& s, const Description& d) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(s.objects.size()); ++i) {
    if (d.matches(s.objects[i])) out.push_back(i);
  }
  return out;
}

std::optional<int> unique_match(const SceneGraph& s, const Description& d) {
  const auto m = matching(s, d);
  if (m.size() != 1) return std::nullopt;
  return m.front();
}

// Smallest attribute subset of `o` (subsets ordered by size, then by the
// attribute order) that singles out `o` among `pool`. Attributes in
// `excluded` are never used.
std::optional<Description> minimal_description(const SceneGraph& s, int o,
                                               const std::vector<int>& pool,
                                               std::optional<Attribute> excluded) {
  std::vector<unsigned> masks;
  for (unsigned mask = 0; mask < 16; ++mask) {
    if (excluded && (mask & (1u << idx(*excluded)))) continue;
    masks.push_back(mask);
  }
  std::stable_sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
    return __builtin_popcount(a) < __builtin_popcount(b);
  });
  for (unsigned mask : masks) {
    Description d;
    for (auto a : kAttributes) {
      if (mask & (1u << idx(a))) d.values[idx(a)] = s.objects[o].get(a);
    }
    int hits = 0;
    for (int j : pool) hits += d.matches(s.objects[j]) ? 1 : 0;
    if (hits == 1 && d.matches(s.objects[o])) return d;
  }
  return std::nullopt;
}

std::vector<int> all_objects(const SceneGraph& s) {
  std::vector<int> v(s.objects.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
  return v;
}

std::vector<int> related_to(const SceneGraph& s, Direction d, int anchor) {
  return s.relations[idx(d)][anchor];
}

Description random_filter(Rng& rng, const ClevrObject* from) {
  const unsigned mask = 1 + static_cast<unsigned>(rng.index(15));
  Description d;
  for (auto a : kAttributes) {
    if (!(mask & (1u << idx(a)))) continue;
    if (from) {
      d.values[idx(a)] = from->get(a);
    } else {
      const auto& vocab = clevr_vocabulary(a);
      d.values[idx(a)] = vocab[rng.index(vocab.size())];
    }
  }
  return d;
}

std::optional<QuestionElements> select_elements(const SceneGraph& s,
                                                QuestionType t, Rng& rng) {
  const int n = static_cast<int>(s.objects.size());
  if (n == 0) return std::nullopt;
  QuestionElements e;
  e.type = t;
  switch (t) {
    case QuestionType::kAttribute: {
      const int o = static_cast<int>(rng.index(n));
      e.queried = kAttributes[rng.index(4)];
      auto d = minimal_description(s, o, all_objects(s), e.queried);
      if (!d) return std::nullopt;
      e.target = *d;
      return e;
    }
    case QuestionType::kExistence: {
      const bool positive = rng.bernoulli(0.5);
      const int o = static_cast<int>(rng.index(n));
      e.target = random_filter(rng, positive ? &s.objects[o] : nullptr);
      return e;
    }
    case QuestionType::kCounting: {
      const bool from_scene = rng.bernoulli(0.75);
      const int o = static_cast<int>(rng.index(n));
      e.target = random_filter(rng, from_scene ? &s.objects[o] : nullptr);
      return e;
    }
    case QuestionType::kRelation: {
      if (n < 2) return std::nullopt;
      e.located = rng.bernoulli(0.5);
      e.direction = kDirections[rng.index(4)];
      const int b = static_cast<int>(rng.index(n));
      auto anchor = minimal_description(s, b, all_objects(s), std::nullopt);
      if (!anchor) return std::nullopt;
      e.anchor = *anchor;
      if (e.located) {
        const auto pool = related_to(s, e.direction, b);
        if (pool.empty()) return std::nullopt;
        const int x = pool[rng.index(pool.size())];
        auto d = minimal_description(s, x, pool, std::nullopt);
        if (!d) return std::nullopt;
        e.target = *d;
      } else {
        int a = static_cast<int>(rng.index(n - 1));
        if (a >= b) ++a;
        auto d = minimal_description(s, a, all_objects(s), std::nullopt);
        if (!d) return std::nullopt;
        e.target = *d;
      }
      return e;
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view attribute_name(Attribute a) {
  static constexpr std::array<std::string_view, 4> kNames = {"size", "color",
                                                             "material", "shape"};
  return kNames[idx(a)];
}

const std::string& ClevrObject::get(Attribute a) const {
  switch (a) {
    case Attribute::kSize: return size;
    case Attribute::kColor: return color;
    case Attribute::kMaterial: return material;
    case Attribute::kShape: return shape;
  }
  return shape;
}

const std::vector<std::string>& clevr_vocabulary(Attribute a) {
  static const std::array<std::vector<std::string>, 4> kVocab = {{
      {"small", "large"},
      {"gray", "red", "blue", "green", "brown", "purple", "cyan", "yellow"},
      {"rubber", "metal"},
      {"cube", "sphere", "cylinder"},
  }};
  return kVocab[idx(a)];
}

std::string_view direction_key(Direction d) {
  static constexpr std::array<std::string_view, 4> kKeys = {"left", "right",
                                                            "front", "behind"};
  return kKeys[idx(d)];
}

std::string_view direction_phrase(Direction d) {
  static constexpr std::array<std::string_view, 4> kPhrases = {
      "left of", "right of", "in front of", "behind"};
  return kPhrases[idx(d)];
}

bool SceneGraph::is(int a, Direction d, int b) const {
  const auto& list = relations[idx(d)][b];
  return std::find(list.begin(), list.end(), a) != list.end();
}

SceneGraph parse_scene(const Json& j) {
  SceneGraph s;
  try {
    if (j.contains("image_filename")) {
      s.image_id = j.at("image_filename").get<std::string>();
    } else if (j.contains("image_index")) {
      s.image_id = std::to_string(j.at("image_index").get<long>());
    } else {
      throw DataError("scene without image_filename or image_index");
    }
    std::vector<std::array<double, 2>> coords;
    bool have_coords = true;
    for (const auto& o : j.at("objects")) {
      ClevrObject obj{o.at("size").get<std::string>(), o.at("color").get<std::string>(),
                      o.at("material").get<std::string>(),
                      o.at("shape").get<std::string>()};
      for (auto a : kAttributes) {
        if (obj.get(a).empty()) throw DataError("object with empty attribute");
      }
      s.objects.push_back(std::move(obj));
      if (o.contains("pixel_coords") && o.at("pixel_coords").size() >= 2) {
        coords.push_back({o.at("pixel_coords")[0].get<double>(),
                          o.at("pixel_coords")[1].get<double>()});
      } else {
        have_coords = false;
      }
    }
    const int n = static_cast<int>(s.objects.size());
    if (j.contains("relationships")) {
      const auto& rel = j.at("relationships");
      for (auto d : kDirections) {
        auto lists = rel.at(std::string(direction_key(d)))
                         .get<std::vector<std::vector<int>>>();
        if (static_cast<int>(lists.size()) != n) {
          throw DataError("relationship list size differs from object count");
        }
        for (const auto& l : lists) {
          for (int k : l) {
            if (k < 0 || k >= n) throw DataError("relationship index out of range");
          }
        }
        s.relations[idx(d)] = std::move(lists);
      }
    } else if (have_coords) {
      for (auto d : kDirections) s.relations[idx(d)].assign(n, {});
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
          if (k == i) continue;
          if (coords[k][0] < coords[i][0]) s.relations[idx(Direction::kLeft)][i].push_back(k);
          if (coords[k][0] > coords[i][0]) s.relations[idx(Direction::kRight)][i].push_back(k);
          if (coords[k][1] > coords[i][1]) s.relations[idx(Direction::kFront)][i].push_back(k);
          if (coords[k][1] < coords[i][1]) s.relations[idx(Direction::kBehind)][i].push_back(k);
        }
      }
    } else {
      throw DataError("scene has neither relationships nor pixel_coords");
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed scene: ") + e.what());
  }
  // k is left of i exactly when i is right of k; same for front/behind.
  const int n = static_cast<int>(s.objects.size());
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      if (s.is(k, Direction::kLeft, i) != s.is(i, Direction::kRight, k) ||
          s.is(k, Direction::kFront, i) != s.is(i, Direction::kBehind, k)) {
        throw DataError("scene " + s.image_id + ": relations are not mutually inverse");
      }
    }
  }
  return s;
}

std::vector<SceneGraph> parse_scenes(const Json& doc) {
  const Json& list = doc.is_object() ? doc.at("scenes") : doc;
  std::vector<SceneGraph> out;
  for (const auto& s : list) out.push_back(parse_scene(s));
  return out;
}

std::vector<SceneGraph> read_scenes(const std::filesystem::path& path) {
  try {
    return parse_scenes(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string_view question_type_name(QuestionType t) {
  static constexpr std::array<std::string_view, 4> kNames = {
      "attribute", "existence", "relation", "counting"};
  return kNames[static_cast<std::size_t>(t)];
}

std::optional<QuestionType> parse_question_type(std::string_view name) {
  for (auto t : kQuestionTypes) {
    if (question_type_name(t) == name) return t;
  }
  return std::nullopt;
}

bool Description::matches(const ClevrObject& o) const {
  for (auto a : kAttributes) {
    if (values[idx(a)] && *values[idx(a)] != o.get(a)) return false;
  }
  return true;
}

std::string Description::render(bool plural) const {
  std::string out;
  for (auto a : {Attribute::kSize, Attribute::kColor, Attribute::kMaterial}) {
    if (values[idx(a)]) out += *values[idx(a)] + " ";
  }
  const std::string noun =
      values[idx(Attribute::kShape)] ? *values[idx(Attribute::kShape)] : "object";
  return out + (plural ? plural_of(noun) : noun);
}

Description Description::full(const ClevrObject& o) {
  Description d;
  for (auto a : kAttributes) d.values[idx(a)] = o.get(a);
  return d;
}

std::string render_question(const QuestionElements& e) {
  const std::string phrase(direction_phrase(e.direction));
  switch (e.type) {
    case QuestionType::kAttribute:
      return "What " + std::string(attribute_name(e.queried)) + " is the " +
             e.target.render() + "?";
    case QuestionType::kExistence: {
      const auto d = e.target.render();
      return "Is there " + article_for(d) + " " + d + "?";
    }
    case QuestionType::kCounting:
      return "How many " + e.target.render(true) + " are there?";
    case QuestionType::kRelation:
      if (e.located) {
        return "What is the " + e.target.render() + " that is " + phrase +
               " the " + e.anchor->render() + "?";
      }
      return "Is the " + e.target.render() + " " + phrase + " the " +
             e.anchor->render() + "?";
  }
  return "";
}

std::optional<std::string> oracle_answer(const SceneGraph& s,
                                         const QuestionElements& e) {
  switch (e.type) {
    case QuestionType::kAttribute: {
      if (e.target.values[idx(e.queried)]) return std::nullopt;
      const auto o = unique_match(s, e.target);
      if (!o) return std::nullopt;
      return s.objects[*o].get(e.queried);
    }
    case QuestionType::kExistence:
      return matching(s, e.target).empty() ? "no" : "yes";
    case QuestionType::kCounting:
      return std::to_string(matching(s, e.target).size());
    case QuestionType::kRelation: {
      if (!e.anchor) return std::nullopt;
      const auto b = unique_match(s, *e.anchor);
      if (!b) return std::nullopt;
      if (e.located) {
        std::optional<int> hit;
        for (int k : related_to(s, e.direction, *b)) {
          if (!e.target.matches(s.objects[k])) continue;
          if (hit) return std::nullopt;
          hit = k;
        }
        if (!hit) return std::nullopt;
        return Description::full(s.objects[*hit]).render();
      }
      const auto a = unique_match(s, e.target);
      if (!a || *a == *b) return std::nullopt;
      return s.is(*a, e.direction, *b) ? "yes" : "no";
    }
  }
  return std::nullopt;
}

std::vector<GeneratedQa> generate_clevr(const std::vector<SceneGraph>& scenes,
                                        int per_type, std::uint64_t seed,
                                        std::optional<int> stall_limit) {
  if (per_type < 1) throw ParameterError("per-type quota must be >= 1");
  if (scenes.empty()) throw ParameterError("no scenes");
  const int limit = stall_limit.value_or(
      std::max(1000, 100 * static_cast<int>(scenes.size())));
  Rng rng(seed);
  std::array<int, 4> count{};
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<GeneratedQa> out;
  int stalled = 0;
  auto unfilled = [&] {
    return std::any_of(count.begin(), count.end(), [&](int c) { return c < per_type; });
  };
  while (unfilled()) {
    const auto& scene = scenes[rng.index(scenes.size())];
    bool progress = false;
    for (auto t : kQuestionTypes) {
      auto& c = count[static_cast<std::size_t>(t)];
      if (c >= per_type) continue;
      const auto elements = select_elements(scene, t, rng);
      if (!elements) continue;
      const auto answer = oracle_answer(scene, *elements);
      if (!answer) continue;
      auto question = render_question(*elements);
      if (!seen.emplace(scene.image_id, question).second) continue;
      out.push_back(GeneratedQa{scene.image_id, std::move(question), *answer, t});
      ++c;
      progress = true;
    }
    stalled = progress ? 0 : stalled + 1;
    if (stalled >= limit) {
      std::map<std::string, int> deficits;
      for (auto t : kQuestionTypes) {
        const int c = count[static_cast<std::size_t>(t)];
        if (c < per_type) deficits[std::string(question_type_name(t))] = per_type - c;
      }
      throw GenerationIncompleteError(
          "CLEVR generation stalled after " + std::to_string(limit) +
              " scene draws without a new question",
          deficits);
    }
  }
  return out;
}

std::vector<VqaInstance> to_instances(const std::vector<GeneratedQa>& qas) {
  std::vector<VqaInstance> out;
  std::array<int, 4> k{};
  for (const auto& q : qas) {
    const auto type = std::string(question_type_name(q.question_type));
    VqaInstance inst;
    inst.id = "clevr-" + type + "-" +
              std::to_string(k[static_cast<std::size_t>(q.question_type)]++);
    inst.image_ref = q.image_id;
    inst.question = q.question;
    inst.reference_answers = {q.answer};
    inst.dataset = "clevr";
    inst.question_type = type;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace uqbench::datasets
