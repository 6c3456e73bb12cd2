#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uqbench/core/types.h"

namespace uqbench::datasets {

enum class Attribute { kSize, kColor, kMaterial, kShape };
inline constexpr std::array<Attribute, 4> kAttributes = {
    Attribute::kSize, Attribute::kColor, Attribute::kMaterial, Attribute::kShape};
std::string_view attribute_name(Attribute a);

struct ClevrObject {
  std::string size;
  std::string color;
  std::string material;
  std::string shape;

  const std::string& get(Attribute a) const;
  bool operator==(const ClevrObject&) const = default;
};

// Vocabulary used for negative existence and counting probes.
const std::vector<std::string>& clevr_vocabulary(Attribute a);

enum class Direction { kLeft, kRight, kFront, kBehind };
inline constexpr std::array<Direction, 4> kDirections = {
    Direction::kLeft, Direction::kRight, Direction::kFront, Direction::kBehind};
std::string_view direction_key(Direction d);     // "left", ..., "behind"
std::string_view direction_phrase(Direction d);  // "left of", ..., "behind"

struct SceneGraph {
  std::string image_id;
  std::vector<ClevrObject> objects;
  // relations[d][i]: indices of objects that are d of object i.
  std::array<std::vector<std::vector<int>>, 4> relations;

  // Whether object a is d of object b.
  bool is(int a, Direction d, int b) const;
};

// Standard CLEVR scene layout: {image_filename, objects: [{color, size,
// material, shape, pixel_coords?}], relationships: {left, right, front,
// behind}}. Relationships missing from the file are derived from
// pixel_coords (smaller x is left, larger y is front). Throws DataError on
// bad indices or non-inverse left/right or front/behind lists.
SceneGraph parse_scene(const Json& scene);
// Accepts {"scenes": [...]} or a bare array.
std::vector<SceneGraph> parse_scenes(const Json& doc);
std::vector<SceneGraph> read_scenes(const std::filesystem::path& path);

enum class QuestionType { kAttribute, kExistence, kRelation, kCounting };
inline constexpr std::array<QuestionType, 4> kQuestionTypes = {
    QuestionType::kAttribute, QuestionType::kExistence, QuestionType::kRelation,
    QuestionType::kCounting};
std::string_view question_type_name(QuestionType t);
std::optional<QuestionType> parse_question_type(std::string_view name);

// A partial object description; unset attributes are unconstrained.
struct Description {
  std::array<std::optional<std::string>, 4> values;  // indexed by Attribute

  bool matches(const ClevrObject& o) const;
  // "large red rubber cube", "red object"; plural: "red objects".
  std::string render(bool plural = false) const;
  static Description full(const ClevrObject& o);
};

// Scene elements a template is filled with.
struct QuestionElements {
  QuestionType type = QuestionType::kExistence;
  Attribute queried = Attribute::kColor;  // attribute questions
  Description target;                     // referent / filter / subject
  std::optional<Description> anchor;      // relation questions
  Direction direction = Direction::kLeft;
  bool located = false;  // relation: "What is the X that is d the Y?"
};

std::string render_question(const QuestionElements& e);

// Answer from the scene graph alone. nullopt when a referent the question
// presupposes is missing or ambiguous (the question is invalid).
//   attribute -> property value; existence -> yes/no; counting -> integer;
//   relation  -> yes/no, or the located object's full description.
std::optional<std::string> oracle_answer(const SceneGraph& scene,
                                         const QuestionElements& e);

struct GeneratedQa {
  std::string image_id;
  std::string question;
  std::string answer;
  QuestionType question_type = QuestionType::kExistence;
};

// Loops until every type has `per_type` items: sample a scene, attempt each
// unfilled type once, keep valid non-duplicate pairs. Throws
// GenerationIncompleteError after `stall_limit` consecutive scene draws
// without progress (default max(1000, 100 * scenes)).
std::vector<GeneratedQa> generate_clevr(const std::vector<SceneGraph>& scenes,
                                        int per_type, std::uint64_t seed,
                                        std::optional<int> stall_limit = std::nullopt);

// id "clevr-<type>-<k>", reference_answers = {answer}.
std::vector<VqaInstance> to_instances(const std::vector<GeneratedQa>& qas);

}  // namespace uqbench::datasets
