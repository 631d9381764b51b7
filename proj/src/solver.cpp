#include "axon/solver.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>

namespace axon {

std::string to_string(const Constraint& c) { return to_string(c.lhs) + " = " + to_string(c.rhs); }

namespace {

std::string dedupe_key(const Constraint& c) {
  try {
    return to_string(simp(c.lhs)) + " = " + to_string(simp(c.rhs));
  } catch (const ShapeError&) {
    return to_string(c);
  }
}

}  // namespace

ConstraintSet::ConstraintSet(std::initializer_list<Constraint> items) {
  for (const Constraint& c : items) add(c);
}

bool ConstraintSet::add(Constraint c) {
  if (sort_of(c.lhs) != sort_of(c.rhs)) {
    throw SortError("constraint equates a shape with a dimension: " + to_string(c));
  }
  if (!keys_.insert(dedupe_key(c)).second) return false;
  items_.push_back(std::move(c));
  return true;
}

std::string to_string(const ConstraintSet& set) {
  std::string out = "{ ";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out += "; ";
    out += to_string(set[i]);
  }
  out += set.empty() ? "}" : " }";
  return out;
}

std::string_view rule_name(Rule rule) {
  switch (rule) {
    case Rule::basic:
      return "Basic";
    case Rule::reorder:
      return "Reordering";
    case Rule::unpack:
      return "Unpacking";
    case Rule::empty_shapes:
      return "Empty shapes";
    case Rule::append_unpack:
      return "Append Unpacking";
    case Rule::append_dim:
      return "Append Dimensionality";
    case Rule::simplify:
      return "Simplification";
    case Rule::arith:
      return "Arithmetic Simplification";
    case Rule::partial:
      return "Partial Expression Simplification";
    case Rule::iteration_limit:
      return "Iteration limit";
  }
  return "?";
}

namespace {

// ---- term classification ----

const std::string* var_name(const Term& t) {
  if (const auto* s = std::get_if<Shape>(&t); s && s->is_var()) return &s->name();
  if (const auto* d = std::get_if<Dim>(&t); d && d->is_var()) return &d->name();
  return nullptr;
}

const Dim* as_dim(const Term& t) { return std::get_if<Dim>(&t); }
const Shape* as_shape(const Term& t) { return std::get_if<Shape>(&t); }

bool is_const(const Term& t) {
  const Dim* d = as_dim(t);
  return d && d->is_constant();
}
bool is_star(const Term& t) {
  const Dim* d = as_dim(t);
  return d && d->is_star();
}
bool is_dim_op(const Term& t) {
  const Dim* d = as_dim(t);
  return d && d->is_op();
}
bool is_concrete(const Term& t) {
  const Shape* s = as_shape(t);
  return s && s->is_concrete();
}
bool is_append(const Term& t) {
  const Shape* s = as_shape(t);
  return s && s->is_append();
}

void flatten_parts(const Shape& s, std::vector<Shape>& out) {
  if (s.is_append()) {
    for (const Shape& p : s.parts()) flatten_parts(p, out);
  } else {
    out.push_back(s);
  }
}

std::vector<Shape> flat_parts(const Shape& s) {
  std::vector<Shape> out;
  flatten_parts(s, out);
  return out;
}

void chain(const Dim& d, DimOp op, std::vector<Dim>& out) {
  if (d.is_op() && d.op() == op) {
    chain(d.lhs(), op, out);
    chain(d.rhs(), op, out);
  } else {
    out.push_back(d);
  }
}

// ---- rewrites ----

Constraint derive(Term lhs, Term rhs, const Constraint& from) {
  return Constraint{std::move(lhs), std::move(rhs), from.origin};
}

Failed fail(const Constraint& c, Rule rule, std::string message) {
  return Failed{c, rule, std::move(message)};
}

// Replaces constraint `i` with `in_place` and adds `appended` at the end.
Changed rewrite(const ConstraintSet& set, std::size_t i, std::vector<Constraint> in_place,
                std::vector<Constraint> appended = {}) {
  ConstraintSet out;
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (j == i) {
      for (Constraint& c : in_place) out.add(std::move(c));
    } else {
      out.add(set[j]);
    }
  }
  for (Constraint& c : appended) out.add(std::move(c));
  return Changed{i, std::move(out)};
}

RuleOutcome occurs_rule(const ConstraintSet& set, std::size_t i, const std::string& a) {
  const Constraint& c = set[i];
  Term rhs;
  try {
    rhs = simp(c.rhs);
  } catch (const ShapeError& e) {
    return fail(c, Rule::basic, e.what());
  }

  if (const Shape* s = as_shape(rhs)) {
    if (s->is_var()) return rewrite(set, i, {});
    if (!s->is_append()) return NoChange{};
    RankBound bound = min_rank(*s);
    if (bound.known > 0) {
      return fail(c, Rule::basic,
                  "occurs check: " + a + " would contain itself plus " +
                      std::to_string(bound.known) + " more dimension(s)");
    }
    // Every part is a variable, so a = a@b@... forces the other parts empty.
    std::size_t self_count = 0;
    std::vector<Constraint> forced;
    for (const Shape& part : s->parts()) {
      if (part.is_var() && part.name() == a) {
        ++self_count;
      } else {
        forced.push_back(derive(part, Shape(), c));
      }
    }
    if (self_count == 0) return NoChange{};
    if (self_count > 1) forced.push_back(derive(Shape::var(a), Shape(), c));
    return rewrite(set, i, std::move(forced));
  }

  const Dim& d = std::get<Dim>(rhs);
  if (d.is_var()) return rewrite(set, i, {});
  if (d.is_op() && (d.op() == DimOp::add || d.op() == DimOp::mul)) {
    std::vector<Dim> operands;
    chain(d, d.op(), operands);
    bool direct = std::any_of(operands.begin(), operands.end(),
                              [&](const Dim& o) { return o.is_var() && o.name() == a; });
    bool grows = d.op() == DimOp::add ||
                 std::any_of(operands.begin(), operands.end(),
                             [](const Dim& o) { return o.is_constant() && o.value() > 1; });
    if (direct && grows) {
      return fail(c, Rule::basic, "occurs check: " + a + " = " + to_string(d) + " has no solution");
    }
  }
  // Other self-references may be satisfiable, e.g. a = (- (+ a 1) 1).
  return NoChange{};
}

RuleOutcome try_basic(const ConstraintSet& set, std::size_t i) {
  const Constraint& c = set[i];
  if (c.lhs == c.rhs) return rewrite(set, i, {});

  if (is_const(c.lhs) && is_const(c.rhs)) {
    return fail(c, Rule::basic, "distinct constants " + to_string(c.lhs) + " and " + to_string(c.rhs));
  }
  auto static_dim = [](const Term& t) { return is_const(t) || is_dim_op(t); };
  if ((is_star(c.lhs) && static_dim(c.rhs)) || (is_star(c.rhs) && static_dim(c.lhs))) {
    return fail(c, Rule::basic, "variable dimension * cannot equal a static dimension");
  }

  const std::string* a = var_name(c.lhs);
  if (!a) return NoChange{};
  if (occurs(*a, c.rhs)) return occurs_rule(set, i, *a);

  bool elsewhere = false;
  for (std::size_t j = 0; j < set.size() && !elsewhere; ++j) {
    elsewhere = j != i && (occurs(*a, set[j].lhs) || occurs(*a, set[j].rhs));
  }
  if (!elsewhere) return NoChange{};

  Binding binding{{*a, c.rhs}};
  ConstraintSet out;
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (j == i) {
      out.add(c);
      continue;
    }
    try {
      out.add(derive(substitute(set[j].lhs, binding), substitute(set[j].rhs, binding), set[j]));
    } catch (const ShapeError& e) {
      return fail(set[j], Rule::basic, e.what());
    }
  }
  return Changed{i, std::move(out)};
}

RuleOutcome try_reorder(const ConstraintSet& set, std::size_t i) {
  const Constraint& c = set[i];
  bool swap = false;
  if (is_const(c.lhs) && !is_const(c.rhs)) {
    swap = true;
  } else if (var_name(c.rhs) && !var_name(c.lhs)) {
    swap = is_star(c.lhs) || is_dim_op(c.lhs) || is_concrete(c.lhs) || is_append(c.lhs);
  }
  if (!swap) return NoChange{};
  return rewrite(set, i, {derive(c.rhs, c.lhs, c)});
}

RuleOutcome try_unpack(const ConstraintSet& set, std::size_t i) {
  const Constraint& c = set[i];
  if (!is_concrete(c.lhs) || !is_concrete(c.rhs)) return NoChange{};
  const auto& lhs = as_shape(c.lhs)->dims();
  const auto& rhs = as_shape(c.rhs)->dims();
  if (lhs.size() != rhs.size()) {
    return fail(c, Rule::unpack,
                "rank mismatch: " + std::to_string(lhs.size()) + " vs " + std::to_string(rhs.size()));
  }
  std::vector<Constraint> pairs;
  for (std::size_t k = 0; k < lhs.size(); ++k) pairs.push_back(derive(lhs[k], rhs[k], c));
  return rewrite(set, i, std::move(pairs));
}

// Returns the append side and the concrete side, if the constraint has that
// form in either orientation.
std::optional<std::pair<const Shape*, const Shape*>> append_vs_concrete(const Constraint& c) {
  if (is_append(c.lhs) && is_concrete(c.rhs)) return std::pair{as_shape(c.lhs), as_shape(c.rhs)};
  if (is_concrete(c.lhs) && is_append(c.rhs)) return std::pair{as_shape(c.rhs), as_shape(c.lhs)};
  return std::nullopt;
}

RuleOutcome try_append_dim(const ConstraintSet& set, std::size_t i) {
  const Constraint& c = set[i];
  auto sides = append_vs_concrete(c);
  if (!sides) return NoChange{};
  std::size_t known = min_rank(*sides->first).known;
  std::size_t rank = sides->second->dims().size();
  if (known <= rank) return NoChange{};
  return fail(c, Rule::append_dim,
              "append has at least " + std::to_string(known) + " dimensions but is equated with rank " +
                  std::to_string(rank));
}

RuleOutcome try_empty_shapes(const ConstraintSet& set, std::size_t i) {
  const Constraint& c = set[i];
  auto sides = append_vs_concrete(c);
  if (!sides) return NoChange{};
  const auto& [append, concrete] = *sides;
  if (min_rank(*append).known != concrete->dims().size()) return NoChange{};

  // The concrete parts already account for every dimension, so each
  // variable part must be empty.
  std::vector<Dim> dims;
  std::vector<Constraint> empties;
  for (const Shape& part : flat_parts(*append)) {
    if (part.is_concrete()) {
      dims.insert(dims.end(), part.dims().begin(), part.dims().end());
    } else {
      empties.push_back(derive(part, Shape(), c));
    }
  }
  Shape collapsed = Shape::concrete(std::move(dims));
  Constraint reduced = is_append(c.lhs) ? derive(collapsed, c.rhs, c) : derive(c.lhs, collapsed, c);
  return rewrite(set, i, {std::move(reduced)}, std::move(empties));
}

std::vector<Shape> side_parts(const Shape& s) {
  return s.is_append() ? flat_parts(s) : std::vector<Shape>{s};
}

Shape rebuild_side(const Shape& original, std::vector<Shape> parts) {
  if (original.is_append()) return Shape::append(std::move(parts));
  return std::move(parts.front());
}

RuleOutcome try_append_unpack(const ConstraintSet& set, std::size_t i) {
  const Constraint& c = set[i];
  const Shape* lhs = as_shape(c.lhs);
  const Shape* rhs = as_shape(c.rhs);
  if (!lhs || !rhs) return NoChange{};
  if (!(lhs->is_append() || lhs->is_concrete()) || !(rhs->is_append() || rhs->is_concrete())) {
    return NoChange{};
  }
  if (!lhs->is_append() && !rhs->is_append()) return NoChange{};

  std::vector<Shape> lparts = side_parts(*lhs);
  std::vector<Shape> rparts = side_parts(*rhs);
  auto peelable = [](const Shape& s) { return s.is_concrete() && !s.dims().empty(); };

  auto peel = [&](bool from_back) -> RuleOutcome {
    Shape& lpart = from_back ? lparts.back() : lparts.front();
    Shape& rpart = from_back ? rparts.back() : rparts.front();
    std::vector<Dim> ldims = lpart.dims();
    std::vector<Dim> rdims = rpart.dims();
    Dim ld = from_back ? ldims.back() : ldims.front();
    Dim rd = from_back ? rdims.back() : rdims.front();
    if (from_back) {
      ldims.pop_back();
      rdims.pop_back();
    } else {
      ldims.erase(ldims.begin());
      rdims.erase(rdims.begin());
    }
    lpart = Shape::concrete(std::move(ldims));
    rpart = Shape::concrete(std::move(rdims));
    return rewrite(set, i,
                   {derive(rebuild_side(*lhs, lparts), rebuild_side(*rhs, rparts), c),
                    derive(std::move(ld), std::move(rd), c)});
  };

  if (peelable(lparts.back()) && peelable(rparts.back())) return peel(true);
  if (peelable(lparts.front()) && peelable(rparts.front())) return peel(false);
  return NoChange{};
}

RuleOutcome try_simplify(const ConstraintSet& set, std::size_t i) {
  const Constraint& c = set[i];
  Term lhs, rhs;
  try {
    lhs = simp(c.lhs);
    rhs = simp(c.rhs);
  } catch (const ShapeError& e) {
    return fail(c, Rule::simplify, e.what());
  }
  if (lhs == c.lhs && rhs == c.rhs) return NoChange{};
  return rewrite(set, i, {derive(std::move(lhs), std::move(rhs), c)});
}

RuleOutcome try_arith(const ConstraintSet& set, std::size_t i) {
  const Constraint& c = set[i];
  if (!is_dim_op(c.lhs) || !is_const(c.rhs)) return NoChange{};
  const Dim& expr = *as_dim(c.lhs);
  if (!expr.rhs().is_constant()) return NoChange{};
  std::int64_t c1 = expr.rhs().value();
  std::int64_t c2 = as_dim(c.rhs)->value();
  std::int64_t solved = 0;
  switch (expr.op()) {
    case DimOp::mul:
      if (c2 % c1 != 0) {
        return fail(c, Rule::arith, std::to_string(c2) + " is not a multiple of " + std::to_string(c1));
      }
      solved = c2 / c1;
      break;
    case DimOp::add:
      if (c2 - c1 <= 0) {
        return fail(c, Rule::arith, "no positive dimension plus " + std::to_string(c1) +
                                        " equals " + std::to_string(c2));
      }
      solved = c2 - c1;
      break;
    case DimOp::sub:
      if (__builtin_add_overflow(c1, c2, &solved)) {
        return fail(c, Rule::arith, "dimension arithmetic overflows");
      }
      break;
    case DimOp::div:
      return NoChange{};
  }
  return rewrite(set, i, {derive(expr.lhs(), Dim::constant(solved), c)});
}

RuleOutcome try_partial(const ConstraintSet& set, std::size_t i) {
  const Constraint& c = set[i];
  if (!is_dim_op(c.lhs) || !is_const(c.rhs)) return NoChange{};
  const Dim& expr = *as_dim(c.lhs);
  const Dim& value = *as_dim(c.rhs);

  bool elsewhere = false;
  for (std::size_t j = 0; j < set.size() && !elsewhere; ++j) {
    elsewhere = j != i && (contains_subterm(set[j].lhs, expr) || contains_subterm(set[j].rhs, expr));
  }
  if (!elsewhere) return NoChange{};

  ConstraintSet out;
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (j == i) {
      out.add(c);
      continue;
    }
    const Constraint& other = set[j];
    if (!contains_subterm(other.lhs, expr) && !contains_subterm(other.rhs, expr)) {
      out.add(other);
      continue;
    }
    try {
      out.add(derive(simp(replace_subterm(other.lhs, expr, value)),
                     simp(replace_subterm(other.rhs, expr, value)), other));
    } catch (const ShapeError& e) {
      return fail(other, Rule::partial, e.what());
    }
  }
  return Changed{i, std::move(out)};
}

RuleOutcome try_rule(Rule rule, const ConstraintSet& set, std::size_t i) {
  switch (rule) {
    case Rule::basic:
      return try_basic(set, i);
    case Rule::reorder:
      return try_reorder(set, i);
    case Rule::unpack:
      return try_unpack(set, i);
    case Rule::empty_shapes:
      return try_empty_shapes(set, i);
    case Rule::append_unpack:
      return try_append_unpack(set, i);
    case Rule::append_dim:
      return try_append_dim(set, i);
    case Rule::simplify:
      return try_simplify(set, i);
    case Rule::arith:
      return try_arith(set, i);
    case Rule::partial:
      return try_partial(set, i);
    case Rule::iteration_limit:
      break;
  }
  return NoChange{};
}

}  // namespace

RuleOutcome apply_rule(Rule rule, const ConstraintSet& set) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    RuleOutcome r = try_rule(rule, set, i);
    if (!std::holds_alternative<NoChange>(r)) return r;
  }
  return NoChange{};
}

RuleOutcome apply_rule_basic(const ConstraintSet& set) { return apply_rule(Rule::basic, set); }
RuleOutcome apply_rule_reorder(const ConstraintSet& set) { return apply_rule(Rule::reorder, set); }
RuleOutcome apply_rule_unpack(const ConstraintSet& set) { return apply_rule(Rule::unpack, set); }
RuleOutcome apply_rule_empty_shapes(const ConstraintSet& set) {
  return apply_rule(Rule::empty_shapes, set);
}
RuleOutcome apply_rule_append_unpack(const ConstraintSet& set) {
  return apply_rule(Rule::append_unpack, set);
}
RuleOutcome apply_rule_append_dim(const ConstraintSet& set) {
  return apply_rule(Rule::append_dim, set);
}
RuleOutcome apply_rule_simplify(const ConstraintSet& set) { return apply_rule(Rule::simplify, set); }
RuleOutcome apply_rule_arith(const ConstraintSet& set) { return apply_rule(Rule::arith, set); }
RuleOutcome apply_rule_partial(const ConstraintSet& set) { return apply_rule(Rule::partial, set); }

StepOutcome step(const ConstraintSet& set) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (Rule rule : kRulePriority) {
      RuleOutcome r = try_rule(rule, set, i);
      if (auto* changed = std::get_if<Changed>(&r)) {
        return Fired{rule, changed->index, std::move(changed->result)};
      }
      if (auto* failed = std::get_if<Failed>(&r)) return std::move(*failed);
    }
  }
  return FixedPoint{};
}

SolveOutcome solve(const ConstraintSet& set, const SolveOptions& options) {
  ConstraintSet current = set;
  for (std::size_t firings = 0;; ++firings) {
    StepOutcome next = step(current);
    if (auto* failed = std::get_if<Failed>(&next)) return std::move(*failed);
    if (std::holds_alternative<FixedPoint>(next)) break;

    auto& fired = std::get<Fired>(next);
    if (firings >= options.max_firings) {
      return Failed{current[fired.index], Rule::iteration_limit,
                    "no fixed point after " + std::to_string(options.max_firings) + " rule firings"};
    }
    if (options.trace) options.trace(TraceEvent{fired.rule, fired.index, current[fired.index], fired.result});
    current = std::move(fired.result);
  }

  Solved solved;
  for (const Constraint& c : current) {
    const std::string* a = var_name(c.lhs);
    if (a && !occurs(*a, c.rhs) && !solved.substitution.count(*a)) {
      solved.substitution.emplace(*a, c.rhs);
    } else {
      solved.residual.add(c);
    }
  }
  solved.final_set = std::move(current);
  return solved;
}

// ---------------------------------------------------------------------------
// Constraint files

namespace {

struct RawSide {
  std::optional<Term> term;
  std::string bare;  // set when the side is a lone identifier
};

struct RawConstraint {
  RawSide lhs;
  RawSide rhs;
  int line;
  std::size_t offset;
  std::size_t length;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::size_t skip_ws(std::string_view s, std::size_t pos) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  return pos;
}

RawSide parse_side(std::string_view line, std::size_t& pos, int line_no) {
  pos = skip_ws(line, pos);
  if (pos >= line.size()) {
    throw ConstraintFileError("expected a shape or dimension", line_no, static_cast<int>(pos) + 1);
  }
  char c = line[pos];
  try {
    if (c == '[') return RawSide{Term(parse_shape_at(line, pos)), {}};
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '*' || c == '(') {
      return RawSide{Term(parse_dim_at(line, pos)), {}};
    }
    if (ident_start(c)) {
      std::size_t end = pos;
      while (end < line.size() && ident_char(line[end])) ++end;
      std::size_t after = skip_ws(line, end);
      if (after < line.size() && line[after] == '@') return RawSide{Term(parse_shape_at(line, pos)), {}};
      RawSide side{std::nullopt, std::string(line.substr(pos, end - pos))};
      pos = end;
      return side;
    }
  } catch (const ShapeSyntaxError& e) {
    throw ConstraintFileError(e.what(), line_no, static_cast<int>(e.position()) + 1);
  }
  throw ConstraintFileError(std::string("unexpected character '") + c + "'", line_no,
                            static_cast<int>(pos) + 1);
}

void note_sort(std::map<std::string, Sort>& sorts, const std::string& name, Sort sort, int line) {
  auto [it, inserted] = sorts.emplace(name, sort);
  if (!inserted && it->second != sort) {
    throw ConstraintFileError("'" + name + "' is used both as a shape and as a dimension", line, 1);
  }
}

void note_sorts(std::map<std::string, Sort>& sorts, const Term& t, int line) {
  std::set<std::string> shape_vars, dim_vars;
  if (const auto* s = std::get_if<Shape>(&t)) {
    collect_vars(*s, shape_vars, dim_vars);
  } else {
    collect_vars(std::get<Dim>(t), dim_vars);
  }
  for (const auto& n : shape_vars) note_sort(sorts, n, Sort::shape, line);
  for (const auto& n : dim_vars) note_sort(sorts, n, Sort::dim, line);
}

std::optional<Sort> side_sort(const RawSide& side, const std::map<std::string, Sort>& sorts) {
  if (side.term) return sort_of(*side.term);
  auto it = sorts.find(side.bare);
  if (it == sorts.end()) return std::nullopt;
  return it->second;
}

Term materialize(const RawSide& side, Sort sort) {
  if (side.term) return *side.term;
  if (sort == Sort::shape) return Shape::var(side.bare);
  return Dim::var(side.bare);
}

}  // namespace

ConstraintSet parse_constraints(std::string_view text) {
  std::vector<RawConstraint> raw;
  std::map<std::string, Sort> sorts;

  std::size_t line_start = 0;
  for (int line_no = 1; line_start <= text.size(); ++line_no) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string_view line = text.substr(line_start, line_end - line_start);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::size_t pos = skip_ws(line, 0);
    if (pos < line.size()) {
      RawConstraint rc;
      rc.line = line_no;
      rc.offset = line_start + pos;
      rc.lhs = parse_side(line, pos, line_no);
      pos = skip_ws(line, pos);
      if (pos >= line.size() || line[pos] != '=') {
        throw ConstraintFileError("expected '='", line_no, static_cast<int>(pos) + 1);
      }
      ++pos;
      rc.rhs = parse_side(line, pos, line_no);
      pos = skip_ws(line, pos);
      if (pos < line.size()) {
        throw ConstraintFileError("unexpected trailing input", line_no, static_cast<int>(pos) + 1);
      }
      rc.length = line.size() - (rc.offset - line_start);
      for (const RawSide* side : {&rc.lhs, &rc.rhs}) {
        if (side->term) note_sorts(sorts, *side->term, line_no);
      }
      raw.push_back(std::move(rc));
    }
    line_start = line_end + 1;
  }

  // Propagate sorts through bare-identifier equations until stable.
  for (bool changed = true; changed;) {
    changed = false;
    for (const RawConstraint& rc : raw) {
      auto ls = side_sort(rc.lhs, sorts);
      auto rs = side_sort(rc.rhs, sorts);
      if (ls && !rs) {
        note_sort(sorts, rc.rhs.bare, *ls, rc.line);
        changed = true;
      } else if (rs && !ls) {
        note_sort(sorts, rc.lhs.bare, *rs, rc.line);
        changed = true;
      }
    }
  }

  ConstraintSet set;
  for (const RawConstraint& rc : raw) {
    Sort ls = side_sort(rc.lhs, sorts).value_or(Sort::dim);
    Sort rs = side_sort(rc.rhs, sorts).value_or(Sort::dim);
    if (ls != rs) throw ConstraintFileError("constraint equates a shape with a dimension", rc.line, 1);
    Span span{rc.offset, rc.length, rc.line, 1};
    set.add(Constraint{materialize(rc.lhs, ls), materialize(rc.rhs, rs),
                       Origin{"line " + std::to_string(rc.line), span}});
  }
  return set;
}

}  // namespace axon
