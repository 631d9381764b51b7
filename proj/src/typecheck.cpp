#include "axon/typecheck.hpp"

#include <algorithm>

namespace axon {

// ---------------------------------------------------------------------------
// InferState

std::string InferState::fresh(VarSort sort) {
  static constexpr const char* kPrefix[] = {"$t", "$e", "$s", "$d"};
  return kPrefix[static_cast<int>(sort)] + std::to_string(++counter);
}

ElemType InferState::resolve(const ElemType& e) const {
  ElemType current = e;
  while (current.is_var) {
    auto it = elems.find(current.name);
    if (it == elems.end()) break;
    current = it->second;
  }
  return current;
}

Shape InferState::resolve(const Shape& s) const { return substitute(s, shapes); }

Type InferState::resolve(const Type& t) const {
  TypeMapper mapper;
  mapper.var = [this](const TypeVar& v) {
    auto it = types.find(v.name);
    return it == types.end() ? Type::var(v.name) : resolve(it->second);
  };
  mapper.elem = [this](const ElemType& e) { return resolve(e); };
  mapper.shape = [this](const Shape& s) { return resolve(s); };
  return map_type(t, mapper);
}

void InferState::add_constraint(const Shape& lhs, const Shape& rhs) {
  constraints.add(Constraint{resolve(lhs), resolve(rhs), origin});
}

namespace {

Renamer message_renamer(const InferState& state) { return Renamer(state.hints); }

void transfer_hint(std::map<std::string, std::string>& hints, const std::string& from, const std::string& to) {
  auto it = hints.find(from);
  if (it != hints.end() && !hints.count(to)) hints[to] = it->second;
}

}  // namespace

void InferState::solve() {
  SolveOutcome outcome = axon::solve(constraints, solve_options);
  if (auto* failed = std::get_if<Failed>(&outcome)) {
    Renamer names = message_renamer(*this);
    std::string message = "shape mismatch";
    if (!failed->offender.origin.source.empty()) message += " in " + failed->offender.origin.source;
    message += ": " + names.display(failed->offender) + " (" + std::string(rule_name(failed->rule)) + ": " +
               failed->message + ")";
    throw TypeError(message, failed->offender.origin.span, failed->rule);
  }
  Solved& solved = std::get<Solved>(outcome);
  for (const auto& [name, term] : solved.substitution) {
    if (const auto* s = std::get_if<Shape>(&term); s && s->is_var()) transfer_hint(hints, name, s->name());
    if (const auto* d = std::get_if<Dim>(&term); d && d->is_var()) transfer_hint(hints, name, d->name());
  }
  shapes = std::move(solved.substitution);
  constraints = std::move(solved.final_set);
  residual = std::move(solved.residual);
}

// ---------------------------------------------------------------------------
// Unification

namespace {

[[noreturn]] void mismatch(const Type& expected, const Type& actual, const InferState& state,
                           const std::string& why) {
  Renamer names = message_renamer(state);
  std::string message = why + ": expected " + names.display(state.resolve(expected)) + " but found " +
                        names.display(state.resolve(actual));
  if (!state.origin.source.empty()) message += " (in " + state.origin.source + ")";
  throw TypeError(message, state.origin.span);
}

bool occurs_type(const std::string& name, const Type& t) {
  VarList vars;
  vars.add_type(t);
  return std::any_of(vars.vars().begin(), vars.vars().end(),
                     [&](const QuantVar& v) { return v.sort == VarSort::type && v.name == name; });
}

void unify_elem(const ElemType& expected, const ElemType& actual, InferState& state, const Type& te,
                const Type& ta) {
  ElemType e = state.resolve(expected);
  ElemType a = state.resolve(actual);
  if (e == a) return;
  if (e.is_var) {
    state.elems[e.name] = a;
    if (a.is_var) transfer_hint(state.hints, e.name, a.name);
  } else if (a.is_var) {
    state.elems[a.name] = e;
  } else {
    mismatch(te, ta, state, "element type mismatch " + e.name + " vs " + a.name);
  }
}

Type shallow(const Type& t, const InferState& state) {
  const Type* current = &t;
  while (const TypeVar* v = current->as_var()) {
    auto it = state.types.find(v->name);
    if (it == state.types.end()) break;
    current = &it->second;
  }
  return *current;
}

void bind_var(const std::string& name, const Type& to, InferState& state, const Type& te, const Type& ta) {
  Type resolved = state.resolve(to);
  if (occurs_type(name, resolved)) mismatch(te, ta, state, "infinite type");
  state.types[name] = resolved;
}

}  // namespace

void unify(const Type& expected_in, const Type& actual_in, InferState& state) {
  Type expected = shallow(expected_in, state);
  Type actual = shallow(actual_in, state);

  const TypeVar* ev = expected.as_var();
  const TypeVar* av = actual.as_var();
  if (ev && av && ev->name == av->name) return;
  if (ev) return bind_var(ev->name, actual, state, expected, actual);
  if (av) return bind_var(av->name, expected, state, expected, actual);

  if (expected.node.index() != actual.node.index()) mismatch(expected, actual, state, "type mismatch");

  if (auto* et = expected.as_tensor()) {
    const TensorType& at = *actual.as_tensor();
    unify_elem(et->elem, at.elem, state, expected, actual);
    state.add_constraint(et->shape, at.shape);
  } else if (auto* et = expected.as_tuple()) {
    const TupleType& at = *actual.as_tuple();
    if (et->items.size() != at.items.size()) mismatch(expected, actual, state, "tuple size mismatch");
    for (std::size_t i = 0; i < et->items.size(); ++i) unify(et->items[i], at.items[i], state);
  } else {
    const FnType& ef = *expected.as_fn();
    const FnType& af = *actual.as_fn();
    if (ef.params.size() != af.params.size()) mismatch(expected, actual, state, "function arity mismatch");
    for (std::size_t i = 0; i < ef.params.size(); ++i) unify(ef.params[i], af.params[i], state);
    unify(*ef.result, *af.result, state);
  }
}

// ---------------------------------------------------------------------------
// Schemes

Type instantiate(const TypeScheme& scheme, InferState& state) {
  if (scheme.quantified.empty() && scheme.constraints.empty()) return scheme.body;
  std::map<std::string, std::string> fresh;
  Binding shape_binding;
  for (const QuantVar& v : scheme.quantified) {
    std::string name = state.fresh(v.sort);
    fresh[v.name] = name;
    if (v.sort == VarSort::shape) shape_binding[v.name] = Shape::var(name);
    if (v.sort == VarSort::dim) shape_binding[v.name] = Dim::var(name);
  }
  TypeMapper mapper;
  mapper.var = [&](const TypeVar& v) {
    auto it = fresh.find(v.name);
    return Type::var(it == fresh.end() ? v.name : it->second);
  };
  mapper.elem = [&](const ElemType& e) {
    if (!e.is_var) return e;
    auto it = fresh.find(e.name);
    return it == fresh.end() ? e : ElemType{it->second, true};
  };
  mapper.shape = [&](const Shape& s) { return substitute(s, shape_binding); };
  for (const Constraint& c : scheme.constraints) {
    state.constraints.add(
        Constraint{substitute(c.lhs, shape_binding), substitute(c.rhs, shape_binding), state.origin});
  }
  return map_type(scheme.body, mapper);
}

TypeScheme generalize(const Type& type, const ConstraintSet& residual, const VarList& env_free) {
  std::set<std::string> pinned;
  for (const QuantVar& v : env_free.vars()) pinned.insert(v.name);
  // A residual constraint that mentions a pinned variable pins the rest of it.
  for (bool changed = true; changed;) {
    changed = false;
    for (const Constraint& c : residual) {
      VarList vars;
      vars.add_term(c.lhs);
      vars.add_term(c.rhs);
      bool touches = std::any_of(vars.vars().begin(), vars.vars().end(),
                                 [&](const QuantVar& v) { return pinned.count(v.name); });
      if (!touches) continue;
      for (const QuantVar& v : vars.vars()) changed |= pinned.insert(v.name).second;
    }
  }

  VarList all;
  all.add_type(type);
  for (const Constraint& c : residual) {
    all.add_term(c.lhs);
    all.add_term(c.rhs);
  }
  TypeScheme scheme{{}, type, residual};
  for (const QuantVar& v : all.vars()) {
    if (!pinned.count(v.name)) scheme.quantified.push_back(v);
  }
  return scheme;
}

namespace {

Type apply_signature(const std::string& name, const TypeScheme& scheme, const std::vector<Type>& args,
                     InferState& state) {
  Type sig = instantiate(scheme, state);
  const FnType* fn = sig.as_fn();
  if (!fn) throw TypeError("'" + name + "' is not a function", state.origin.span);
  if (fn->params.size() != args.size()) {
    throw TypeError("'" + name + "' expects " + std::to_string(fn->params.size()) + " argument(s) but got " +
                        std::to_string(args.size()),
                    state.origin.span);
  }
  for (std::size_t i = 0; i < args.size(); ++i) unify(fn->params[i], args[i], state);
  state.solve();
  return *fn->result;
}

}  // namespace

Type resolve_overload(const std::string& name, const std::vector<TypeScheme>& candidates,
                      const std::vector<Type>& args, InferState& state) {
  if (candidates.size() == 1) return apply_signature(name, candidates.front(), args, state);

  std::optional<TypeError> last;
  for (const TypeScheme& candidate : candidates) {
    InferState snapshot = state;
    try {
      return apply_signature(name, candidate, args, state);
    } catch (const TypeError& e) {
      last = e;
      int counter = state.counter;
      state = std::move(snapshot);
      state.counter = counter;
    }
  }
  std::string tried;
  for (const TypeScheme& candidate : candidates) tried += "\n  " + to_string(candidate.body);
  throw TypeError(std::string(last->what()) + "\nno signature of '" + name + "' matches; tried:" + tried,
                  last->span(), last->rule());
}

// ---------------------------------------------------------------------------
// Display

namespace {

int name_space(VarSort sort) {
  switch (sort) {
    case VarSort::elem:
      return 1;
    case VarSort::type:
      return 2;
    default:
      return 0;
  }
}

std::string pool_name(int ns, std::size_t i) {
  static constexpr std::string_view kLetters = "abcdefghijklmnopqrstuvwxyz";
  static constexpr std::string_view kElems = "tuvwxyz";
  std::string_view pool = ns == 1 ? kElems : kLetters;
  std::string name(1, pool[i % pool.size()]);
  if (i >= pool.size()) name += std::to_string(i / pool.size());
  return name;
}

}  // namespace

std::string Renamer::name_for(const QuantVar& v) {
  int ns = name_space(v.sort);
  for (std::size_t i = 0;; ++i) {
    std::string candidate = pool_name(ns, i);
    if (taken_[ns].insert(candidate).second) return candidate;
  }
}

void Renamer::plan(const VarList& vars) {
  std::vector<QuantVar> pending;
  for (const QuantVar& v : vars.vars()) {
    if (assigned_.count(v.name)) continue;
    sorts_[v.name] = v.sort;
    int ns = name_space(v.sort);
    std::string hint;
    if (auto it = hints_.find(v.name); it != hints_.end()) {
      hint = it->second;
    } else if (v.name.front() != '$') {
      hint = v.name;
    }
    if (!hint.empty() && taken_[ns].insert(hint).second) {
      assigned_[v.name] = hint;
    } else {
      pending.push_back(v);
    }
  }
  for (const QuantVar& v : pending) assigned_[v.name] = name_for(v);
}

Binding Renamer::shape_binding() {
  Binding binding;
  for (const auto& [from, to] : assigned_) {
    VarSort sort = sorts_[from];
    if (sort == VarSort::shape) binding[from] = Shape::var(to);
    if (sort == VarSort::dim) binding[from] = Dim::var(to);
  }
  return binding;
}

std::string Renamer::display(const Type& t) {
  VarList vars;
  vars.add_type(t);
  plan(vars);
  Binding binding = shape_binding();
  TypeMapper mapper;
  mapper.var = [&](const TypeVar& v) { return Type::var(assigned_.at(v.name)); };
  mapper.elem = [&](const ElemType& e) { return e.is_var ? ElemType{assigned_.at(e.name), true} : e; };
  mapper.shape = [&](const Shape& s) { return substitute(s, binding); };
  return to_string(map_type(t, mapper));
}

std::string Renamer::display(const Term& t) {
  VarList vars;
  vars.add_term(t);
  plan(vars);
  return to_string(substitute(t, shape_binding()));
}

std::string Renamer::display(const Constraint& c) {
  std::string lhs = display(c.lhs);
  return lhs + " = " + display(c.rhs);
}

std::string_view status_name(BindingStatus status) {
  switch (status) {
    case BindingStatus::solved:
      return "solved";
    case BindingStatus::partial:
      return "partially-solved";
    case BindingStatus::failed:
      return "failed";
    case BindingStatus::unchecked:
      return "unchecked";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Programs

namespace {

// Thrown when a binding refers to an earlier binding that failed.
struct Unchecked {
  std::string dependency;
  Span span;
};

class Inferencer {
 public:
  Inferencer(const BuiltinTable& builtins, const InferOptions& options) : builtins_(builtins) {
    solve_options_.trace = options.trace;
  }

  InferResult run(const Program& program) {
    InferResult result;
    for (const TopBinding& binding : program.bindings) result.bindings.push_back(check(binding, result));
    return result;
  }

 private:
  BindingReport check(const TopBinding& binding, InferResult& result) {
    BindingReport report;
    report.name = binding.display_name();
    state_ = InferState{};
    state_.counter = counter_;
    state_.solve_options = solve_options_;
    scopes_.clear();
    annotation_vars_.clear();
    current_ = &binding;

    try {
      Type type = infer(*binding.expr);
      std::vector<Type> parts;
      if (binding.names.size() > 1) {
        for (std::size_t i = 0; i < binding.names.size(); ++i) parts.push_back(Type::var(state_.fresh(VarSort::type)));
        state_.origin = Origin{"tuple pattern", binding.span};
        unify(Type::tuple(parts), type, state_);
      }
      state_.origin = Origin{report.name, binding.span};
      state_.solve();

      Type resolved = state_.resolve(type);
      TypeScheme scheme = generalize(resolved, state_.residual, {});
      for (std::size_t i = 0; i < binding.names.size(); ++i) {
        const std::string& name = binding.names[i];
        if (name == "_") continue;
        Type part = parts.empty() ? resolved : state_.resolve(parts[i]);
        env_[name] = generalize(part, state_.residual, {});
      }

      Renamer names(state_.hints);
      report.signature = names.display(resolved);
      for (const Constraint& c : state_.residual) report.residual.push_back(names.display(c));
      report.status = report.residual.empty() ? BindingStatus::solved : BindingStatus::partial;
      report.scheme = std::move(scheme);
    } catch (const TypeError& e) {
      report.status = BindingStatus::failed;
      result.diagnostics.push_back(Diagnostic{"error", e.span(), e.what(), e.rule()});
      mark_failed(binding);
    } catch (const Unchecked& u) {
      report.status = BindingStatus::unchecked;
      result.diagnostics.push_back(Diagnostic{
          "note", u.span, "'" + report.name + "' was not checked because '" + u.dependency + "' failed", {}});
      mark_failed(binding);
    }
    counter_ = state_.counter;
    return report;
  }

  void mark_failed(const TopBinding& binding) {
    for (const std::string& name : binding.names) {
      if (name != "_") failed_.insert(name);
    }
  }

  // ---- scopes ----

  const Type* local(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return &found->second;
    }
    return nullptr;
  }

  void bind_local(const std::string& name, Type type) {
    if (name != "_") scopes_.back()[name] = std::move(type);
  }

  // Global lookup shared by references and calls. Returns the instantiated
  // candidates' owner name for builtins through `overloads`.
  std::optional<Type> global(const std::string& name, Span span, const std::vector<TypeScheme>** overloads) {
    const auto& names = current_->names;
    if (std::find(names.begin(), names.end(), name) != names.end()) {
      throw TypeError("'" + name + "' refers to itself; recursive definitions are not supported", span);
    }
    if (failed_.count(name)) throw Unchecked{name, span};
    if (auto it = env_.find(name); it != env_.end()) return instantiate(it->second, state_);
    if (const auto* candidates = builtins_.find(name)) {
      *overloads = candidates;
      return std::nullopt;
    }
    throw TypeError("unbound identifier '" + name + "'", span);
  }

  // ---- annotations ----

  std::string annotation_var(const std::string& name, VarSort sort, Span span) {
    bool elem = sort == VarSort::elem;
    auto key = std::string(elem ? "e:" : "s:") + name;
    if (auto it = annotation_vars_.find(key); it != annotation_vars_.end()) {
      if (it->second.sort != sort) {
        throw TypeError("'" + name + "' is used both as a shape and as a dimension", span);
      }
      return it->second.name;
    }
    std::string internal = state_.fresh(sort);
    state_.hints[internal] = name;
    annotation_vars_[key] = QuantVar{internal, sort};
    return internal;
  }

  Type from_annotation(const Annotation& ann) {
    if (ann.is_tuple()) {
      std::vector<Type> items;
      for (const Annotation& item : ann.tuple) items.push_back(from_annotation(item));
      return Type::tuple(std::move(items));
    }
    ElemType elem;
    if (!ann.element) {
      elem = ElemType{state_.fresh(VarSort::elem), true};
    } else if (is_element_type_name(*ann.element)) {
      elem = ElemType{*ann.element, false};
    } else {
      elem = ElemType{annotation_var(*ann.element, VarSort::elem, ann.span), true};
    }
    Shape shape;
    if (ann.shape) {
      std::set<std::string> shape_vars, dim_vars;
      collect_vars(*ann.shape, shape_vars, dim_vars);
      Binding binding;
      for (const auto& n : shape_vars) binding[n] = Shape::var(annotation_var(n, VarSort::shape, ann.span));
      for (const auto& n : dim_vars) binding[n] = Dim::var(annotation_var(n, VarSort::dim, ann.span));
      try {
        shape = substitute(*ann.shape, binding);
      } catch (const ShapeError& e) {
        throw TypeError(e.what(), ann.span);
      }
    }
    return Type::tensor(std::move(elem), std::move(shape));
  }

  // ---- expressions ----

  Type infer(const Expr& e) {
    return std::visit([&](const auto& node) { return infer_node(node, e.span); }, e.node);
  }

  Type infer_node(const Literal& lit, Span) {
    if (lit.kind == Literal::Kind::integer) return Type::tensor(ElemType{"i32", false}, Shape());
    return Type::tensor(ElemType{state_.fresh(VarSort::elem), true}, Shape());
  }

  Type infer_node(const VarRef& ref, Span span) {
    if (const Type* t = local(ref.name)) return *t;
    const std::vector<TypeScheme>* overloads = nullptr;
    Origin saved = state_.origin;
    state_.origin = Origin{ref.name, span};
    std::optional<Type> t = global(ref.name, span, &overloads);
    // An overloaded builtin passed as a value takes its first signature.
    if (!t) t = instantiate(overloads->front(), state_);
    state_.origin = saved;
    return *t;
  }

  Type infer_node(const TupleExpr& tuple, Span) {
    std::vector<Type> items;
    for (const ExprPtr& item : tuple.elements) items.push_back(infer(*item));
    return Type::tuple(std::move(items));
  }

  Type infer_node(const BinOp& op, Span span) {
    std::vector<Type> args{infer(*op.lhs), infer(*op.rhs)};
    return call(std::string(1, op.op), span, args);
  }

  Type infer_node(const Call& c, Span span) {
    std::vector<Type> args;
    for (const ExprPtr& arg : c.args) args.push_back(infer(*arg));
    return call(c.callee, span, args);
  }

  Type call(const std::string& callee, Span span, const std::vector<Type>& args) {
    Origin saved = state_.origin;
    state_.origin = Origin{callee, span};
    Type result = [&]() -> Type {
      if (const Type* t = local(callee)) {
        Type fn = state_.resolve(*t);
        if (fn.as_var()) {
          Type out = Type::var(state_.fresh(VarSort::type));
          unify(fn, Type::fn(args, out), state_);
          state_.solve();
          return out;
        }
        return resolve_overload(callee, {TypeScheme{{}, fn, {}}}, args, state_);
      }
      const std::vector<TypeScheme>* overloads = nullptr;
      std::optional<Type> t = global(callee, span, &overloads);
      if (overloads) return resolve_overload(callee, *overloads, args, state_);
      return resolve_overload(callee, {TypeScheme{{}, *t, {}}}, args, state_);
    }();
    state_.origin = saved;
    return result;
  }

  Type infer_node(const FnExpr& fn, Span) {
    scopes_.emplace_back();
    std::vector<Type> params;
    for (const Param& p : fn.params) {
      Type t = p.annotation ? from_annotation(*p.annotation) : Type::var(state_.fresh(VarSort::type));
      bind_local(p.name, t);
      params.push_back(std::move(t));
    }
    for (const Let& let : fn.body.lets) {
      Type value = infer(*let.value);
      if (let.names.size() == 1) {
        bind_local(let.names.front(), value);
        continue;
      }
      std::vector<Type> items;
      for (std::size_t i = 0; i < let.names.size(); ++i) items.push_back(Type::var(state_.fresh(VarSort::type)));
      Origin saved = state_.origin;
      state_.origin = Origin{"tuple pattern", let.span};
      unify(Type::tuple(items), value, state_);
      state_.origin = saved;
      for (std::size_t i = 0; i < let.names.size(); ++i) bind_local(let.names[i], items[i]);
    }
    Type result = infer(*fn.body.result);
    if (fn.result_annotation) {
      Type annotated = from_annotation(*fn.result_annotation);
      Origin saved = state_.origin;
      state_.origin = Origin{"user annotation", fn.result_annotation->span};
      unify(result, annotated, state_);
      state_.solve();
      state_.origin = saved;
    }
    scopes_.pop_back();
    return Type::fn(std::move(params), std::move(result));
  }

  const BuiltinTable& builtins_;
  SolveOptions solve_options_;
  std::map<std::string, TypeScheme> env_;
  std::set<std::string> failed_;
  int counter_ = 0;

  InferState state_;
  std::vector<std::map<std::string, Type>> scopes_;
  std::map<std::string, QuantVar> annotation_vars_;
  const TopBinding* current_ = nullptr;
};

}  // namespace

InferResult infer_program(const Program& program, const BuiltinTable& builtins, const InferOptions& options) {
  return Inferencer(builtins, options).run(program);
}

}  // namespace axon
