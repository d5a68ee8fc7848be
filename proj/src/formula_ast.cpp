#include "dynet/formula_ast.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dynet::ast {

// ---------------------------------------------------------------------------
// Sort

Sort Sort::int_sort() {
    Sort s;
    s.kind_ = Kind::Int;
    return s;
}

Sort Sort::bool_sort() {
    Sort s;
    s.kind_ = Kind::Bool;
    return s;
}

Sort Sort::array(Sort index, Sort value) {
    Sort s;
    s.kind_ = Kind::Array;
    s.index_ = std::make_shared<Sort>(std::move(index));
    s.value_ = std::make_shared<Sort>(std::move(value));
    return s;
}

Sort Sort::datatype(std::string name) {
    Sort s;
    s.kind_ = Kind::Datatype;
    s.name_ = std::move(name);
    return s;
}

const std::string& Sort::name() const {
    if (kind_ != Kind::Datatype) throw std::logic_error("Sort::name on non-datatype sort");
    return name_;
}

const Sort& Sort::index() const {
    if (kind_ != Kind::Array) throw std::logic_error("Sort::index on non-array sort");
    return *index_;
}

const Sort& Sort::value() const {
    if (kind_ != Kind::Array) throw std::logic_error("Sort::value on non-array sort");
    return *value_;
}

std::string Sort::to_string() const {
    switch (kind_) {
        case Kind::Int: return "Int";
        case Kind::Bool: return "Bool";
        case Kind::Datatype: return name_;
        case Kind::Array:
            return "(Array " + index_->to_string() + " " + value_->to_string() + ")";
    }
    return "?";
}

bool Sort::operator==(const Sort& other) const {
    if (kind_ != other.kind_) return false;
    switch (kind_) {
        case Kind::Int:
        case Kind::Bool: return true;
        case Kind::Datatype: return name_ == other.name_;
        case Kind::Array: return *index_ == *other.index_ && *value_ == *other.value_;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Term

struct Term::Node {
    Kind kind;
    std::string symbol;             // literal spelling or symbol name
    Sort sort{Sort::int_sort()};    // Var only
    std::vector<Term> args;
    std::vector<SortedVar> binders;  // quantifiers only
};

namespace {

Term make_node(Term::Kind kind, std::string symbol, std::vector<Term> args,
               std::vector<SortedVar> binders = {});

struct TermAccess;

}  // namespace

Term Term::int_lit(std::int64_t value) { return int_lit(std::to_string(value)); }

Term Term::int_lit(std::string decimal_digits) {
    if (decimal_digits.empty()) throw std::invalid_argument("empty integer literal");
    std::size_t start = decimal_digits[0] == '-' ? 1 : 0;
    if (start == decimal_digits.size()) throw std::invalid_argument("bare '-' literal");
    for (std::size_t i = start; i < decimal_digits.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(decimal_digits[i]))) {
            throw std::invalid_argument("malformed integer literal: " + decimal_digits);
        }
    }
    auto node = std::make_shared<Node>();
    node->kind = Kind::IntLit;
    node->symbol = std::move(decimal_digits);
    return Term(std::move(node));
}

Term Term::bool_lit(bool value) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::BoolLit;
    node->symbol = value ? "true" : "false";
    return Term(std::move(node));
}

Term Term::var(std::string name, Sort sort) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Var;
    node->symbol = std::move(name);
    node->sort = std::move(sort);
    return Term(std::move(node));
}

namespace {

std::shared_ptr<const Term::Node> build(Term::Kind kind, std::string symbol,
                                        std::vector<Term> args, std::vector<SortedVar> binders) {
    auto node = std::make_shared<Term::Node>();
    node->kind = kind;
    node->symbol = std::move(symbol);
    node->args = std::move(args);
    node->binders = std::move(binders);
    return node;
}

}  // namespace

Term Term::apply(std::string function, std::vector<Term> args) {
    return Term(build(Kind::Apply, std::move(function), std::move(args), {}));
}

Term Term::select(Term array, Term index) {
    return Term(build(Kind::Select, "select", {std::move(array), std::move(index)}, {}));
}

Term Term::store(Term array, Term index, Term value) {
    return Term(
        build(Kind::Store, "store", {std::move(array), std::move(index), std::move(value)}, {}));
}

Term Term::constructor(std::string name, std::vector<Term> args) {
    return Term(build(Kind::Constructor, std::move(name), std::move(args), {}));
}

Term Term::selector(std::string name, Term arg) {
    return Term(build(Kind::Selector, std::move(name), {std::move(arg)}, {}));
}

Term Term::add(Term lhs, Term rhs) {
    return Term(build(Kind::Add, "+", {std::move(lhs), std::move(rhs)}, {}));
}

Term Term::sub(Term lhs, Term rhs) {
    return Term(build(Kind::Sub, "-", {std::move(lhs), std::move(rhs)}, {}));
}

Term Term::eq(Term lhs, Term rhs) {
    return Term(build(Kind::Eq, "=", {std::move(lhs), std::move(rhs)}, {}));
}

Term Term::ne(Term lhs, Term rhs) { return not_of(eq(std::move(lhs), std::move(rhs))); }

Term Term::lt(Term lhs, Term rhs) {
    return Term(build(Kind::Lt, "<", {std::move(lhs), std::move(rhs)}, {}));
}

Term Term::le(Term lhs, Term rhs) {
    return Term(build(Kind::Le, "<=", {std::move(lhs), std::move(rhs)}, {}));
}

Term Term::gt(Term lhs, Term rhs) {
    return Term(build(Kind::Gt, ">", {std::move(lhs), std::move(rhs)}, {}));
}

Term Term::ge(Term lhs, Term rhs) {
    return Term(build(Kind::Ge, ">=", {std::move(lhs), std::move(rhs)}, {}));
}

Term Term::and_of(std::vector<Term> args) {
    if (args.empty()) return bool_lit(true);
    if (args.size() == 1) return std::move(args.front());
    return Term(build(Kind::And, "and", std::move(args), {}));
}

Term Term::or_of(std::vector<Term> args) {
    if (args.empty()) return bool_lit(false);
    if (args.size() == 1) return std::move(args.front());
    return Term(build(Kind::Or, "or", std::move(args), {}));
}

Term Term::not_of(Term arg) { return Term(build(Kind::Not, "not", {std::move(arg)}, {})); }

Term Term::implies(Term lhs, Term rhs) {
    return Term(build(Kind::Implies, "=>", {std::move(lhs), std::move(rhs)}, {}));
}

Term Term::forall(std::vector<SortedVar> binders, Term body) {
    return Term(build(Kind::Forall, "forall", {std::move(body)}, std::move(binders)));
}

Term Term::exists(std::vector<SortedVar> binders, Term body) {
    return Term(build(Kind::Exists, "exists", {std::move(body)}, std::move(binders)));
}

Term Term::raw_bool(std::string text) {
    return Term(build(Kind::RawBool, std::move(text), {}, {}));
}

Term::Kind Term::kind() const noexcept { return node_->kind; }
const std::string& Term::symbol() const { return node_->symbol; }
const Sort& Term::var_sort() const { return node_->sort; }
const std::vector<Term>& Term::args() const { return node_->args; }
const std::vector<SortedVar>& Term::binders() const { return node_->binders; }

// ---------------------------------------------------------------------------
// Script

void Script::declare_datatype(DatatypeDecl decl) { declarations_.push_back(std::move(decl)); }

void Script::declare_fun(std::string name, std::vector<Sort> params, Sort result) {
    declarations_.push_back(FunDecl{std::move(name), std::move(params), std::move(result)});
}

void Script::declare_const(std::string name, Sort sort) {
    declarations_.push_back(ConstDecl{std::move(name), std::move(sort)});
}

void Script::assert_term(Term term) { assertions_.push_back(std::move(term)); }

// ---------------------------------------------------------------------------
// sort_check

namespace {

struct CheckFail {
    SortError error;
};

struct SymbolTable {
    std::map<std::string, const DatatypeDecl*> datatypes;
    std::map<std::string, std::pair<const DatatypeDecl*, const DatatypeConstructor*>> constructors;
    std::map<std::string, std::pair<const DatatypeDecl*, const DatatypeField*>> selectors;
    std::map<std::string, const FunDecl*> funs;
    std::map<std::string, const ConstDecl*> consts;
    std::map<std::string, std::string> taken;  // symbol -> role, for duplicate reporting
};

std::string join_path(const std::vector<std::string>& path) {
    std::string out;
    for (const auto& part : path) {
        if (!out.empty()) out += " / ";
        out += part;
    }
    return out;
}

[[noreturn]] void check_fail(const std::vector<std::string>& path, std::string message) {
    throw CheckFail{SortError{join_path(path), std::move(message)}};
}

void claim_symbol(SymbolTable& table, const std::string& name, const std::string& role,
                  const std::vector<std::string>& path) {
    auto [it, inserted] = table.taken.insert({name, role});
    if (!inserted) {
        check_fail(path, "symbol '" + name + "' already declared as " + it->second);
    }
}

void resolve_sort(const SymbolTable& table, const Sort& sort,
                  const std::vector<std::string>& path) {
    switch (sort.kind()) {
        case Sort::Kind::Int:
        case Sort::Kind::Bool: return;
        case Sort::Kind::Array:
            resolve_sort(table, sort.index(), path);
            resolve_sort(table, sort.value(), path);
            return;
        case Sort::Kind::Datatype:
            if (!table.datatypes.contains(sort.name())) {
                check_fail(path, "unknown datatype sort '" + sort.name() + "'");
            }
            return;
    }
}

void register_declaration(SymbolTable& table, const Declaration& decl,
                          const std::vector<std::string>& path) {
    if (const auto* dt = std::get_if<DatatypeDecl>(&decl)) {
        claim_symbol(table, dt->name, "datatype", path);
        table.datatypes[dt->name] = dt;
        for (const auto& ctor : dt->constructors) {
            claim_symbol(table, ctor.name, "constructor", path);
            table.constructors[ctor.name] = {dt, &ctor};
            for (const auto& field : ctor.fields) {
                claim_symbol(table, field.selector, "selector", path);
                table.selectors[field.selector] = {dt, &field};
                resolve_sort(table, field.sort, path);
            }
        }
    } else if (const auto* fn = std::get_if<FunDecl>(&decl)) {
        claim_symbol(table, fn->name, "function", path);
        for (const auto& p : fn->params) resolve_sort(table, p, path);
        resolve_sort(table, fn->result, path);
        table.funs[fn->name] = fn;
    } else {
        const auto& c = std::get<ConstDecl>(decl);
        claim_symbol(table, c.name, "constant", path);
        resolve_sort(table, c.sort, path);
        table.consts[c.name] = &c;
    }
}

class SortChecker {
public:
    explicit SortChecker(const SymbolTable& table) : table_(table) {}

    Sort infer(const Term& t, std::vector<std::string>& path) {
        switch (t.kind()) {
            case Term::Kind::IntLit: return Sort::int_sort();
            case Term::Kind::BoolLit: return Sort::bool_sort();
            case Term::Kind::RawBool: return Sort::bool_sort();
            case Term::Kind::Var: return infer_var(t, path);
            case Term::Kind::Apply: return infer_apply(t, path);
            case Term::Kind::Select: return infer_select(t, path);
            case Term::Kind::Store: return infer_store(t, path);
            case Term::Kind::Constructor: return infer_constructor(t, path);
            case Term::Kind::Selector: return infer_selector(t, path);
            case Term::Kind::Add:
            case Term::Kind::Sub: return infer_arith(t, path);
            case Term::Kind::Eq: return infer_eq(t, path);
            case Term::Kind::Lt:
            case Term::Kind::Le:
            case Term::Kind::Gt:
            case Term::Kind::Ge: return infer_comparison(t, path);
            case Term::Kind::And:
            case Term::Kind::Or:
            case Term::Kind::Not:
            case Term::Kind::Implies: return infer_boolean(t, path);
            case Term::Kind::Forall:
            case Term::Kind::Exists: return infer_quantifier(t, path);
        }
        check_fail(path, "unhandled term kind");
    }

private:
    Sort expect(const Term& t, const Sort& want, std::vector<std::string>& path,
                const std::string& where) {
        path.push_back(where);
        const Sort got = infer(t, path);
        if (got != want) {
            check_fail(path, "expected sort " + want.to_string() + ", got " + got.to_string());
        }
        path.pop_back();
        return got;
    }

    Sort infer_var(const Term& t, std::vector<std::string>& path) {
        for (auto it = bound_.rbegin(); it != bound_.rend(); ++it) {
            if (it->name == t.symbol()) {
                if (it->sort != t.var_sort()) {
                    check_fail(path, "variable '" + t.symbol() + "' used at sort " +
                                         t.var_sort().to_string() + " but bound at " +
                                         it->sort.to_string());
                }
                return it->sort;
            }
        }
        if (auto it = table_.consts.find(t.symbol()); it != table_.consts.end()) {
            if (it->second->sort != t.var_sort()) {
                check_fail(path, "constant '" + t.symbol() + "' used at sort " +
                                     t.var_sort().to_string() + " but declared at " +
                                     it->second->sort.to_string());
            }
            return it->second->sort;
        }
        check_fail(path, "undeclared variable or constant '" + t.symbol() + "'");
    }

    Sort infer_apply(const Term& t, std::vector<std::string>& path) {
        auto it = table_.funs.find(t.symbol());
        if (it == table_.funs.end()) {
            check_fail(path, "undeclared function '" + t.symbol() + "'");
        }
        const FunDecl& fn = *it->second;
        if (fn.params.size() != t.args().size()) {
            check_fail(path, "function '" + fn.name + "' expects " +
                                 std::to_string(fn.params.size()) + " arguments, got " +
                                 std::to_string(t.args().size()));
        }
        for (std::size_t i = 0; i < t.args().size(); ++i) {
            expect(t.args()[i], fn.params[i], path,
                   fn.name + " arg " + std::to_string(i));
        }
        return fn.result;
    }

    Sort infer_select(const Term& t, std::vector<std::string>& path) {
        path.push_back("select array");
        const Sort array = infer(t.args()[0], path);
        if (array.kind() != Sort::Kind::Array) {
            check_fail(path, "select on non-array sort " + array.to_string());
        }
        path.pop_back();
        expect(t.args()[1], array.index(), path, "select index");
        return array.value();
    }

    Sort infer_store(const Term& t, std::vector<std::string>& path) {
        path.push_back("store array");
        const Sort array = infer(t.args()[0], path);
        if (array.kind() != Sort::Kind::Array) {
            check_fail(path, "store on non-array sort " + array.to_string());
        }
        path.pop_back();
        expect(t.args()[1], array.index(), path, "store index");
        expect(t.args()[2], array.value(), path, "store value");
        return array;
    }

    Sort infer_constructor(const Term& t, std::vector<std::string>& path) {
        auto it = table_.constructors.find(t.symbol());
        if (it == table_.constructors.end()) {
            check_fail(path, "undeclared constructor '" + t.symbol() + "'");
        }
        const auto& [datatype, ctor] = it->second;
        if (ctor->fields.size() != t.args().size()) {
            check_fail(path, "constructor '" + ctor->name + "' expects " +
                                 std::to_string(ctor->fields.size()) + " arguments, got " +
                                 std::to_string(t.args().size()));
        }
        for (std::size_t i = 0; i < t.args().size(); ++i) {
            expect(t.args()[i], ctor->fields[i].sort, path,
                   ctor->name + " field " + ctor->fields[i].selector);
        }
        return Sort::datatype(datatype->name);
    }

    Sort infer_selector(const Term& t, std::vector<std::string>& path) {
        auto it = table_.selectors.find(t.symbol());
        if (it == table_.selectors.end()) {
            check_fail(path, "undeclared selector '" + t.symbol() + "'");
        }
        const auto& [datatype, field] = it->second;
        expect(t.args()[0], Sort::datatype(datatype->name), path, t.symbol() + " argument");
        return field->sort;
    }

    Sort infer_arith(const Term& t, std::vector<std::string>& path) {
        expect(t.args()[0], Sort::int_sort(), path, t.symbol() + " arg 0");
        expect(t.args()[1], Sort::int_sort(), path, t.symbol() + " arg 1");
        return Sort::int_sort();
    }

    Sort infer_eq(const Term& t, std::vector<std::string>& path) {
        path.push_back("= arg 0");
        const Sort lhs = infer(t.args()[0], path);
        path.pop_back();
        path.push_back("= arg 1");
        const Sort rhs = infer(t.args()[1], path);
        if (lhs != rhs) {
            check_fail(path, "equality between different sorts " + lhs.to_string() + " and " +
                                 rhs.to_string());
        }
        path.pop_back();
        return Sort::bool_sort();
    }

    Sort infer_comparison(const Term& t, std::vector<std::string>& path) {
        expect(t.args()[0], Sort::int_sort(), path, t.symbol() + " arg 0");
        expect(t.args()[1], Sort::int_sort(), path, t.symbol() + " arg 1");
        return Sort::bool_sort();
    }

    Sort infer_boolean(const Term& t, std::vector<std::string>& path) {
        for (std::size_t i = 0; i < t.args().size(); ++i) {
            expect(t.args()[i], Sort::bool_sort(), path,
                   t.symbol() + " arg " + std::to_string(i));
        }
        return Sort::bool_sort();
    }

    Sort infer_quantifier(const Term& t, std::vector<std::string>& path) {
        if (t.binders().empty()) check_fail(path, "quantifier with no bound variables");
        for (const auto& binder : t.binders()) {
            resolve_sort(table_, binder.sort, path);
            bound_.push_back(binder);
        }
        expect(t.args()[0], Sort::bool_sort(), path, t.symbol() + " body");
        bound_.resize(bound_.size() - t.binders().size());
        return Sort::bool_sort();
    }

    const SymbolTable& table_;
    std::vector<SortedVar> bound_;
};

}  // namespace

std::optional<SortError> sort_check(const Script& script) {
    try {
        SymbolTable table;
        for (std::size_t i = 0; i < script.declarations().size(); ++i) {
            std::vector<std::string> path{"declaration " + std::to_string(i)};
            register_declaration(table, script.declarations()[i], path);
        }
        SortChecker checker(table);
        for (std::size_t i = 0; i < script.assertions().size(); ++i) {
            std::vector<std::string> path{"assertion " + std::to_string(i)};
            const Sort sort = checker.infer(script.assertions()[i], path);
            if (sort != Sort::bool_sort()) {
                check_fail(path, "asserted term has sort " + sort.to_string() + ", expected Bool");
            }
        }
        return std::nullopt;
    } catch (const CheckFail& fail) {
        return fail.error;
    }
}

// ---------------------------------------------------------------------------
// rendering

namespace {

constexpr std::size_t kLineWidth = 100;

std::string render_binders(const std::vector<SortedVar>& binders) {
    std::string out = "(";
    for (std::size_t i = 0; i < binders.size(); ++i) {
        if (i > 0) out += " ";
        out += "(" + binders[i].name + " " + binders[i].sort.to_string() + ")";
    }
    out += ")";
    return out;
}

std::string render_inline(const Term& t) {
    switch (t.kind()) {
        case Term::Kind::IntLit:
            if (t.symbol()[0] == '-') return "(- " + t.symbol().substr(1) + ")";
            return t.symbol();
        case Term::Kind::BoolLit:
        case Term::Kind::Var:
        case Term::Kind::RawBool: return t.symbol();
        case Term::Kind::Forall:
        case Term::Kind::Exists:
            return "(" + t.symbol() + " " + render_binders(t.binders()) + " " +
                   render_inline(t.args()[0]) + ")";
        default: {
            if (t.args().empty()) return t.symbol();
            std::string out = "(" + t.symbol();
            for (const auto& arg : t.args()) out += " " + render_inline(arg);
            out += ")";
            return out;
        }
    }
}

// Wrapped rendering: fits on one line when short, otherwise puts each
// argument on its own line, two spaces deeper; closing parens stack on
// the final line.
void render_wrapped(const Term& t, std::size_t indent, std::string& out) {
    const std::string flat = render_inline(t);
    const std::string pad(indent, ' ');
    if (indent + flat.size() <= kLineWidth || t.args().empty()) {
        out += pad + flat;
        return;
    }
    switch (t.kind()) {
        case Term::Kind::Forall:
        case Term::Kind::Exists: {
            out += pad + "(" + t.symbol() + " " + render_binders(t.binders()) + "\n";
            render_wrapped(t.args()[0], indent + 2, out);
            out += ")";
            return;
        }
        default: {
            out += pad + "(" + t.symbol() + "\n";
            for (std::size_t i = 0; i < t.args().size(); ++i) {
                render_wrapped(t.args()[i], indent + 2, out);
                if (i + 1 < t.args().size()) out += "\n";
            }
            out += ")";
            return;
        }
    }
}

std::string render_declaration(const Declaration& decl) {
    if (const auto* dt = std::get_if<DatatypeDecl>(&decl)) {
        std::string out = "(declare-datatypes () ((" + dt->name;
        for (const auto& ctor : dt->constructors) {
            out += " (" + ctor.name;
            for (const auto& field : ctor.fields) {
                out += " (" + field.selector + " " + field.sort.to_string() + ")";
            }
            out += ")";
        }
        out += ")))";
        return out;
    }
    if (const auto* fn = std::get_if<FunDecl>(&decl)) {
        std::string out = "(declare-fun " + fn->name + " (";
        for (std::size_t i = 0; i < fn->params.size(); ++i) {
            if (i > 0) out += " ";
            // datatype params carry the extra parens of the reference
            // output style, e.g. ((Edge)); solvers read (Edge) as a
            // zero-argument sort application
            if (fn->params[i].kind() == Sort::Kind::Datatype) {
                out += "(" + fn->params[i].to_string() + ")";
            } else {
                out += fn->params[i].to_string();
            }
        }
        out += ") " + fn->result.to_string() + ")";
        return out;
    }
    const auto& c = std::get<ConstDecl>(decl);
    return "(declare-const " + c.name + " " + c.sort.to_string() + ")";
}

}  // namespace

std::string render_term(const Term& term) { return render_inline(term); }

std::string render_smtlib(const Script& script) {
    std::string out;
    for (const auto& decl : script.declarations()) {
        out += render_declaration(decl) + "\n";
    }
    for (const auto& term : script.assertions()) {
        const std::string flat = "(assert " + render_inline(term) + ")";
        if (flat.size() <= kLineWidth) {
            out += flat + "\n";
        } else {
            out += "(assert\n";
            render_wrapped(term, 2, out);
            out += ")\n";
        }
    }
    return out;
}

}  // namespace dynet::ast
