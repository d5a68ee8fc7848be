#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dynet::ast {

/// Sort of a term: Int, Bool, (Array index value), or a datatype
/// referenced by name. Datatype constructors live in the script's
/// declaration, not in the sort reference.
class Sort {
public:
    enum class Kind { Int, Bool, Array, Datatype };

    static Sort int_sort();
    static Sort bool_sort();
    static Sort array(Sort index, Sort value);
    static Sort datatype(std::string name);

    Kind kind() const noexcept { return kind_; }
    const std::string& name() const;   // datatype only
    const Sort& index() const;         // array only
    const Sort& value() const;         // array only

    std::string to_string() const;  // SMT-LIB spelling

    bool operator==(const Sort& other) const;
    bool operator!=(const Sort& other) const { return !(*this == other); }

private:
    Kind kind_{Kind::Int};
    std::string name_;
    std::shared_ptr<const Sort> index_;
    std::shared_ptr<const Sort> value_;
};

struct SortedVar {
    std::string name;
    Sort sort;
};

/// Immutable MSFOL term. A closed fragment: integer/boolean literals,
/// sorted variables, uninterpreted function application, array
/// select/store, datatype constructor/selector application, +/-,
/// comparisons, boolean connectives, and sorted quantifiers.
class Term {
public:
    enum class Kind {
        IntLit,
        BoolLit,
        Var,
        Apply,
        Select,
        Store,
        Constructor,
        Selector,
        Add,
        Sub,
        Eq,
        Lt,
        Le,
        Gt,
        Ge,
        And,
        Or,
        Not,
        Implies,
        Forall,
        Exists,
        RawBool,
    };

    static Term int_lit(std::int64_t value);
    static Term int_lit(std::string decimal_digits);  // arbitrary precision
    static Term bool_lit(bool value);
    static Term var(std::string name, Sort sort);
    static Term apply(std::string function, std::vector<Term> args);
    static Term select(Term array, Term index);
    static Term store(Term array, Term index, Term value);
    static Term constructor(std::string name, std::vector<Term> args);
    static Term selector(std::string name, Term arg);
    static Term add(Term lhs, Term rhs);
    static Term sub(Term lhs, Term rhs);
    static Term eq(Term lhs, Term rhs);
    static Term ne(Term lhs, Term rhs);  // sugar for (not (= a b))
    static Term lt(Term lhs, Term rhs);
    static Term le(Term lhs, Term rhs);
    static Term gt(Term lhs, Term rhs);
    static Term ge(Term lhs, Term rhs);
    static Term and_of(std::vector<Term> args);  // empty -> true, single -> arg
    static Term or_of(std::vector<Term> args);   // empty -> false, single -> arg
    static Term not_of(Term arg);
    static Term implies(Term lhs, Term rhs);
    static Term forall(std::vector<SortedVar> binders, Term body);
    static Term exists(std::vector<SortedVar> binders, Term body);
    // Verbatim SMT-LIB text treated as a Bool term. Escape hatch for
    // user-supplied properties; inner symbols bypass sort_check.
    static Term raw_bool(std::string text);

    Kind kind() const noexcept;
    const std::string& symbol() const;            // literal text / symbol name
    const Sort& var_sort() const;                 // Var only
    const std::vector<Term>& args() const;
    const std::vector<SortedVar>& binders() const;  // quantifiers only

private:
    struct Node;
    explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct DatatypeField {
    std::string selector;
    Sort sort;
};

struct DatatypeConstructor {
    std::string name;
    std::vector<DatatypeField> fields;
};

struct DatatypeDecl {
    std::string name;
    std::vector<DatatypeConstructor> constructors;
};

struct FunDecl {
    std::string name;
    std::vector<Sort> params;
    Sort result;
};

struct ConstDecl {
    std::string name;
    Sort sort;
};

using Declaration = std::variant<DatatypeDecl, FunDecl, ConstDecl>;

/// Ordered declarations followed by asserted Bool terms.
class Script {
public:
    void declare_datatype(DatatypeDecl decl);
    void declare_fun(std::string name, std::vector<Sort> params, Sort result);
    void declare_const(std::string name, Sort sort);
    void assert_term(Term term);

    const std::vector<Declaration>& declarations() const noexcept { return declarations_; }
    const std::vector<Term>& assertions() const noexcept { return assertions_; }

private:
    std::vector<Declaration> declarations_;
    std::vector<Term> assertions_;
};

struct SortError {
    std::string path;     // e.g. "assertion 2 / forall body / and arg 1"
    std::string message;
};

/// nullopt means the script is well-sorted: declarations are
/// well-formed, no symbol is declared twice, and every assertion is a
/// well-sorted Bool term.
std::optional<SortError> sort_check(const Script& script);

/// Deterministic SMT-LIB v2 rendering: one s-expression per line for
/// declarations; asserts wrap with two-space indentation when long.
std::string render_smtlib(const Script& script);

/// Single-line rendering of one term.
std::string render_term(const Term& term);

}  // namespace dynet::ast
