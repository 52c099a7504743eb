#pragma once

// Rank-1 constraint systems: rows <A,z> * <B,z> = <C,z> over sparse linear
// combinations. Variable 0 is the constant one; public inputs occupy a
// contiguous prefix after it, private witnesses follow.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "zkdfl/ff.hpp"

namespace zkdfl {

enum class VarKind : std::uint8_t { ConstantOne, PublicInput, PrivateWitness };

struct Variable {
    std::uint32_t index = 0;
    VarKind kind = VarKind::ConstantOne;
};

struct Term {
    std::uint32_t index;
    Fr coeff;
};

class LinearCombination {
public:
    LinearCombination() = default;
    LinearCombination(const Variable& v) { terms_.push_back({v.index, Fr::one()}); }

    static LinearCombination constant(const Fr& c) {
        LinearCombination lc;
        if (!c.is_zero()) lc.terms_.push_back({0, c});
        return lc;
    }

    static LinearCombination term(const Variable& v, const Fr& coeff) {
        LinearCombination lc;
        if (!coeff.is_zero()) lc.terms_.push_back({v.index, coeff});
        return lc;
    }

    LinearCombination& add(const Variable& v, const Fr& coeff) {
        append(v.index, coeff);
        return *this;
    }

    LinearCombination& add(const LinearCombination& other, const Fr& scale = Fr::one()) {
        for (const auto& t : other.terms_) append(t.index, t.coeff * scale);
        return *this;
    }

    LinearCombination operator+(const LinearCombination& o) const {
        LinearCombination r = *this;
        r.add(o);
        return r;
    }

    LinearCombination operator-(const LinearCombination& o) const {
        LinearCombination r = *this;
        r.add(o, -Fr::one());
        return r;
    }

    LinearCombination scaled(const Fr& s) const {
        LinearCombination r;
        if (s.is_zero()) return r;
        r.terms_ = terms_;
        for (auto& t : r.terms_) t.coeff *= s;
        return r;
    }

    Fr evaluate(std::span<const Fr> assignment) const {
        Fr acc = Fr::zero();
        for (const auto& t : terms_) acc += t.coeff * assignment[t.index];
        return acc;
    }

    const std::vector<Term>& terms() const { return terms_; }
    std::uint32_t max_index() const {
        std::uint32_t m = 0;
        for (const auto& t : terms_) m = std::max(m, t.index);
        return m;
    }

private:
    void append(std::uint32_t index, const Fr& coeff) {
        if (coeff.is_zero()) return;
        for (auto& t : terms_) {
            if (t.index == index) {
                t.coeff += coeff;
                if (t.coeff.is_zero()) {
                    t = terms_.back();
                    terms_.pop_back();
                }
                return;
            }
        }
        terms_.push_back({index, coeff});
    }

    std::vector<Term> terms_;
};

struct Constraint {
    LinearCombination a, b, c;
};

class ConstraintSystem {
public:
    Variable one() const { return Variable{0, VarKind::ConstantOne}; }

    Variable alloc_public() {
        if (num_witness_ > 0)
            throw std::logic_error(
                "alloc_public: public inputs must be allocated before any witness");
        ++num_public_;
        return Variable{num_public_, VarKind::PublicInput};
    }

    Variable alloc_witness() {
        ++num_witness_;
        return Variable{num_public_ + num_witness_, VarKind::PrivateWitness};
    }

    void enforce(LinearCombination a, LinearCombination b, LinearCombination c) {
        std::uint32_t limit = num_variables();
        if (a.max_index() >= limit || b.max_index() >= limit || c.max_index() >= limit)
            throw std::invalid_argument("enforce: constraint references unallocated variable");
        constraints_.push_back({std::move(a), std::move(b), std::move(c)});
    }

    std::uint32_t num_public() const { return num_public_; }
    std::uint32_t num_witness() const { return num_witness_; }
    std::uint32_t num_variables() const { return 1 + num_public_ + num_witness_; }
    std::size_t num_constraints() const { return constraints_.size(); }
    const std::vector<Constraint>& constraints() const { return constraints_; }

    std::optional<std::size_t> first_unsatisfied(std::span<const Fr> assignment) const {
        check_assignment_shape(assignment);
        for (std::size_t i = 0; i < constraints_.size(); ++i) {
            const auto& row = constraints_[i];
            if (row.a.evaluate(assignment) * row.b.evaluate(assignment) !=
                row.c.evaluate(assignment))
                return i;
        }
        return std::nullopt;
    }

    bool is_satisfied(std::span<const Fr> assignment) const {
        return !first_unsatisfied(assignment).has_value();
    }

private:
    void check_assignment_shape(std::span<const Fr> assignment) const {
        if (assignment.size() != num_variables())
            throw std::invalid_argument("assignment length does not match variable count");
        if (assignment[0] != Fr::one())
            throw std::invalid_argument("assignment[0] must be the constant one");
    }

    std::uint32_t num_public_ = 0;
    std::uint32_t num_witness_ = 0;
    std::vector<Constraint> constraints_;
};

// Allocation/constraint counter with the same building interface as
// ConstraintSystem. Lets circuit generators report exact sizes without
// materializing constraint storage.
class ConstraintCounter {
public:
    Variable one() const { return Variable{0, VarKind::ConstantOne}; }

    Variable alloc_public() {
        if (num_witness_ > 0)
            throw std::logic_error(
                "alloc_public: public inputs must be allocated before any witness");
        ++num_public_;
        return Variable{num_public_, VarKind::PublicInput};
    }

    Variable alloc_witness() {
        ++num_witness_;
        return Variable{num_public_ + num_witness_, VarKind::PrivateWitness};
    }

    void enforce(const LinearCombination&, const LinearCombination&, const LinearCombination&) {
        ++num_constraints_;
    }

    std::uint32_t num_public() const { return num_public_; }
    std::uint32_t num_witness() const { return num_witness_; }
    std::uint32_t num_variables() const { return 1 + num_public_ + num_witness_; }
    std::size_t num_constraints() const { return num_constraints_; }

private:
    std::uint32_t num_public_ = 0;
    std::uint32_t num_witness_ = 0;
    std::size_t num_constraints_ = 0;
};

// Assignment vector builder: owns [1, publics..., witnesses...].
class Assignment {
public:
    explicit Assignment(const ConstraintSystem& cs) : values_(cs.num_variables(), Fr::zero()) {
        values_[0] = Fr::one();
    }

    void set(const Variable& v, const Fr& value) {
        if (v.index == 0) throw std::invalid_argument("cannot assign the constant one");
        values_.at(v.index) = value;
    }

    Fr get(const Variable& v) const { return values_.at(v.index); }
    Fr eval(const LinearCombination& lc) const { return lc.evaluate(values_); }

    std::span<const Fr> values() const { return values_; }
    std::vector<Fr>& mutable_values() { return values_; }

private:
    std::vector<Fr> values_;
};

} // namespace zkdfl
