#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabilab {

enum class Factor { mode_a, mode_b, spin };

inline const char* factor_name(Factor f) {
    switch (f) {
        case Factor::mode_a: return "mode_a";
        case Factor::mode_b: return "mode_b";
        case Factor::spin: return "spin";
    }
    return "?";
}

// Fock cutoffs of the composite space. Factor order is fixed repo-wide as
// (mode_a, mode_b, spin) with row-major index flattening; mode a is present
// only when include_a is set.
class Truncation {
  public:
    Truncation(int n_a_max, int n_b_max, bool include_a)
        : n_a_max_(n_a_max), n_b_max_(n_b_max), include_a_(include_a) {
        if (n_a_max < 0 || n_b_max < 0)
            throw std::invalid_argument("Truncation: cutoffs must be >= 0");
    }
    static Truncation with_a(int n_a_max, int n_b_max) { return {n_a_max, n_b_max, true}; }
    static Truncation b_only(int n_b_max) { return {0, n_b_max, false}; }

    int n_a_max() const { return n_a_max_; }
    int n_b_max() const { return n_b_max_; }
    bool include_a() const { return include_a_; }

    int dim_a() const { return include_a_ ? n_a_max_ + 1 : 1; }
    int dim_b() const { return n_b_max_ + 1; }
    int dim() const { return dim_a() * dim_b() * 2; }

    int local_dim(Factor f) const {
        switch (f) {
            case Factor::mode_a:
                if (!include_a_) throw std::invalid_argument("mode_a absent from this space");
                return n_a_max_ + 1;
            case Factor::mode_b: return n_b_max_ + 1;
            case Factor::spin: return 2;
        }
        return 0;
    }

    // Flattened composite index; spin index s: 0 = |up>, 1 = |down>.
    int encode(int n_a, int n_b, int s) const {
        return (n_a * dim_b() + n_b) * 2 + s;
    }
    void decode(int idx, int& n_a, int& n_b, int& s) const {
        s = idx % 2;
        idx /= 2;
        n_b = idx % dim_b();
        n_a = idx / dim_b();
    }

    bool operator==(const Truncation& o) const {
        return n_a_max_ == o.n_a_max_ && n_b_max_ == o.n_b_max_ && include_a_ == o.include_a_;
    }

  private:
    int n_a_max_;
    int n_b_max_;
    bool include_a_;
};

struct BasisFactor {
    Factor label;
    int dim;
};

// Ordered factor list of a composite space, descriptive only; operators carry
// one of these so dimension mismatches fail loudly.
struct BasisDescriptor {
    std::vector<BasisFactor> factors;

    static BasisDescriptor of(const Truncation& t) {
        BasisDescriptor d;
        if (t.include_a()) d.factors.push_back({Factor::mode_a, t.dim_a()});
        d.factors.push_back({Factor::mode_b, t.dim_b()});
        d.factors.push_back({Factor::spin, 2});
        return d;
    }
    static BasisDescriptor single(Factor f, int dim) { return BasisDescriptor{{{f, dim}}}; }

    int dim() const {
        int n = 1;
        for (const auto& f : factors) n *= f.dim;
        return n;
    }
    bool operator==(const BasisDescriptor& o) const {
        if (factors.size() != o.factors.size()) return false;
        for (size_t i = 0; i < factors.size(); ++i)
            if (factors[i].label != o.factors[i].label || factors[i].dim != o.factors[i].dim)
                return false;
        return true;
    }
    std::string to_string() const {
        std::string s;
        for (const auto& f : factors) {
            if (!s.empty()) s += " x ";
            s += factor_name(f.label) + std::string("(") + std::to_string(f.dim) + ")";
        }
        return s;
    }
};

}  // namespace rabilab
