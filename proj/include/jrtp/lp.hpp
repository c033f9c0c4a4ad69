#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace jrtp::lp {

// maximize c'x  subject to  A x <= b,  x >= 0,  with b >= 0.
//
// Columns are stored sparse. Row duals and a final basis are returned; the
// basis can be fed back as a warm start after columns are appended.
struct Problem {
  struct Entry {
    int row = 0;
    double value = 0.0;
  };

  int num_rows = 0;
  std::vector<double> rhs;
  std::vector<double> objective;
  std::vector<std::vector<Entry>> columns;

  int num_cols() const { return static_cast<int>(columns.size()); }

  int add_column(double cost, std::vector<Entry> entries) {
    objective.push_back(cost);
    columns.push_back(std::move(entries));
    return num_cols() - 1;
  }
};

enum class Status { Optimal, Unbounded, IterationLimit };

struct Result {
  Status status = Status::Optimal;
  double objective = 0.0;
  std::vector<double> x;      // structural values
  std::vector<double> duals;  // one per row, >= 0 at optimality
  // Basic variables: ids < num_cols are structural, num_cols + r is the
  // slack of row r.
  std::vector<int> basis;
  int iterations = 0;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  // `warm_basis` may be empty or hold variable ids as in Result::basis.
  virtual Result solve(const Problem& p, const std::vector<int>& warm_basis) const = 0;
};

// Dense revised simplex with an explicit basis inverse updated by pivoting
// and refactored periodically. Dantzig pricing, switching to Bland's rule
// after a run of degenerate pivots.
class RevisedSimplex final : public Backend {
 public:
  struct Options {
    double tolerance = 1e-9;
    int refactor_every = 64;
    int degenerate_switch = 50;
    int max_iterations = 1000000;
  };

  RevisedSimplex() = default;
  explicit RevisedSimplex(Options o) : opt_(o) {}

  std::string name() const override { return "bundled"; }

  Result solve(const Problem& p, const std::vector<int>& warm_basis) const override {
    Solver s(p, opt_);
    return s.run(warm_basis);
  }

 private:
  class Solver {
   public:
    Solver(const Problem& p, const Options& o)
        : p_(p), o_(o), m_(p.num_rows), n_(p.num_cols()), binv_(m_ * m_, 0.0), xb_(m_, 0.0) {
      if (static_cast<int>(p.rhs.size()) != m_) throw std::invalid_argument("rhs size mismatch");
      for (double b : p.rhs)
        if (b < 0) throw std::invalid_argument("bundled simplex needs a nonnegative right-hand side");
      for (const auto& col : p.columns)
        for (const auto& e : col)
          if (e.row < 0 || e.row >= m_) throw std::invalid_argument("column entry row out of range");
    }

    Result run(const std::vector<int>& warm_basis) {
      basis_.resize(m_);
      bool warm = static_cast<int>(warm_basis.size()) == m_;
      if (warm) {
        basis_ = warm_basis;
        warm = refactor() && primal_feasible();
      }
      if (!warm) {
        for (int r = 0; r < m_; ++r) basis_[r] = n_ + r;
        refactor();
      }

      Result res;
      int degenerate_run = 0;
      int since_refactor = 0;
      std::vector<double> y(m_), u(m_);
      while (true) {
        if (res.iterations >= o_.max_iterations) {
          res.status = Status::IterationLimit;
          break;
        }
        compute_duals(y);
        const bool bland = degenerate_run >= o_.degenerate_switch;
        int entering = -1;
        double best = o_.tolerance;
        for (int j = 0; j < n_ + m_; ++j) {
          if (in_basis(j)) continue;
          const double d = reduced_cost(j, y);
          if (d > best) {
            entering = j;
            if (bland) break;
            best = d;
          }
        }
        if (entering < 0) {
          res.status = Status::Optimal;
          break;
        }

        column_direction(entering, u);
        int leave = -1;
        double ratio = 0.0;
        for (int r = 0; r < m_; ++r) {
          if (u[r] <= o_.tolerance) continue;
          const double q = std::max(0.0, xb_[r]) / u[r];
          if (leave < 0 || q < ratio - o_.tolerance ||
              (q <= ratio + o_.tolerance && basis_[r] < basis_[leave])) {
            leave = r;
            ratio = q;
          }
        }
        if (leave < 0) {
          res.status = Status::Unbounded;
          break;
        }
        degenerate_run = ratio <= o_.tolerance ? degenerate_run + 1 : 0;
        pivot(leave, entering, u);
        ++res.iterations;
        if (++since_refactor >= o_.refactor_every) {
          refactor();
          since_refactor = 0;
        }
      }

      compute_duals(y);
      res.duals = y;
      res.x.assign(n_, 0.0);
      for (int r = 0; r < m_; ++r)
        if (basis_[r] < n_) res.x[basis_[r]] = std::max(0.0, xb_[r]);
      res.objective = 0.0;
      for (int j = 0; j < n_; ++j) res.objective += p_.objective[j] * res.x[j];
      res.basis = basis_;
      return res;
    }

   private:
    double cost(int var) const { return var < n_ ? p_.objective[var] : 0.0; }

    bool in_basis(int var) const {
      if (in_basis_.size() != static_cast<std::size_t>(n_ + m_)) {
        in_basis_.assign(n_ + m_, 0);
        for (int b : basis_) in_basis_[b] = 1;
      }
      return in_basis_[var] != 0;
    }

    double reduced_cost(int var, const std::vector<double>& y) const {
      if (var >= n_) return -y[var - n_];
      double d = p_.objective[var];
      for (const auto& e : p_.columns[var]) d -= y[e.row] * e.value;
      return d;
    }

    void compute_duals(std::vector<double>& y) const {
      std::fill(y.begin(), y.end(), 0.0);
      for (int r = 0; r < m_; ++r) {
        const double cb = cost(basis_[r]);
        if (cb == 0.0) continue;
        const double* row = &binv_[static_cast<std::size_t>(r) * m_];
        for (int k = 0; k < m_; ++k) y[k] += cb * row[k];
      }
    }

    // u = B^-1 a_var
    void column_direction(int var, std::vector<double>& u) const {
      std::fill(u.begin(), u.end(), 0.0);
      if (var >= n_) {
        const int k = var - n_;
        for (int r = 0; r < m_; ++r) u[r] = binv_[static_cast<std::size_t>(r) * m_ + k];
        return;
      }
      for (const auto& e : p_.columns[var])
        for (int r = 0; r < m_; ++r) u[r] += binv_[static_cast<std::size_t>(r) * m_ + e.row] * e.value;
    }

    void pivot(int leave, int entering, const std::vector<double>& u) {
      const double piv = u[leave];
      double* prow = &binv_[static_cast<std::size_t>(leave) * m_];
      for (int k = 0; k < m_; ++k) prow[k] /= piv;
      xb_[leave] /= piv;
      for (int r = 0; r < m_; ++r) {
        if (r == leave || u[r] == 0.0) continue;
        double* row = &binv_[static_cast<std::size_t>(r) * m_];
        const double f = u[r];
        for (int k = 0; k < m_; ++k) row[k] -= f * prow[k];
        xb_[r] -= f * xb_[leave];
      }
      in_basis(entering);
      in_basis_[basis_[leave]] = 0;
      in_basis_[entering] = 1;
      basis_[leave] = entering;
    }

    bool primal_feasible() const {
      for (double v : xb_)
        if (v < -1e-7) return false;
      return true;
    }

    // Gauss-Jordan on the current basis matrix. False if singular.
    bool refactor() {
      std::vector<double> b(static_cast<std::size_t>(m_) * m_, 0.0);
      for (int r = 0; r < m_; ++r) {
        const int var = basis_[r];
        if (var < 0 || var >= n_ + m_) return false;
        if (var >= n_) {
          b[static_cast<std::size_t>(var - n_) * m_ + r] = 1.0;
        } else {
          for (const auto& e : p_.columns[var]) b[static_cast<std::size_t>(e.row) * m_ + r] += e.value;
        }
      }
      std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
      for (int r = 0; r < m_; ++r) inv[static_cast<std::size_t>(r) * m_ + r] = 1.0;
      for (int c = 0; c < m_; ++c) {
        int piv = -1;
        double best = 1e-12;
        for (int r = c; r < m_; ++r) {
          const double v = std::abs(b[static_cast<std::size_t>(r) * m_ + c]);
          if (v > best) {
            best = v;
            piv = r;
          }
        }
        if (piv < 0) return false;
        if (piv != c)
          for (int k = 0; k < m_; ++k) {
            std::swap(b[static_cast<std::size_t>(piv) * m_ + k], b[static_cast<std::size_t>(c) * m_ + k]);
            std::swap(inv[static_cast<std::size_t>(piv) * m_ + k], inv[static_cast<std::size_t>(c) * m_ + k]);
          }
        const double d = b[static_cast<std::size_t>(c) * m_ + c];
        for (int k = 0; k < m_; ++k) {
          b[static_cast<std::size_t>(c) * m_ + k] /= d;
          inv[static_cast<std::size_t>(c) * m_ + k] /= d;
        }
        for (int r = 0; r < m_; ++r) {
          if (r == c) continue;
          const double f = b[static_cast<std::size_t>(r) * m_ + c];
          if (f == 0.0) continue;
          for (int k = 0; k < m_; ++k) {
            b[static_cast<std::size_t>(r) * m_ + k] -= f * b[static_cast<std::size_t>(c) * m_ + k];
            inv[static_cast<std::size_t>(r) * m_ + k] -= f * inv[static_cast<std::size_t>(c) * m_ + k];
          }
        }
      }
      binv_ = std::move(inv);
      for (int r = 0; r < m_; ++r) {
        double v = 0.0;
        const double* row = &binv_[static_cast<std::size_t>(r) * m_];
        for (int k = 0; k < m_; ++k) v += row[k] * p_.rhs[k];
        xb_[r] = v;
      }
      in_basis_.clear();
      return true;
    }

    const Problem& p_;
    const Options& o_;
    int m_;
    int n_;
    std::vector<double> binv_;
    std::vector<double> xb_;
    std::vector<int> basis_;
    mutable std::vector<char> in_basis_;
  };

  Options opt_;
};

inline std::unique_ptr<Backend> make_backend(const std::string& name) {
  if (name == "bundled") return std::make_unique<RevisedSimplex>();
  if (name == "external")
    throw std::invalid_argument("no external LP engine was compiled into this build");
  throw std::invalid_argument("unknown LP backend '" + name + "'");
}

}  // namespace jrtp::lp
