//
// Copyright 2026 The KNorm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef KNORM_QUERY_MODEL_H_
#define KNORM_QUERY_MODEL_H_

#include <istream>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "absl/status/statusor.h"

namespace knorm {

class RngStream;

// Dense row-major storage for query matrices.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A histogram database x in R^n. Fractional entries are allowed.
using Database = Eigen::VectorXd;

// Largest d accepted by HypercubeQuery; the matrix has 2^d columns.
inline constexpr int kMaxHypercubeDim = 16;

// A d x n linear query map F. The body K = F B_1^n is the symmetric convex
// hull of the columns of F.
//
// Queries built with Create() have every entry in [-1, 1] and 1 <= d <= n.
// Projected queries (see ProjectQuery) may have larger entries; those are
// built with CreateUnbounded() and only the shape is checked.
class QueryMatrix {
 public:
  static absl::StatusOr<QueryMatrix> Create(RowMatrix entries);
  static absl::StatusOr<QueryMatrix> CreateUnbounded(RowMatrix entries);

  int d() const { return static_cast<int>(entries_.rows()); }
  int n() const { return static_cast<int>(entries_.cols()); }
  const RowMatrix& entries() const { return entries_; }

  // True when every entry lies in [-1, 1].
  bool bounded() const { return bounded_; }

  // max_j sum_i |F_ij|, i.e. sup over the unit l1 ball of ||Fx||_1.
  double sensitivity() const { return sensitivity_; }

 private:
  explicit QueryMatrix(RowMatrix entries);

  RowMatrix entries_;
  bool bounded_ = true;
  double sensitivity_ = 0.0;
};

// Returns Fx. Fails on a dimension mismatch.
absl::StatusOr<Eigen::VectorXd> Evaluate(const QueryMatrix& f,
                                         const Database& x);

double Sensitivity(const QueryMatrix& f);

// Entries independently +1 or -1 with probability 1/2.
absl::StatusOr<QueryMatrix> RandomBernoulliQuery(int d, int n, RngStream& rng);

// All 2^d sign vectors as columns, in lexicographic order over sign bits:
// column c has -1 in row i exactly when bit (d - 1 - i) of c is set. So the
// first column is all +1 and the last is all -1.
absl::StatusOr<QueryMatrix> HypercubeQuery(int d);

// First row random +-1, remaining rows random +-1/d^2. The body is long in
// the first coordinate and thin in all others.
absl::StatusOr<QueryMatrix> RandomSkewedQuery(int d, int n, RngStream& rng);

// A pair of databases at l1 distance at most `distance`.
struct NeighborPair {
  Database x;
  Database x_prime;

  bool IsValid(double distance = 1.0) const;
};

// Text formats. Matrix: a "d n" header line followed by d lines of n
// whitespace-separated decimals. Database: one line of n decimals.
absl::StatusOr<QueryMatrix> ReadQueryMatrix(std::istream& in);
absl::StatusOr<QueryMatrix> ReadQueryMatrixFile(const std::string& path);
void WriteQueryMatrix(const QueryMatrix& f, std::ostream& out);
absl::StatusOr<Database> ReadDatabase(std::istream& in);
absl::StatusOr<Database> ReadDatabaseFile(const std::string& path);
void WriteDatabase(const Database& x, std::ostream& out);

}  // namespace knorm

#endif  // KNORM_QUERY_MODEL_H_
