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

#include "knorm/query_model.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "knorm/random.h"

namespace knorm {
namespace {

absl::Status CheckShape(const RowMatrix& entries) {
  if (entries.rows() < 1 || entries.cols() < entries.rows()) {
    return absl::InvalidArgumentError(
        absl::StrCat("query shape must satisfy 1 <= d <= n, got d=",
                     entries.rows(), " n=", entries.cols()));
  }
  if (!entries.allFinite()) {
    return absl::InvalidArgumentError("query entries must be finite");
  }
  return absl::OkStatus();
}

}  // namespace

QueryMatrix::QueryMatrix(RowMatrix entries) : entries_(std::move(entries)) {
  bounded_ = entries_.cwiseAbs().maxCoeff() <= 1.0;
  sensitivity_ = entries_.cwiseAbs().colwise().sum().maxCoeff();
}

absl::StatusOr<QueryMatrix> QueryMatrix::Create(RowMatrix entries) {
  if (absl::Status s = CheckShape(entries); !s.ok()) return s;
  if (entries.cwiseAbs().maxCoeff() > 1.0) {
    return absl::InvalidArgumentError("query entries must lie in [-1, 1]");
  }
  return QueryMatrix(std::move(entries));
}

absl::StatusOr<QueryMatrix> QueryMatrix::CreateUnbounded(RowMatrix entries) {
  if (absl::Status s = CheckShape(entries); !s.ok()) return s;
  return QueryMatrix(std::move(entries));
}

absl::StatusOr<Eigen::VectorXd> Evaluate(const QueryMatrix& f,
                                         const Database& x) {
  if (x.size() != f.n()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "database length ", x.size(), " does not match query n=", f.n()));
  }
  return Eigen::VectorXd(f.entries() * x);
}

double Sensitivity(const QueryMatrix& f) { return f.sensitivity(); }

absl::StatusOr<QueryMatrix> RandomBernoulliQuery(int d, int n, RngStream& rng) {
  if (d < 1 || n < d) {
    return absl::InvalidArgumentError(
        absl::StrCat("need 1 <= d <= n, got d=", d, " n=", n));
  }
  RowMatrix entries(d, n);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < n; ++j) {
      entries(i, j) = (rng() >> 63) ? -1.0 : 1.0;
    }
  }
  return QueryMatrix::Create(std::move(entries));
}

absl::StatusOr<QueryMatrix> HypercubeQuery(int d) {
  if (d < 1 || d > kMaxHypercubeDim) {
    return absl::InvalidArgumentError(absl::StrCat(
        "hypercube query needs 1 <= d <= ", kMaxHypercubeDim, ", got ", d));
  }
  const int n = 1 << d;
  RowMatrix entries(d, n);
  for (int c = 0; c < n; ++c) {
    for (int i = 0; i < d; ++i) {
      entries(i, c) = ((c >> (d - 1 - i)) & 1) ? -1.0 : 1.0;
    }
  }
  return QueryMatrix::Create(std::move(entries));
}

absl::StatusOr<QueryMatrix> RandomSkewedQuery(int d, int n, RngStream& rng) {
  absl::StatusOr<QueryMatrix> base = RandomBernoulliQuery(d, n, rng);
  if (!base.ok()) return base.status();
  RowMatrix entries = base->entries();
  const double small = 1.0 / (static_cast<double>(d) * d);
  entries.bottomRows(d - 1) *= small;
  return QueryMatrix::Create(std::move(entries));
}

bool NeighborPair::IsValid(double distance) const {
  return x.size() == x_prime.size() && (x - x_prime).lpNorm<1>() <= distance;
}

absl::StatusOr<QueryMatrix> ReadQueryMatrix(std::istream& in) {
  long long d = 0;
  long long n = 0;
  if (!(in >> d >> n) || d < 1 || n < 1) {
    return absl::InvalidArgumentError("matrix header must be \"d n\"");
  }
  RowMatrix entries(d, n);
  for (long long i = 0; i < d; ++i) {
    for (long long j = 0; j < n; ++j) {
      if (!(in >> entries(i, j))) {
        return absl::InvalidArgumentError(
            absl::StrCat("matrix body truncated at row ", i, " column ", j));
      }
    }
  }
  return QueryMatrix::CreateUnbounded(std::move(entries));
}

absl::StatusOr<QueryMatrix> ReadQueryMatrixFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ReadQueryMatrix(in);
}

void WriteQueryMatrix(const QueryMatrix& f, std::ostream& out) {
  out << f.d() << ' ' << f.n() << '\n'
      << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (int i = 0; i < f.d(); ++i) {
    for (int j = 0; j < f.n(); ++j) {
      if (j > 0) out << ' ';
      out << f.entries()(i, j);
    }
    out << '\n';
  }
}

absl::StatusOr<Database> ReadDatabase(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  std::istringstream row(line);
  std::vector<double> values;
  double v;
  while (row >> v) values.push_back(v);
  if (values.empty()) {
    return absl::InvalidArgumentError("database line is empty");
  }
  if (!row.eof()) {
    return absl::InvalidArgumentError("database line has a non-numeric token");
  }
  return Database(Eigen::Map<Eigen::VectorXd>(values.data(), values.size()));
}

absl::StatusOr<Database> ReadDatabaseFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ReadDatabase(in);
}

void WriteDatabase(const Database& x, std::ostream& out) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i > 0) out << ' ';
    out << x(i);
  }
  out << '\n';
}

}  // namespace knorm
