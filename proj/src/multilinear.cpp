#include "polymin/multilinear.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace polymin {

namespace {

void check_subset(const std::vector<int>& s, int n, const char* what) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0 || s[i] >= n)
            throw ValidationError(std::string(what) + ": index out of range");
        if (i > 0 && s[i] <= s[i - 1])
            throw ValidationError(std::string(what) + ": indices not strictly increasing");
    }
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

std::int64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::vector<std::vector<int>> index_subsets(int n, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > n) return out;
    out.reserve(static_cast<std::size_t>(binomial(n, k)));
    std::vector<int> cur(k);
    for (int i = 0; i < k; ++i) cur[i] = i;
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[i] == n - k + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    if (k == 0) out.assign(1, {});
    return out;
}

int subset_rank(const std::vector<int>& subset, int n) {
    check_subset(subset, n, "subset_rank");
    const int k = static_cast<int>(subset.size());
    std::int64_t rank = 0;
    int prev = -1;
    for (int i = 0; i < k; ++i) {
        for (int v = prev + 1; v < subset[i]; ++v)
            rank += binomial(n - 1 - v, k - 1 - i);
        prev = subset[i];
    }
    return static_cast<int>(rank);
}

int merge_sign(const std::vector<int>& a, const std::vector<int>& b) {
    int inversions = 0;
    for (int x : a)
        for (int y : b)
            if (x > y) ++inversions;
    return (inversions % 2 == 0) ? 1 : -1;
}

AltTensor::AltTensor(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 1) throw ValidationError("AltTensor: dim must be >= 1");
    if (degree < 0 || degree > dim)
        throw ValidationError("AltTensor: degree must lie in [0, dim]");
    coeffs_ = Vector::Zero(binomial(dim, degree));
}

AltTensor AltTensor::scalar(int dim, double value) {
    AltTensor t(dim, 0);
    t.coeffs_(0) = value;
    return t;
}

AltTensor AltTensor::basis_vector(int dim, int i) {
    AltTensor t(dim, 1);
    if (i < 0 || i >= dim) throw ValidationError("basis_vector: index out of range");
    t.coeffs_(i) = 1.0;
    return t;
}

AltTensor AltTensor::from_vector(const Vector& v) {
    AltTensor t(static_cast<int>(v.size()), 1);
    t.coeffs_ = v;
    return t;
}

AltTensor AltTensor::basis_wedge(int dim, const std::vector<int>& idx) {
    check_subset(idx, dim, "basis_wedge");
    AltTensor t(dim, static_cast<int>(idx.size()));
    t.coeffs_(subset_rank(idx, dim)) = 1.0;
    return t;
}

AltTensor& AltTensor::operator+=(const AltTensor& other) {
    if (dim_ != other.dim_ || degree_ != other.degree_)
        throw ValidationError("AltTensor sum: dimension or degree mismatch");
    coeffs_ += other.coeffs_;
    return *this;
}

AltTensor& AltTensor::operator-=(const AltTensor& other) {
    if (dim_ != other.dim_ || degree_ != other.degree_)
        throw ValidationError("AltTensor difference: dimension or degree mismatch");
    coeffs_ -= other.coeffs_;
    return *this;
}

AltTensor& AltTensor::operator*=(double s) {
    coeffs_ *= s;
    return *this;
}

AltTensor wedge(const AltTensor& a, const AltTensor& b) {
    if (a.dim() != b.dim())
        throw ValidationError("wedge: ambient dimension mismatch");
    const int d = a.dim();
    const int r = a.degree();
    const int s = b.degree();
    if (r + s > d)
        throw ValidationError("wedge: degree overflow (r + s > d)");
    AltTensor out(d, r + s);
    const auto sa = index_subsets(d, r);
    const auto sb = index_subsets(d, s);
    for (std::size_t i = 0; i < sa.size(); ++i) {
        const double ca = a.coeffs()(static_cast<Eigen::Index>(i));
        if (ca == 0.0) continue;
        for (std::size_t j = 0; j < sb.size(); ++j) {
            const double cb = b.coeffs()(static_cast<Eigen::Index>(j));
            if (cb == 0.0) continue;
            // skip overlapping supports: e_i ^ e_i = 0
            std::vector<int> merged;
            merged.reserve(sa[i].size() + sb[j].size());
            std::set_union(sa[i].begin(), sa[i].end(), sb[j].begin(), sb[j].end(),
                           std::back_inserter(merged));
            if (static_cast<int>(merged.size()) != r + s) continue;
            const int sign = merge_sign(sa[i], sb[j]);
            out.coeffs()(subset_rank(merged, d)) += sign * ca * cb;
        }
    }
    return out;
}

double inner(const AltTensor& a, const AltTensor& b) {
    if (a.dim() != b.dim() || a.degree() != b.degree())
        throw ValidationError("inner: dimension or degree mismatch");
    return a.coeffs().dot(b.coeffs());
}

AltTensor contract(const AltTensor& a, const AltTensor& b) {
    if (a.dim() != b.dim())
        throw ValidationError("contract: ambient dimension mismatch");
    const int d = a.dim();
    const int r = a.degree();
    const int s = b.degree();
    if (s > r)
        throw ValidationError("contract: second degree exceeds first");
    AltTensor out(d, r - s);
    const auto sa = index_subsets(d, r);
    const auto sb = index_subsets(d, s);
    for (std::size_t i = 0; i < sa.size(); ++i) {
        const double ca = a.coeffs()(static_cast<Eigen::Index>(i));
        if (ca == 0.0) continue;
        for (std::size_t j = 0; j < sb.size(); ++j) {
            const double cb = b.coeffs()(static_cast<Eigen::Index>(j));
            if (cb == 0.0) continue;
            if (!std::includes(sa[i].begin(), sa[i].end(), sb[j].begin(), sb[j].end()))
                continue;
            std::vector<int> rest;
            rest.reserve(sa[i].size() - sb[j].size());
            std::set_difference(sa[i].begin(), sa[i].end(), sb[j].begin(), sb[j].end(),
                                std::back_inserter(rest));
            // (rest, b) sorted back into a gives the sign of the adjunction
            const int sign = merge_sign(rest, sb[j]);
            out.coeffs()(subset_rank(rest, d)) += sign * ca * cb;
        }
    }
    return out;
}

double minor_of(const Matrix& F, const std::vector<int>& rows,
                const std::vector<int>& cols) {
    if (rows.size() != cols.size())
        throw ValidationError("minor_of: row/column subset sizes differ");
    const int k = static_cast<int>(rows.size());
    if (k == 0) return 1.0;
    Matrix sub(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            sub(i, j) = F(rows[i], cols[j]);
    if (k == 1) return sub(0, 0);
    if (k == 2) return sub(0, 0) * sub(1, 1) - sub(0, 1) * sub(1, 0);
    return sub.determinant();
}

Matrix lambda_k(const Matrix& F, int k) {
    if (F.rows() != F.cols())
        throw ValidationError("lambda_k: matrix must be square");
    const int d = static_cast<int>(F.rows());
    if (k < 0 || k > d)
        throw ValidationError("lambda_k: degree out of range");
    const auto subs = index_subsets(d, k);
    const Eigen::Index n = static_cast<Eigen::Index>(subs.size());
    Matrix out(n, n);
    for (Eigen::Index col = 0; col < n; ++col)
        for (Eigen::Index row = 0; row < n; ++row)
            out(row, col) = minor_of(F, subs[static_cast<std::size_t>(row)],
                                     subs[static_cast<std::size_t>(col)]);
    return out;
}

namespace {

void check_orthonormal_frame(const Matrix& basis, const char* what) {
    if (basis.rows() != basis.cols())
        throw ValidationError(std::string(what) + ": frame must be square");
    const Matrix gram = basis.transpose() * basis;
    const double dev = (gram - Matrix::Identity(basis.rows(), basis.cols()))
                           .cwiseAbs()
                           .maxCoeff();
    if (dev > 1e-12)
        throw ValidationError(std::string(what) + ": frame not orthonormal within 1e-12");
}

} // namespace

Matrix wedge_normal(const Matrix& A, int k, const Matrix& basis) {
    check_orthonormal_frame(basis, "wedge_normal");
    const int d = static_cast<int>(basis.rows());
    if (k < 0 || k >= d)
        throw ValidationError("wedge_normal: degree out of range");
    if (A.rows() != binomial(d, k) || A.cols() != binomial(d, k))
        throw ValidationError("wedge_normal: operator size does not match Lambda_k");
    const auto cols = index_subsets(d, k + 1);
    Matrix out = Matrix::Zero(A.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].back() != d - 1) continue; // alpha |_ n = 0 without the n factor
        std::vector<int> head(cols[j].begin(), cols[j].end() - 1);
        out.col(static_cast<Eigen::Index>(j)) = A.col(subset_rank(head, d));
    }
    return out;
}

std::int64_t minor_count(int d, int m) {
    std::int64_t n = 0;
    for (int k = 1; k <= m; ++k) n += binomial(m, k) * binomial(d, k);
    return n;
}

std::vector<MinorIndex> minor_layout(int d, int m) {
    if (m < 1 || m > d)
        throw ValidationError("minor_layout: need 1 <= m <= d");
    std::vector<MinorIndex> out;
    out.reserve(static_cast<std::size_t>(minor_count(d, m)));
    for (int pass = 0; pass < 2; ++pass) {
        const bool with_last = pass == 1;
        for (int k = 1; k <= m; ++k) {
            std::vector<std::vector<int>> col_subsets;
            if (!with_last) {
                col_subsets = index_subsets(m - 1, k);
            } else {
                for (auto& head : index_subsets(m - 1, k - 1)) {
                    head.push_back(m - 1);
                    col_subsets.push_back(std::move(head));
                }
            }
            if (col_subsets.empty()) continue;
            for (const auto& rows : index_subsets(d, k))
                for (const auto& cols : col_subsets)
                    out.push_back({k, rows, cols, with_last});
        }
    }
    return out;
}

MinorVector minors(const Matrix& F) {
    const int d = static_cast<int>(F.rows());
    const int m = static_cast<int>(F.cols());
    if (m > d)
        throw ValidationError("minors: more columns than rows");
    const auto layout = minor_layout(d, m);
    MinorVector mv;
    mv.rows = d;
    mv.cols = m;
    mv.values.resize(static_cast<Eigen::Index>(layout.size()));
    for (std::size_t i = 0; i < layout.size(); ++i)
        mv.values(static_cast<Eigen::Index>(i)) =
            minor_of(F, layout[i].row_subset, layout[i].col_subset);
    return mv;
}

Matrix cauchy_binet_transport_matrix(int d, int m, const Matrix& A) {
    if (A.rows() != m || A.cols() != m)
        throw ValidationError("cauchy_binet_transport: transition matrix must be m x m");
    Eigen::JacobiSVD<Matrix> svd(A);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0 || smax / smin > 1e12)
        throw ValidationError("cauchy_binet_transport: transition matrix is singular");
    const auto layout = minor_layout(d, m);
    const Eigen::Index n = static_cast<Eigen::Index>(layout.size());
    // index of each (k, rows, cols) entry, for the Cauchy-Binet convolution
    // M_{I,J}(F A) = sum_K M_{I,K}(F) M_{K,J}(A)
    Matrix T = Matrix::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const auto& out_idx = layout[static_cast<std::size_t>(a)];
        for (Eigen::Index b = 0; b < n; ++b) {
            const auto& in_idx = layout[static_cast<std::size_t>(b)];
            if (in_idx.order != out_idx.order || in_idx.row_subset != out_idx.row_subset)
                continue;
            T(a, b) = minor_of(A, in_idx.col_subset, out_idx.col_subset);
        }
    }
    return T;
}

MinorVector cauchy_binet_transport(const MinorVector& mv, const Matrix& A) {
    const Matrix T = cauchy_binet_transport_matrix(mv.rows, mv.cols, A);
    MinorVector out = mv;
    out.values = T * mv.values;
    return out;
}

Vector cof_normal_frame(const Matrix& F_frame) {
    const int d = static_cast<int>(F_frame.rows());
    if (F_frame.cols() != d - 1)
        throw ValidationError("cof_normal: expected a d x (d-1) matrix");
    Vector w(d);
    std::vector<int> all_cols(static_cast<std::size_t>(d - 1));
    for (int j = 0; j < d - 1; ++j) all_cols[static_cast<std::size_t>(j)] = j;
    for (int i = 0; i < d; ++i) {
        std::vector<int> rows;
        rows.reserve(static_cast<std::size_t>(d - 1));
        for (int r = 0; r < d; ++r)
            if (r != i) rows.push_back(r);
        const double sign = ((d - 1 - i) % 2 == 0) ? 1.0 : -1.0;
        w(i) = sign * minor_of(F_frame, rows, all_cols);
    }
    return w;
}

Vector cof_normal(const Matrix& F_frame, const Matrix& basis) {
    check_orthonormal_frame(basis, "cof_normal");
    if (basis.rows() != F_frame.rows())
        throw ValidationError("cof_normal: frame and matrix dimensions differ");
    return basis * cof_normal_frame(F_frame);
}

double homogeneity_deviation_at(const std::function<double(const OperatorTuple&)>& psi,
                                const OperatorTuple& X, double t) {
    if (t <= 0.0)
        throw ValidationError("homogeneity_deviation_at: t must be positive");
    OperatorTuple tX = X;
    for (auto& op : tX) op *= t;
    const double lhs = psi(tX);
    const double rhs = t * psi(X);
    return std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
}

double homogeneity_probe(const std::function<double(const OperatorTuple&)>& psi,
                         int dim, int samples, std::uint64_t seed) {
    if (dim < 2) throw ValidationError("homogeneity_probe: dim must be >= 2");
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        OperatorTuple X;
        X.reserve(static_cast<std::size_t>(dim));
        for (int k = 0; k < dim; ++k) {
            Matrix op(binomial(dim, k), binomial(dim, k + 1));
            for (Eigen::Index i = 0; i < op.rows(); ++i)
                for (Eigen::Index j = 0; j < op.cols(); ++j)
                    op(i, j) = 2.0 * uniform01(rng) - 1.0;
            X.push_back(std::move(op));
        }
        const double t = 10.0 * std::max(uniform01(rng), 1e-3);
        worst = std::max(worst, homogeneity_deviation_at(psi, X, t));
    }
    return worst;
}

} // namespace polymin
