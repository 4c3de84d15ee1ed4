#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "polymin/errors.hpp"

namespace polymin {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Exact exterior algebra on R^d in a fixed basis, for small d.
///
/// Conventions used throughout:
///  - index subsets are strictly increasing and 0-based;
///  - coefficient vectors of alternating k-tensors are indexed by the
///    lexicographic enumeration of k-subsets of {0,...,d-1};
///  - degree 0 and degree d tensors are stored as length-1 vectors;
///  - Lambda_{d-1} R^d is identified with R^d through
///    v_1 ^ ... ^ v_{i-1} ^ v_{i+1} ^ ... ^ v_d  =  (-1)^{d-i} v_i
///    (1-based i), the sign convention behind cof_normal().

std::int64_t binomial(int n, int k);

/// All k-subsets of {0,...,n-1} in lexicographic order.
std::vector<std::vector<int>> index_subsets(int n, int k);

/// Lexicographic rank of a strictly increasing subset among C(n,k).
int subset_rank(const std::vector<int>& subset, int n);

/// Parity sign incurred by sorting the concatenation (a, b) of two
/// disjoint increasing index lists into increasing order.
int merge_sign(const std::vector<int>& a, const std::vector<int>& b);

/// Coefficient vector of an alternating k-tensor on R^d.
class AltTensor {
public:
    AltTensor(int dim, int degree);

    static AltTensor scalar(int dim, double value);
    static AltTensor basis_vector(int dim, int i);
    static AltTensor from_vector(const Vector& v);
    /// e_{idx[0]} ^ ... ^ e_{idx[k-1]} for strictly increasing idx.
    static AltTensor basis_wedge(int dim, const std::vector<int>& idx);

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    Vector& coeffs() { return coeffs_; }
    const Vector& coeffs() const { return coeffs_; }

    double norm() const { return coeffs_.norm(); }

    AltTensor& operator+=(const AltTensor& other);
    AltTensor& operator-=(const AltTensor& other);
    AltTensor& operator*=(double s);

    friend AltTensor operator+(AltTensor a, const AltTensor& b) { return a += b; }
    friend AltTensor operator-(AltTensor a, const AltTensor& b) { return a -= b; }
    friend AltTensor operator*(double s, AltTensor a) { return a *= s; }

private:
    int dim_;
    int degree_;
    Vector coeffs_;
};

/// Exterior product; bilinear, antisymmetric on vector factors.
AltTensor wedge(const AltTensor& a, const AltTensor& b);

/// Inner product of two tensors of equal degree. In the fixed orthonormal
/// basis this is the dot product of coefficient vectors; it agrees with the
/// signed permutation sum over simple tensors.
double inner(const AltTensor& a, const AltTensor& b);

/// Contraction a |_ b of degrees (r, s) -> r - s, defined by the adjunction
/// (a |_ b) . g = a . (g ^ b) for every g of degree r - s.
AltTensor contract(const AltTensor& a, const AltTensor& b);

/// Matrix of the induced map Lambda_k F on Lambda_k R^d (size C(d,k) square).
/// Entry (I, J) is the order-k minor of F with rows I and columns J.
Matrix lambda_k(const Matrix& F, int k);

/// Matrix of A ^ n : Lambda_{k+1} -> Lambda_k, where A acts on Lambda_k and
/// n is the last vector of the orthonormal frame `basis` (d x d, columns
/// orthonormal to 1e-12, outward normal last). Both sides are expressed in
/// the wedge bases of the frame. (A ^ n) alpha = A (alpha |_ n).
Matrix wedge_normal(const Matrix& A, int k, const Matrix& basis);

/// Ordered vector of all minors of a d x m matrix (1 <= m <= d):
///   ( M^0_1, ..., M^0_m, M^1_1, ..., M^1_m )
/// where M^0_k collects the order-k minors avoiding the last column and
/// M^1_k those involving it. Within a block the order is lexicographic in
/// (row subset, column subset). For m = d the final entry is det.
struct MinorVector {
    int rows = 0; ///< d
    int cols = 0; ///< m
    Vector values;
};

/// nu_m = sum_{k=1}^{m} C(m,k) C(d,k), the length of MinorVector::values.
std::int64_t minor_count(int d, int m);

/// Position descriptor of one entry of a MinorVector.
struct MinorIndex {
    int order = 0;                ///< k
    std::vector<int> row_subset;  ///< increasing, in {0,...,d-1}
    std::vector<int> col_subset;  ///< increasing, in {0,...,m-1}
    bool involves_last_col = false;
};

/// The layout of MinorVector entries for a d x m matrix, in storage order.
std::vector<MinorIndex> minor_layout(int d, int m);

MinorVector minors(const Matrix& F);

/// Single order-k minor with explicit (0-based, increasing) subsets.
double minor_of(const Matrix& F, const std::vector<int>& rows,
                const std::vector<int>& cols);

/// Linear transport of minor vectors under a column-side basis change.
/// If mv = M(F) for the representation F of a map in basis V, and the new
/// basis B satisfies b_j = sum_i A_ij v_i, the representation in B is F A and
/// cauchy_binet_transport(mv, A) = M(F A). Materialized as an explicit
/// nu x nu matrix; A must be invertible (condition number <= 1e12).
Matrix cauchy_binet_transport_matrix(int d, int m, const Matrix& A);
MinorVector cauchy_binet_transport(const MinorVector& mv, const Matrix& A);

/// (cof Ftilde) n for any square extension Ftilde of F, where F is the
/// d x (d-1) representation of a map T -> R^d in the orthonormal frame
/// `basis` (tangent vectors first, unit normal last; rows are frame
/// components of the image). The result is returned in canonical
/// coordinates and does not depend on the extension:
///   cof_normal(F) = sum_i (-1)^{d-i} M_i(F) v_i,
/// M_i(F) the order-(d-1) minor of F that omits row i.
Vector cof_normal(const Matrix& F_frame, const Matrix& basis);

/// Same vector expressed in frame components (useful to stay in the frame).
Vector cof_normal_frame(const Matrix& F_frame);

/// A tuple (L_0, ..., L_{d-1}) of operator matrices, the argument type of
/// the interface-convexity representative Psi.
using OperatorTuple = std::vector<Matrix>;

/// |Psi(t X) - t Psi(X)| / max(|t Psi(X)|, eps): relative deviation from
/// positive 1-homogeneity at one sample.
double homogeneity_deviation_at(const std::function<double(const OperatorTuple&)>& psi,
                                const OperatorTuple& X, double t);

/// Max relative deviation over random operator tuples for maps
/// Lambda_{k+1} R^d -> Lambda_k R^d, k = 0..d-1, and t sampled in (0, 10].
/// Returns 0 (within 1e-12) iff Psi is positively 1-homogeneous on the sample.
double homogeneity_probe(const std::function<double(const OperatorTuple&)>& psi,
                         int dim, int samples, std::uint64_t seed);

} // namespace polymin
