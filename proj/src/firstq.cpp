#include "entwb/firstq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace entwb {

namespace {

constexpr Eigen::Index kMaxTensorSize = Eigen::Index{1} << 20;

Eigen::Index ipow(Eigen::Index base, int exp) {
  Eigen::Index out = 1;
  for (int i = 0; i < exp; ++i) {
    out *= base;
    if (out > kMaxTensorSize) throw Error("first-quantized tensor exceeds supported size");
  }
  return out;
}

// Contracts slot `slot` of a row-major tensor with per-slot dims against
// op (rows × dims[slot]); the slot dimension becomes op.rows().
Vector contract_slot(std::vector<Eigen::Index>& dims, const Vector& data, std::size_t slot, const Matrix& op) {
  if (op.cols() != dims[slot]) throw Error("slot operator dimension mismatch");
  Eigen::Index outer = 1;
  for (std::size_t i = 0; i < slot; ++i) outer *= dims[i];
  Eigen::Index inner = 1;
  for (std::size_t i = slot + 1; i < dims.size(); ++i) inner *= dims[i];
  const Eigen::Index in_dim = dims[slot];
  const Eigen::Index out_dim = op.rows();
  Vector out = Vector::Zero(outer * out_dim * inner);
  for (Eigen::Index o = 0; o < outer; ++o) {
    // View the (in_dim × inner) slab as a matrix and multiply on the left.
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> slab(
        data.data() + o * in_dim * inner, in_dim, inner);
    Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> dst(
        out.data() + o * out_dim * inner, out_dim, inner);
    dst.noalias() = op * slab;
  }
  dims[slot] = out_dim;
  return out;
}

SymTag combine(SymTag a, SymTag b) { return a == b ? a : SymTag::None; }

}  // namespace

bool is_permutation(const Permutation& p) {
  std::vector<bool> seen(p.size(), false);
  for (int v : p) {
    if (v < 0 || static_cast<std::size_t>(v) >= p.size() || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

int permutation_sign(const Permutation& p) {
  int inversions = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      if (p[i] > p[j]) ++inversions;
    }
  }
  return inversions % 2 == 0 ? 1 : -1;
}

std::vector<Permutation> all_permutations(int n) {
  Permutation p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<Permutation> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

FirstQTensor::FirstQTensor(int dim, int particles, Vector amps, SymTag tag)
    : dim_(dim), particles_(particles), amps_(std::move(amps)), tag_(tag) {
  if (dim < 1) throw Error("single-particle dimension must be positive");
  if (particles < 0 || particles > kMaxParticles) throw Error("particle count outside supported range");
  if (amps_.size() != ipow(dim, particles)) throw Error("tensor size does not match dim^particles");
  if (tag_ != SymTag::None && !has_symmetry(tag_)) {
    throw Error(tag_ == SymTag::Symmetric ? "tensor tagged symmetric is not symmetric"
                                          : "tensor tagged antisymmetric is not antisymmetric");
  }
}

FirstQTensor FirstQTensor::product(const std::vector<Vector>& factors) {
  if (factors.empty()) return FirstQTensor(1, 0, Vector::Ones(1));
  const auto d = factors.front().size();
  Vector amps = Vector::Ones(1);
  for (const auto& f : factors) {
    if (f.size() != d) throw Error("product factors must share a dimension");
    amps = kron(amps, f);
  }
  return FirstQTensor(static_cast<int>(d), static_cast<int>(factors.size()), std::move(amps));
}

FirstQTensor FirstQTensor::basis_product(int dim, const std::vector<int>& indices) {
  std::vector<Vector> factors;
  for (int i : indices) {
    if (i < 0 || i >= dim) throw Error("basis index out of range");
    factors.push_back(Vector::Unit(dim, i));
  }
  return product(factors);
}

Eigen::Index FirstQTensor::flat_index(const std::vector<int>& indices) const {
  if (static_cast<int>(indices.size()) != particles_) throw Error("index arity does not match particle count");
  Eigen::Index flat = 0;
  for (int i : indices) {
    if (i < 0 || i >= dim_) throw Error("tensor index out of range");
    flat = flat * dim_ + i;
  }
  return flat;
}

std::vector<int> FirstQTensor::multi_index(Eigen::Index flat) const {
  std::vector<int> idx(static_cast<std::size_t>(particles_));
  for (int j = particles_ - 1; j >= 0; --j) {
    idx[static_cast<std::size_t>(j)] = static_cast<int>(flat % dim_);
    flat /= dim_;
  }
  return idx;
}

FirstQTensor FirstQTensor::normalized() const {
  const double n = norm();
  if (n < kTolerance) throw Error("cannot normalize the zero tensor");
  return FirstQTensor(dim_, particles_, amps_ / n, tag_);
}

bool FirstQTensor::has_symmetry(SymTag tag, double tol) const {
  if (tag == SymTag::None || particles_ < 2) return true;
  const double sign = tag == SymTag::Symmetric ? 1.0 : -1.0;
  const FirstQTensor plain(dim_, particles_, amps_);
  for (int j = 0; j + 1 < particles_; ++j) {
    Permutation swap(static_cast<std::size_t>(particles_));
    std::iota(swap.begin(), swap.end(), 0);
    std::swap(swap[static_cast<std::size_t>(j)], swap[static_cast<std::size_t>(j + 1)]);
    const Vector diff = permute(swap, plain).amps() - sign * amps_;
    if (diff.cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

FirstQTensor operator+(const FirstQTensor& a, const FirstQTensor& b) {
  if (a.dim_ != b.dim_ || a.particles_ != b.particles_) throw Error("tensor shape mismatch in addition");
  return FirstQTensor(a.dim_, a.particles_, a.amps_ + b.amps_, combine(a.tag_, b.tag_));
}

FirstQTensor operator-(const FirstQTensor& a, const FirstQTensor& b) { return a + Complex(-1.0) * b; }

FirstQTensor operator*(Complex c, const FirstQTensor& t) { return FirstQTensor(t.dim_, t.particles_, c * t.amps_, t.tag_); }

FirstQTensor tensor(const FirstQTensor& a, const FirstQTensor& b) {
  if (a.particles() == 0) return (a.amps()(0)) * b;
  if (b.particles() == 0) return (b.amps()(0)) * a;
  if (a.dim() != b.dim()) throw Error("tensor product of different single-particle dimensions");
  return FirstQTensor(a.dim(), a.particles() + b.particles(), kron(a.amps(), b.amps()));
}

FirstQTensor permute(const Permutation& pi, const FirstQTensor& t) {
  if (static_cast<int>(pi.size()) != t.particles() || !is_permutation(pi)) {
    throw Error("permutation is not a bijection on the particle slots");
  }
  Vector out(t.size());
  std::vector<int> k(pi.size());
  for (Eigen::Index flat = 0; flat < t.size(); ++flat) {
    const auto i = t.multi_index(flat);
    for (std::size_t j = 0; j < pi.size(); ++j) k[static_cast<std::size_t>(pi[j])] = i[j];
    out(flat) = t.at(k);
  }
  return FirstQTensor(t.dim(), t.particles(), std::move(out));
}

FirstQTensor symmetrize(const FirstQTensor& t, Statistics stat) {
  Vector acc = Vector::Zero(t.size());
  const auto perms = all_permutations(t.particles());
  for (const auto& p : perms) {
    const double sign = stat == Statistics::Bose ? 1.0 : permutation_sign(p);
    acc += sign * permute(p, t).amps();
  }
  acc /= static_cast<double>(perms.size());
  // Exact symmetry is restored by the projector; suppress rounding residue.
  for (Eigen::Index i = 0; i < acc.size(); ++i) {
    if (std::abs(acc(i)) < kDropTolerance) acc(i) = 0.0;
  }
  return FirstQTensor(t.dim(), t.particles(), std::move(acc), tag_for(stat));
}

Matrix permutation_matrix(const Permutation& pi, int dim) {
  const int n = static_cast<int>(pi.size());
  const Eigen::Index size = ipow(dim, n);
  if (size > kMaxDenseOperatorDim) throw Error("dense operator exceeds supported dimension");
  Matrix m = Matrix::Zero(size, size);
  for (Eigen::Index col = 0; col < size; ++col) {
    Vector e = Vector::Zero(size);
    e(col) = 1.0;
    m.col(col) = permute(pi, FirstQTensor(dim, n, e)).amps();
  }
  return m;
}

Matrix symmetrizer_matrix(int dim, int particles, Statistics stat) {
  const Eigen::Index size = ipow(dim, particles);
  if (size > kMaxDenseOperatorDim) throw Error("dense operator exceeds supported dimension");
  Matrix acc = Matrix::Zero(size, size);
  const auto perms = all_permutations(particles);
  for (const auto& p : perms) {
    const double sign = stat == Statistics::Bose ? 1.0 : permutation_sign(p);
    acc += sign * permutation_matrix(p, dim);
  }
  return acc / static_cast<double>(perms.size());
}

Matrix local_operator(const std::vector<Matrix>& ops) {
  if (ops.empty()) throw Error("operator list is empty");
  const auto d = ops.front().rows();
  for (const auto& o : ops) {
    if (o.rows() != d || o.cols() != d) throw Error("single-particle operators must share a square dimension");
  }
  const Eigen::Index size = ipow(d, static_cast<int>(ops.size()));
  if (size > kMaxDenseOperatorDim) throw Error("dense operator exceeds supported dimension");
  Matrix out = Matrix::Ones(1, 1);
  for (const auto& o : ops) out = kron(out, o);
  return out;
}

Matrix sym_operator(const std::vector<Matrix>& ops) {
  Matrix acc = Complex(0.0) * local_operator(ops);
  std::vector<Matrix> arranged(ops.size());
  for (const auto& p : all_permutations(static_cast<int>(ops.size()))) {
    for (std::size_t j = 0; j < ops.size(); ++j) arranged[j] = ops[static_cast<std::size_t>(p[j])];
    acc += local_operator(arranged);
  }
  return acc;
}

FirstQTensor apply_on_slot(const Matrix& op, int slot, const FirstQTensor& t) {
  if (slot < 0 || slot >= t.particles()) throw Error("slot out of range");
  if (op.rows() != t.dim() || op.cols() != t.dim()) throw Error("slot operator dimension mismatch");
  std::vector<Eigen::Index> dims(static_cast<std::size_t>(t.particles()), t.dim());
  Vector out = contract_slot(dims, t.amps(), static_cast<std::size_t>(slot), op);
  return FirstQTensor(t.dim(), t.particles(), std::move(out));
}

FirstQTensor apply_each(const Matrix& u, const FirstQTensor& t) {
  if (u.rows() != t.dim() || u.cols() != t.dim()) throw Error("single-particle operator dimension mismatch");
  std::vector<Eigen::Index> dims(static_cast<std::size_t>(t.particles()), t.dim());
  Vector data = t.amps();
  for (std::size_t j = 0; j < dims.size(); ++j) data = contract_slot(dims, data, j, u);
  return FirstQTensor(t.dim(), t.particles(), std::move(data));
}

FirstQTensor apply(const Matrix& op, const FirstQTensor& t) {
  if (op.rows() != t.size() || op.cols() != t.size()) throw Error("operator dimension does not match tensor");
  return FirstQTensor(t.dim(), t.particles(), op * t.amps());
}

Complex expectation(const FirstQTensor& t, const Matrix& op) {
  if (op.rows() != t.size() || op.cols() != t.size()) throw Error("operator dimension does not match tensor");
  return t.amps().dot(op * t.amps());
}

Complex inner(const FirstQTensor& a, const FirstQTensor& b) {
  if (a.dim() != b.dim() || a.particles() != b.particles()) throw Error("tensor shape mismatch in inner product");
  return a.amps().dot(b.amps());
}

Matrix one_body_density(const FirstQTensor& t) {
  if (t.particles() < 1) throw Error("one-body density needs at least one particle");
  const Eigen::Index rest = t.size() / t.dim();
  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(t.amps().data(),
                                                                                               t.dim(), rest);
  return m * m.adjoint();
}

namespace {

double occupation_weight(const std::vector<int>& sorted, int dim) {
  std::vector<int> counts(static_cast<std::size_t>(dim), 0);
  for (int i : sorted) ++counts[static_cast<std::size_t>(i)];
  double denom = 1.0;
  for (int c : counts) denom *= static_cast<double>(factorial(c));
  return std::sqrt(static_cast<double>(factorial(static_cast<int>(sorted.size()))) / denom);
}

}  // namespace

StateVector to_fock(const FirstQTensor& t, const ModeCatalog& catalog) {
  if (static_cast<std::size_t>(t.dim()) != catalog.size()) throw Error("tensor dimension does not match catalog size");
  const SymTag want = tag_for(catalog.statistics());
  if (!t.has_symmetry(want)) {
    throw Error(std::string("tensor is not ") + (want == SymTag::Symmetric ? "symmetric" : "antisymmetric") +
                " as required by " + std::string(to_string(catalog.statistics())) + " statistics");
  }
  StateVector::Terms terms;
  for (const auto& occ : sector_basis(catalog, t.particles())) {
    std::vector<int> sorted;
    for (std::size_t m = 0; m < occ.size(); ++m) {
      for (int k = 0; k < occ[m]; ++k) sorted.push_back(static_cast<int>(m));
    }
    terms.emplace(occ, occupation_weight(sorted, t.dim()) * t.at(sorted));
  }
  return StateVector(catalog, std::move(terms));
}

FirstQTensor from_fock(const StateVector& s) {
  const auto& catalog = s.catalog();
  const int dim = static_cast<int>(catalog.size());
  int n = 0;
  if (!s.empty()) {
    const auto pn = s.particle_number();
    if (!pn) throw Error("state spans several particle-number sectors");
    n = *pn;
  }
  const bool fermi = catalog.statistics() == Statistics::Fermi;
  FirstQTensor shape(dim, n, Vector::Zero(ipow(dim, n)));
  Vector amps = Vector::Zero(shape.size());
  for (Eigen::Index flat = 0; flat < shape.size(); ++flat) {
    auto idx = shape.multi_index(flat);
    // Sorting sign: parity of the inversions of idx.
    int inversions = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        if (idx[a] > idx[b]) ++inversions;
      }
    }
    auto sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    if (fermi && std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
    auto occ = OccupationState::empty(catalog.size());
    for (int m : sorted) occ = occ.with(static_cast<std::size_t>(m), occ[static_cast<std::size_t>(m)] + 1);
    const double sign = (fermi && inversions % 2 == 1) ? -1.0 : 1.0;
    amps(flat) = sign * s.amplitude(occ) / occupation_weight(sorted, dim);
  }
  return FirstQTensor(dim, n, std::move(amps), tag_for(catalog.statistics()));
}

std::vector<std::string> SingleParticleBasis::labels() const {
  std::vector<std::string> out;
  for (const auto& e : external) {
    for (const auto& i : internal) out.push_back(e + "," + i);
  }
  return out;
}

FirstQTensor effective_distinguish(const FirstQTensor& t, const std::vector<Vector>& ext_states, int internal_dim) {
  const int n = t.particles();
  if (static_cast<int>(ext_states.size()) != n) throw Error("need one external state per particle");
  if (internal_dim < 1 || t.dim() % internal_dim != 0) throw Error("internal dimension does not divide tensor dimension");
  const Eigen::Index ext_dim = t.dim() / internal_dim;
  Matrix ext(ext_dim, n);
  for (int j = 0; j < n; ++j) {
    if (ext_states[static_cast<std::size_t>(j)].size() != ext_dim) throw Error("external state dimension mismatch");
    ext.col(j) = ext_states[static_cast<std::size_t>(j)];
  }
  if (!has_orthonormal_columns(ext)) throw Error("external states are not pairwise orthonormal");

  std::vector<Eigen::Index> dims(static_cast<std::size_t>(n), t.dim());
  Vector data = t.amps();
  for (int j = 0; j < n; ++j) {
    // Row s of the slot map is the bra ⟨ψ_j, s|.
    Matrix bra = Matrix::Zero(internal_dim, t.dim());
    for (Eigen::Index e = 0; e < ext_dim; ++e) {
      for (int s = 0; s < internal_dim; ++s) bra(s, e * internal_dim + s) = std::conj(ext(e, j));
    }
    data = contract_slot(dims, data, static_cast<std::size_t>(j), bra);
  }
  data *= std::sqrt(static_cast<double>(factorial(n)));
  const double outside = t.amps().squaredNorm() - data.squaredNorm();
  if (outside > kTolerance) throw Error("state has weight outside the effective-distinguishability domain");
  return FirstQTensor(internal_dim, n, std::move(data));
}

std::vector<SectorBlock> split_by_subspaces(const FirstQTensor& t, const Matrix& v1, const Matrix& v2,
                                            double min_weight) {
  const int d = t.dim();
  if (v1.rows() != d || v2.rows() != d) throw Error("subspace basis dimension mismatch");
  if (v1.cols() + v2.cols() != d) throw Error("subspaces do not span the single-particle space");
  Matrix w(d, d);
  w << v1, v2;
  if (!has_orthonormal_columns(w)) throw Error("subspace bases are not orthonormal and mutually orthogonal");

  const int n = t.particles();
  std::vector<SectorBlock> out;
  for (int n1 = 0; n1 <= n; ++n1) {
    std::vector<Eigen::Index> dims(static_cast<std::size_t>(n), d);
    Vector data = t.amps();
    for (int j = 0; j < n; ++j) {
      const Matrix proj = j < n1 ? Matrix(v1.adjoint()) : Matrix(v2.adjoint());
      data = contract_slot(dims, data, static_cast<std::size_t>(j), proj);
    }
    const Eigen::Index rows = ipow(v1.cols(), n1);
    const Eigen::Index cols = ipow(v2.cols(), n - n1);
    Matrix block(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) block(r, c) = data(r * cols + c);
    }
    block *= std::sqrt(static_cast<double>(binomial(n, n1)));
    const double weight = block.squaredNorm();
    if (weight < min_weight) continue;
    out.push_back(SectorBlock{n1, n - n1, weight, block / std::sqrt(weight)});
  }
  return out;
}

}  // namespace entwb
