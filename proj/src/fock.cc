#include "optiq/fock.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace optiq {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double sqrt_factorial_product(const std::vector<int> &occ) {
    double p = 1.0;
    for (int n : occ) p *= factorial(n);
    return std::sqrt(p);
}

void check_photon_cap(int n) {
    if (n > kMaxPhotons) {
        throw std::invalid_argument("photon number " + std::to_string(n) + " exceeds the cap of " +
                                    std::to_string(kMaxPhotons));
    }
}

void require_same_space(const PhotonicState &a, const PhotonicState &b) {
    if (a.layout() != b.layout()) {
        throw std::invalid_argument("states live on different mode layouts: " + a.layout().describe() + " vs " +
                                    b.layout().describe());
    }
    if (a.n_photons() != b.n_photons() && !a.empty() && !b.empty()) {
        throw std::invalid_argument("states have different photon numbers");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// ModeLayout

ModeLayout::ModeLayout(std::vector<int> paths) : paths_(std::move(paths)) {
    for (size_t k = 0; k < paths_.size(); ++k) {
        if (paths_[k] < 0) throw std::invalid_argument("path labels must be non-negative");
        if (k > 0 && paths_[k] <= paths_[k - 1]) {
            throw std::invalid_argument("path labels must be strictly increasing");
        }
    }
    if (n_modes() > kMaxModes) {
        throw std::invalid_argument("mode count " + std::to_string(n_modes()) + " exceeds the cap of " +
                                    std::to_string(kMaxModes));
    }
}

bool ModeLayout::has_path(int path) const {
    return std::binary_search(paths_.begin(), paths_.end(), path);
}

int ModeLayout::path_slot(int path) const {
    auto it = std::lower_bound(paths_.begin(), paths_.end(), path);
    if (it == paths_.end() || *it != path) {
        throw std::invalid_argument("unknown path " + std::to_string(path) + " in layout " + describe());
    }
    return static_cast<int>(it - paths_.begin());
}

ModeIndex ModeLayout::mode_at(int index) const {
    if (index < 0 || index >= n_modes()) throw std::out_of_range("mode index out of range");
    return ModeIndex{paths_[index / 2], static_cast<Pol>(index % 2)};
}

ModeLayout ModeLayout::without_path(int path) const {
    std::vector<int> rest;
    path_slot(path);
    std::copy_if(paths_.begin(), paths_.end(), std::back_inserter(rest), [&](int p) { return p != path; });
    return ModeLayout(std::move(rest));
}

std::string ModeLayout::describe() const {
    std::ostringstream os;
    os << "[";
    for (size_t k = 0; k < paths_.size(); ++k) os << (k ? "," : "") << paths_[k];
    os << "]";
    return os.str();
}

// ---------------------------------------------------------------------------
// FockVector

FockVector::FockVector(std::vector<int> occupations) : occ_(std::move(occupations)) {
    for (int n : occ_) {
        if (n < 0) throw std::invalid_argument("occupation numbers must be non-negative");
    }
}

int FockVector::total() const {
    return std::accumulate(occ_.begin(), occ_.end(), 0);
}

std::string FockVector::to_string() const {
    std::ostringstream os;
    os << "|";
    for (size_t k = 0; k < occ_.size(); ++k) os << (k ? "," : "") << occ_[k];
    os << ">";
    return os.str();
}

// ---------------------------------------------------------------------------
// SingleParticleUnitary

double unitarity_deviation(const Eigen::MatrixXcd &m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    if (m.size() == 0) return 0.0;
    Eigen::MatrixXcd d = m.adjoint() * m - Eigen::MatrixXcd::Identity(m.rows(), m.cols());
    return d.cwiseAbs().maxCoeff();
}

SingleParticleUnitary::SingleParticleUnitary(Eigen::MatrixXcd matrix) : m_(std::move(matrix)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("unitary must be square");
    if (m_.rows() > kMaxModes) throw std::invalid_argument("unitary exceeds the mode cap");
    double dev = unitarity_deviation(m_);
    if (!(dev <= kUnitaryTolerance)) {
        throw std::invalid_argument("matrix is not unitary (max deviation " + std::to_string(dev) + ")");
    }
}

SingleParticleUnitary SingleParticleUnitary::identity(int n_modes) {
    return SingleParticleUnitary(Eigen::MatrixXcd::Identity(n_modes, n_modes));
}

SingleParticleUnitary SingleParticleUnitary::then_after(const SingleParticleUnitary &first) const {
    if (first.n_modes() != n_modes()) throw std::invalid_argument("unitary dimensions differ");
    return SingleParticleUnitary(m_ * first.m_);
}

SingleParticleUnitary SingleParticleUnitary::adjoint() const {
    return SingleParticleUnitary(m_.adjoint());
}

// ---------------------------------------------------------------------------
// PhotonicState

PhotonicState PhotonicState::vacuum(ModeLayout layout) {
    PhotonicState s(std::move(layout), 0);
    s.amps_.emplace(FockVector(std::vector<int>(s.n_modes(), 0)), cplx(1.0));
    return s;
}

PhotonicState PhotonicState::from_amplitudes(ModeLayout layout, const Amplitudes &amplitudes) {
    int n = amplitudes.empty() ? 0 : amplitudes.begin()->first.total();
    check_photon_cap(n);
    PhotonicState s(std::move(layout), n);
    for (const auto &[v, a] : amplitudes) {
        if (v.size() != s.n_modes()) throw std::invalid_argument("Fock vector length differs from mode count");
        if (v.total() != n) throw std::invalid_argument("mixed photon numbers in one state");
        s.amps_[v] += a;
    }
    s.prune();
    return s;
}

cplx PhotonicState::amplitude(const FockVector &v) const {
    auto it = amps_.find(v);
    return it == amps_.end() ? cplx(0.0) : it->second;
}

double PhotonicState::norm_squared() const {
    double n = 0.0;
    for (const auto &[v, a] : amps_) n += std::norm(a);
    return n;
}

PhotonicState PhotonicState::normalized() const {
    double n = norm_squared();
    if (!(n > 0.0)) throw std::invalid_argument("cannot normalize an empty state");
    return scaled(1.0 / std::sqrt(n));
}

PhotonicState PhotonicState::scaled(cplx factor) const {
    PhotonicState s(layout_, n_photons_);
    for (const auto &[v, a] : amps_) s.amps_.emplace(v, a * factor);
    s.prune();
    return s;
}

void PhotonicState::prune() {
    std::erase_if(amps_, [](const auto &kv) { return std::abs(kv.second) < kPruneTolerance; });
}

std::string PhotonicState::to_string() const {
    std::ostringstream os;
    os.precision(12);
    bool first = true;
    for (const auto &[v, a] : amps_) {
        os << (first ? "" : " + ") << "(" << a.real() << (a.imag() < 0 ? "" : "+") << a.imag() << "i)"
           << v.to_string();
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

// ---------------------------------------------------------------------------
// Operations

PhotonicState inject_photon(const PhotonicState &state, int path, const QubitState &qubit) {
    const ModeLayout &layout = state.layout();
    int mh = layout.mode(path, Pol::H);
    int mv = layout.mode(path, Pol::V);
    check_photon_cap(state.n_photons() + 1);

    PhotonicState out(layout, state.n_photons() + 1);
    for (const auto &[v, a] : state.amps_) {
        if (v[mh] != 0 || v[mv] != 0) {
            throw std::invalid_argument("path " + std::to_string(path) + " is already occupied");
        }
        std::vector<int> occ = v.occupations();
        occ[mh] = 1;
        out.amps_[FockVector(occ)] += a * qubit.alpha();
        occ[mh] = 0;
        occ[mv] = 1;
        out.amps_[FockVector(occ)] += a * qubit.beta();
    }
    out.prune();
    return out;
}

PhotonicState apply_unitary(const PhotonicState &state, const SingleParticleUnitary &u) {
    const int m = state.n_modes();
    if (u.n_modes() != m) {
        throw std::invalid_argument("unitary acts on " + std::to_string(u.n_modes()) + " modes, state has " +
                                    std::to_string(m));
    }
    PhotonicState out(state.layout(), state.n_photons());
    std::map<std::vector<int>, cplx> partial;
    std::map<std::vector<int>, cplx> next;
    for (const auto &[in, amp] : state.amps_) {
        // |s> = prod_i (a_i^dag)^{s_i} / sqrt(s_i!) |0>; substitute a_i^dag -> sum_j u_ji a_j^dag
        // and expand the monomials one creation operator at a time.
        partial.clear();
        partial.emplace(std::vector<int>(m, 0), amp / sqrt_factorial_product(in.occupations()));
        for (int i = 0; i < m; ++i) {
            for (int rep = 0; rep < in[i]; ++rep) {
                next.clear();
                for (const auto &[occ, c] : partial) {
                    for (int j = 0; j < m; ++j) {
                        cplx uji = u(j, i);
                        if (uji == cplx(0.0)) continue;
                        std::vector<int> o = occ;
                        ++o[j];
                        next[std::move(o)] += c * uji;
                    }
                }
                partial.swap(next);
            }
        }
        for (const auto &[occ, c] : partial) {
            out.amps_[FockVector(occ)] += c * sqrt_factorial_product(occ);
        }
    }
    out.prune();
    return out;
}

PhotonicState superpose(const PhotonicState &a, cplx ca, const PhotonicState &b, cplx cb) {
    require_same_space(a, b);
    PhotonicState out(a.layout(), a.empty() ? b.n_photons() : a.n_photons());
    for (const auto &[v, x] : a.amps_) out.amps_[v] += ca * x;
    for (const auto &[v, x] : b.amps_) out.amps_[v] += cb * x;
    out.prune();
    return out;
}

PhotonicState contract_path(const PhotonicState &state, int path, int n_h, int n_v) {
    const ModeLayout &layout = state.layout();
    int mh = layout.mode(path, Pol::H);
    int mv = layout.mode(path, Pol::V);
    PhotonicState out(layout.without_path(path), state.n_photons() - n_h - n_v);
    for (const auto &[v, a] : state.amps_) {
        if (v[mh] != n_h || v[mv] != n_v) continue;
        std::vector<int> occ;
        occ.reserve(v.size() - 2);
        for (int k = 0; k < v.size(); ++k) {
            if (k != mh && k != mv) occ.push_back(v[k]);
        }
        out.amps_[FockVector(std::move(occ))] += a;
    }
    if (out.n_photons_ < 0) out.n_photons_ = 0;
    out.prune();
    return out;
}

double path_count_probability(const PhotonicState &state, int path, int count) {
    int mh = state.layout().mode(path, Pol::H);
    int mv = state.layout().mode(path, Pol::V);
    double p = 0.0;
    for (const auto &[v, a] : state.amplitudes()) {
        if (v[mh] + v[mv] == count) p += std::norm(a);
    }
    return p;
}

cplx permanent(const Eigen::MatrixXcd &m) {
    const int n = static_cast<int>(m.rows());
    if (m.cols() != n) throw std::invalid_argument("permanent needs a square matrix");
    if (n == 0) return 1.0;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    cplx sum = 0.0;
    do {
        cplx term = 1.0;
        for (int r = 0; r < n; ++r) term *= m(r, perm[r]);
        sum += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return sum;
}

cplx transition_amplitude_oracle(const SingleParticleUnitary &u, const FockVector &input, const FockVector &output) {
    if (input.total() != output.total()) throw std::invalid_argument("photon numbers of input and output differ");
    if (input.size() != u.n_modes() || output.size() != u.n_modes()) {
        throw std::invalid_argument("Fock vector length differs from unitary dimension");
    }
    check_photon_cap(input.total());
    std::vector<int> rows, cols;
    for (int j = 0; j < output.size(); ++j) rows.insert(rows.end(), output[j], j);
    for (int i = 0; i < input.size(); ++i) cols.insert(cols.end(), input[i], i);
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXcd sub(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) sub(r, c) = u(rows[r], cols[c]);
    }
    return permanent(sub) / (sqrt_factorial_product(input.occupations()) * sqrt_factorial_product(output.occupations()));
}

std::vector<FockVector> enumerate_fock_basis(int n_modes, int n_photons) {
    std::vector<FockVector> out;
    std::vector<int> occ(n_modes, 0);
    // Recursive fill: mode k receives between 0 and the photons left.
    auto fill = [&](auto &&self, int k, int left) -> void {
        if (k == n_modes - 1) {
            occ[k] = left;
            out.emplace_back(occ);
            return;
        }
        for (int c = left; c >= 0; --c) {
            occ[k] = c;
            self(self, k + 1, left - c);
        }
    };
    if (n_modes == 0) {
        if (n_photons == 0) out.emplace_back(std::vector<int>{});
        return out;
    }
    fill(fill, 0, n_photons);
    std::sort(out.begin(), out.end());
    return out;
}

cplx inner_product(const PhotonicState &a, const PhotonicState &b) {
    require_same_space(a, b);
    cplx s = 0.0;
    for (const auto &[v, x] : a.amplitudes()) s += std::conj(x) * b.amplitude(v);
    return s;
}

double fidelity(const PhotonicState &a, const PhotonicState &b) {
    return std::min(1.0, std::norm(inner_product(a, b)));
}

}  // namespace optiq
