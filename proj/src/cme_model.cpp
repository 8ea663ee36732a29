#include "gapsol/cme_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>

#include "gapsol/error.hpp"

namespace gapsol {

bool CmeParameters::operator==(const CmeParameters& other) const {
    if (dim != other.dim || modes != other.modes || velocities.size() != other.velocities.size() ||
        gamma != other.gamma)
        return false;
    for (std::size_t j = 0; j < velocities.size(); ++j) {
        if (velocities[j].size() != other.velocities[j].size() || velocities[j] != other.velocities[j])
            return false;
    }
    return kappa.rows() == other.kappa.rows() && kappa.cols() == other.kappa.cols() && kappa == other.kappa;
}

double hermiticity_defect(const Eigen::MatrixXcd& kappa) {
    const double scale = kappa.size() == 0 ? 0.0 : kappa.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    const double defect = (kappa - kappa.adjoint()).cwiseAbs().maxCoeff();
    return defect / scale;
}

CmeParameters validate(CmeParameters raw) {
    if (raw.dim <= 0) throw Error(ErrorCode::DimensionMismatch, "dimension d must be positive");
    if (raw.modes <= 0) throw Error(ErrorCode::DimensionMismatch, "mode count N must be positive");
    if (static_cast<int>(raw.velocities.size()) != raw.modes)
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(raw.modes) +
                                                      " group velocities, got " +
                                                      std::to_string(raw.velocities.size()));
    for (std::size_t j = 0; j < raw.velocities.size(); ++j) {
        if (raw.velocities[j].size() != raw.dim)
            throw Error(ErrorCode::DimensionMismatch, "velocity " + std::to_string(j + 1) + " has " +
                                                          std::to_string(raw.velocities[j].size()) +
                                                          " components, expected " + std::to_string(raw.dim));
        if (!raw.velocities[j].allFinite())
            throw Error(ErrorCode::InvalidArgument, "velocity " + std::to_string(j + 1) + " is not finite");
    }
    if (raw.kappa.rows() != raw.modes || raw.kappa.cols() != raw.modes)
        throw Error(ErrorCode::DimensionMismatch, "kappa must be " + std::to_string(raw.modes) + "x" +
                                                      std::to_string(raw.modes));
    if (!raw.kappa.allFinite()) throw Error(ErrorCode::InvalidArgument, "kappa is not finite");
    if (const double defect = hermiticity_defect(raw.kappa); defect > 1e-12)
        throw Error(ErrorCode::NonHermitianCoupling,
                    "max |kappa_jr - conj(kappa_rj)| / max |kappa| = " + std::to_string(defect));
    for (const auto& g : raw.gamma) {
        for (int idx : {g.j, g.m, g.n, g.o}) {
            if (idx < 0 || idx >= raw.modes)
                throw Error(ErrorCode::IndexOutOfRange, "gamma index " + std::to_string(idx + 1) +
                                                            " outside 1.." + std::to_string(raw.modes));
        }
    }
    return raw;
}

void nonlinearity(std::span<const GammaEntry> gamma, std::span<const cplx> a, std::span<cplx> out) {
    std::fill(out.begin(), out.end(), cplx{});
    for (const auto& g : gamma) out[g.j] += g.value * a[g.m] * std::conj(a[g.n]) * a[g.o];
}

Eigen::VectorXcd nonlinearity(const CmeParameters& params, const Eigen::VectorXcd& a) {
    if (a.size() != params.modes)
        throw Error(ErrorCode::DimensionMismatch, "amplitude vector must have N entries");
    Eigen::VectorXcd out(params.modes);
    nonlinearity(params.gamma, std::span<const cplx>(a.data(), a.size()), std::span<cplx>(out.data(), out.size()));
    return out;
}

CmeParameters negate_nonlinearity(const CmeParameters& params) {
    CmeParameters flipped = params;
    for (auto& g : flipped.gamma) g.value = -g.value;
    return flipped;
}

CmeParameters build_symmetric_example(const Eigen::VectorXd& v, const Eigen::VectorXd& w, cplx a1, cplx a2,
                                      cplx a3) {
    if (v.size() != 2 || w.size() != 2)
        throw Error(ErrorCode::DimensionMismatch, "symmetric example needs two-dimensional v and w");

    CmeParameters p;
    p.dim = 2;
    p.modes = 4;
    p.velocities = {v, -v, w, -w};

    p.kappa = Eigen::MatrixXcd::Zero(4, 4);
    auto couple = [&](int j, int r, cplx value) {
        p.kappa(j, r) = value;
        p.kappa(r, j) = std::conj(value);
    };
    couple(0, 1, a1);  // kappa_12
    couple(2, 3, a1);  // kappa_34
    couple(0, 3, a2);  // kappa_14
    couple(2, 1, a2);  // kappa_32
    couple(0, 2, a3);  // kappa_13
    couple(3, 1, a3);  // kappa_42

    // Each (j,m,n,o) slot appears once; gamma_j^{(j,j,j)} is not double counted.
    std::set<std::array<int, 4>> slots;
    for (int j = 0; j < 4; ++j) {
        slots.insert({j, j, j, j});
        for (int i = 0; i < 4; ++i) {
            slots.insert({j, j, i, i});
            slots.insert({j, i, i, j});
        }
    }
    constexpr std::array<std::array<int, 4>, 8> cross = {{
        {1, 3, 2, 4}, {1, 4, 2, 3}, {2, 3, 1, 4}, {2, 4, 1, 3},
        {3, 1, 4, 2}, {3, 2, 4, 1}, {4, 1, 3, 2}, {4, 2, 3, 1},
    }};
    for (const auto& c : cross) slots.insert({c[0] - 1, c[1] - 1, c[2] - 1, c[3] - 1});
    for (const auto& s : slots) p.gamma.push_back({s[0], s[1], s[2], s[3], cplx{1.0, 0.0}});

    return validate(std::move(p));
}

CmeParameters build_two_mode_1d(cplx kappa, double speed, double cubic) {
    CmeParameters p;
    p.dim = 1;
    p.modes = 2;
    p.velocities = {Eigen::VectorXd::Constant(1, speed), Eigen::VectorXd::Constant(1, -speed)};
    p.kappa = Eigen::MatrixXcd::Zero(2, 2);
    p.kappa(0, 1) = kappa;
    p.kappa(1, 0) = std::conj(kappa);
    if (cubic != 0.0) {
        p.gamma.push_back({0, 0, 0, 0, cplx{cubic, 0.0}});
        p.gamma.push_back({1, 1, 1, 1, cplx{cubic, 0.0}});
    }
    return validate(std::move(p));
}

}  // namespace gapsol
