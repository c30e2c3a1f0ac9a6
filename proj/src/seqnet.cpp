#include "wtrom/seqnet.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace wtrom::seqnet {

namespace {

constexpr double kDegenerate = 1e-12;

// Rotation operator for symmetrical components, exp(j 2pi/3).
const Phasor kA{-0.5, std::sqrt(3.0) / 2.0};
const Phasor kA2{-0.5, -std::sqrt(3.0) / 2.0};

Phasor current_pos(const CurrentRefs& refs) { return {refs.id_pos, refs.iq_pos}; }
Phasor current_neg(const CurrentRefs& refs) { return {0.0, refs.iq_neg}; }

// Gaussian elimination with partial pivoting on an n x n complex system.
// Kept local: the largest system here is 6 x 6.
template <int N>
std::array<Phasor, N> solve_dense(std::array<std::array<Phasor, N + 1>, N> m) {
    for (int col = 0; col < N; ++col) {
        int pivot = col;
        for (int row = col + 1; row < N; ++row) {
            if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
        }
        if (std::abs(m[pivot][col]) < kDegenerate) {
            throw SingularNetwork("coupled sequence network is rank deficient");
        }
        std::swap(m[col], m[pivot]);
        for (int row = col + 1; row < N; ++row) {
            Phasor f = m[row][col] / m[col][col];
            for (int k = col; k <= N; ++k) m[row][k] -= f * m[col][k];
        }
    }
    std::array<Phasor, N> x{};
    for (int row = N - 1; row >= 0; --row) {
        Phasor acc = m[row][N];
        for (int k = row + 1; k < N; ++k) acc -= m[row][k] * x[k];
        x[row] = acc / m[row][row];
    }
    return x;
}

}  // namespace

Phasor prefault_voltage_pos(Phasor vg, const CurrentRefs& refs,
                            const SequenceImpedance& zg1, double omega_pu) {
    return vg + current_pos(refs) * zg1.z(omega_pu);
}

Phasor prefault_voltage_neg(const CurrentRefs& refs,
                            const SequenceImpedance& zg2, double omega_pu) {
    return current_neg(refs) * zg2.z(omega_pu);
}

Phasor postfault_voltage_pos(FaultKind kind, Phasor v_pre_pos, Phasor v_pre_neg,
                             const SequenceImpedanceSet& z, double zf_pu,
                             double omega_pu) {
    const Phasor zg1 = z.zg1.z(omega_pu);
    const Phasor zg2 = z.zg2.z(omega_pu);
    const Phasor zg0 = z.zg0.z(omega_pu);
    const Phasor zf{zf_pu, 0.0};

    Phasor den;
    switch (kind) {
        case FaultKind::SLG_A:
            den = zg1 + zg2 + zg0 + 3.0 * zf;
            if (std::abs(den) < kDegenerate)
                throw DivisionDegenerate("slg denominator magnitude below 1e-12");
            return v_pre_pos - (v_pre_pos + v_pre_neg) / den * zg1;
        case FaultKind::DLG_BC:
            den = zg2 + 2.0 * zg0 + 6.0 * zf;
            if (std::abs(den) < kDegenerate)
                throw DivisionDegenerate("dlg denominator magnitude below 1e-12");
            return (zg0 + 3.0 * zf) / den * (v_pre_pos + v_pre_neg);
        case FaultKind::DL_BC:
            den = zg1 + zg2 + zg0 + zf;
            if (std::abs(den) < kDegenerate)
                throw DivisionDegenerate("dl denominator magnitude below 1e-12");
            return v_pre_pos - (v_pre_pos - v_pre_neg) / den * zg1;
        case FaultKind::BALANCED_3PH:
            break;
    }
    throw UnsupportedKind("no closed-form fault voltage for balanced_3ph");
}

NetworkSolution solve_coupled_network(FaultKind kind, Phasor vg,
                                      Phasor i_pos, Phasor i_neg,
                                      const SequenceImpedanceSet& z, double zf_pu,
                                      double omega_pu) {
    if (kind == FaultKind::BALANCED_3PH) {
        throw UnsupportedKind("balanced_3ph is modelled as source scaling, not a "
                              "coupled-network solve");
    }
    const Phasor zg1 = z.zg1.z(omega_pu);
    const Phasor zg2 = z.zg2.z(omega_pu);
    const Phasor zg0 = z.zg0.z(omega_pu);
    const Phasor zf{zf_pu, 0.0};

    // Unknowns x = (v0, v1, v2, if0, if1, if2). Columns 0..5, rhs in 6.
    std::array<std::array<Phasor, 7>, 6> m{};

    // KCL at the terminal node of each sequence network, multiplied through
    // by the branch impedance so a shorted zero-sequence branch stays valid:
    //   v_s + z_s * if_s = source_s + z_s * injection_s
    m[0][1] = 1.0; m[0][4] = zg1; m[0][6] = vg + zg1 * i_pos;
    m[1][2] = 1.0; m[1][5] = zg2; m[1][6] = zg2 * i_neg;
    m[2][0] = 1.0; m[2][3] = zg0; m[2][6] = 0.0;

    // Phase-domain fault constraints, rows 3..5. Sequence order in the
    // operator expansion: phase a = x0 + x1 + x2, b = x0 + a^2 x1 + a x2,
    // c = x0 + a x1 + a^2 x2.
    switch (kind) {
        case FaultKind::SLG_A:
            // ib = 0, ic = 0, va = zf * ia.
            m[3][3] = 1.0; m[3][4] = kA2; m[3][5] = kA;
            m[4][3] = 1.0; m[4][4] = kA;  m[4][5] = kA2;
            m[5][0] = 1.0; m[5][1] = 1.0; m[5][2] = 1.0;
            m[5][3] = -zf; m[5][4] = -zf; m[5][5] = -zf;
            break;
        case FaultKind::DLG_BC:
            // ia = 0, vb = vc, vb = zf * (ib + ic): phases b and c tied
            // together and grounded through a common zf.
            m[3][3] = 1.0; m[3][4] = 1.0; m[3][5] = 1.0;
            m[4][1] = kA2 - kA; m[4][2] = kA - kA2;
            m[5][0] = 1.0; m[5][1] = kA2; m[5][2] = kA;
            m[5][3] = -2.0 * zf; m[5][4] = -(kA2 + kA) * zf; m[5][5] = -(kA + kA2) * zf;
            break;
        case FaultKind::DL_BC:
            // ia = 0, ib + ic = 0, vb - vc = zf * ib.
            m[3][3] = 1.0; m[3][4] = 1.0; m[3][5] = 1.0;
            m[4][3] = 2.0; m[4][4] = kA2 + kA; m[4][5] = kA + kA2;
            m[5][1] = kA2 - kA; m[5][2] = kA - kA2;
            m[5][3] = -zf; m[5][4] = -kA2 * zf; m[5][5] = -kA * zf;
            break;
        case FaultKind::BALANCED_3PH:
            break;  // unreachable, rejected above
    }

    auto x = solve_dense<6>(m);
    return NetworkSolution{x[1], x[2], x[0], x[4], x[5], x[3]};
}

NetworkSolution solve_coupled_network(FaultKind kind, Phasor vg,
                                      const CurrentRefs& refs,
                                      const SequenceImpedanceSet& z, double zf_pu,
                                      double omega_pu) {
    return solve_coupled_network(kind, vg, current_pos(refs), current_neg(refs),
                                 z, zf_pu, omega_pu);
}

NetworkSolution solve_unfaulted(Phasor vg, Phasor i_pos, Phasor i_neg,
                                const SequenceImpedanceSet& z, double omega_pu) {
    NetworkSolution out{};
    out.v_pos = vg + i_pos * z.zg1.z(omega_pu);
    out.v_neg = i_neg * z.zg2.z(omega_pu);
    out.v_zero = 0.0;
    return out;
}

Phasor balanced_retained_scale(const SequenceImpedance& zg1, double zf_pu,
                               double omega_pu) {
    const Phasor den = zg1.z(omega_pu) + Phasor{zf_pu, 0.0};
    if (std::abs(den) < kDegenerate)
        throw DivisionDegenerate("balanced divider zg1 + zf magnitude below 1e-12");
    return Phasor{zf_pu, 0.0} / den;
}

RouteComparison compare_routes(FaultKind kind, Phasor vg, const CurrentRefs& refs,
                               const SequenceImpedanceSet& z, double zf_pu,
                               double flag_tol, double omega_pu) {
    const Phasor v_pre_pos = prefault_voltage_pos(vg, refs, z.zg1, omega_pu);
    const Phasor v_pre_neg = prefault_voltage_neg(refs, z.zg2, omega_pu);

    RouteComparison cmp{};
    cmp.closed_form = postfault_voltage_pos(kind, v_pre_pos, v_pre_neg, z, zf_pu, omega_pu);
    cmp.solver = solve_coupled_network(kind, vg, refs, z, zf_pu, omega_pu).v_pos;
    cmp.rel_diff = std::abs(cmp.closed_form - cmp.solver) /
                   std::max(std::abs(cmp.solver), 1e-12);
    cmp.flagged = cmp.rel_diff > flag_tol;
    return cmp;
}

}  // namespace wtrom::seqnet
