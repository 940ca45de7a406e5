#pragma once

namespace adaptmt {

// Lan-DeMets O'Brien-Fleming type spend at information fraction t.
double spend_alpha1(double t, double alpha);

// Stage-two level of the inverse-normal combination test: the alpha_2 with
// P(P1 <= alpha_1) + P(P1 > alpha_1, C(P1, P2) <= alpha_2) = alpha for
// independent uniform P1, P2.
double solve_alpha2(double alpha, double alpha_1, double nu1, double nu2);

// 1 - Phi(nu1 * Phi^{-1}(1 - p1) + nu2 * Phi^{-1}(1 - p2)).
// p2 = 1 stands for "no stage-two data" and yields 1 whenever nu2 > 0.
double inverse_normal_combine(double p1, double p2, double nu1, double nu2);

}  // namespace adaptmt
