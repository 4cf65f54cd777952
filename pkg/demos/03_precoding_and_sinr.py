"""Outer precoders and the deterministic SINR equivalents.

Two overlapping groups: compare the residual leakage of approximate block
diagonalization against covariance matching, solve the per-group fixed
points, and check the deterministic SINR against a Monte-Carlo run with
real Rayleigh draws and exact zero forcing.
"""

import numpy as np

from jsdm.channel import AntennaArray, UserProfile, one_ring_covariance
from jsdm.precoding import approx_bd_precoders, group_centroid, matched_precoders
from jsdm.sinr import deterministic_sinr, monte_carlo_sinr, solve_system

array = AntennaArray.ula(32)
spread = np.deg2rad(15.0)

groups = {0: [-30.0, -29.5, -29.0, -28.5], 1: [28.5, 29.0, 29.5, 30.0]}
covs, cents = {}, {}
uid = 0
users_by_group = {}
for g, thetas in groups.items():
    ids = []
    for theta in thetas:
        covs[uid] = one_ring_covariance(array, UserProfile(np.deg2rad(theta), spread,
                                                           user_id=uid))
        ids.append(uid)
        uid += 1
    cents[g] = group_centroid([covs[u] for u in ids], tuple(ids))
    users_by_group[g] = ids

streams = {0: 4, 1: 4}
print("group ranks:", {g: c.rank for g, c in cents.items()})

for name, precoders in (("matched", matched_precoders(cents)),
                        ("approx_bd", approx_bd_precoders(cents, streams, 32))):
    leak = np.trace(precoders.basis[0].conj().T @ cents[1].covariance.entries
                    @ precoders.basis[0]).real
    print(f"{name:10s}: b = {dict(precoders.dims)}, "
          f"leakage tr(B0^H R1 B0) = {leak:.4f}")

precoders = matched_precoders(cents)
solution = solve_system(precoders, {g: c.covariance for g, c in cents.items()},
                        streams)
for g, state in solution.states.items():
    print(f"group {g}: m_bar={state.m_bar:.4f}  zeta_bar^2={state.zeta_bar_sq:.3f}")
print("coupling:", {k: round(v, 5) for k, v in solution.upsilon.items()})

schedule = dict(users_by_group)
print()
print(" SNR(dB)   deterministic    Monte-Carlo (500 draws)")
for snr in (0.0, 10.0, 20.0):
    power = 10.0 ** (snr / 10.0)
    det = deterministic_sinr(schedule, solution, power)
    mc = monte_carlo_sinr(schedule, precoders, covs, power, 500, 7)
    print(f"  {snr:5.1f}    {det.sinr[0]:10.3f}       {mc.sinr[0]:10.3f}"
          f"   ({abs(det.sinr[0] - mc.sinr[0]) / mc.sinr[0]:.1%} off)")

print()
print("The equivalents track the noise-limited regime tightly; at")
print("interference-dominated SNR their accuracy needs large effective")
print("dimensions, and a b~12, 4-stream system visibly drifts.")
