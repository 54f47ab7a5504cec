"""
Noise channels and their inverses
=================================

Build the four noise families as Choi matrices, invert them, and look at
what the inverse is: trace preserving and Hermitian preserving, but not a
physical channel.
"""

# %%
import numpy as np

from noiseinv import channel as ch
from noiseinv import noise
from noiseinv.noise import NoiseFamily

np.set_printoptions(precision=4, suppress=True)

# %%
# A single-qubit depolarizing channel at 10% error, applied to |+><+|.
dep = NoiseFamily("depolarizing", 1, 0.1)
plus = np.full((2, 2), 0.5)
print(ch.apply_matrix(noise.build_channel(dep), plus))

# %%
# The inverse undoes it exactly.
inv = noise.build_inverse(dep)
roundtrip = ch.apply_matrix(inv, ch.apply_matrix(noise.build_channel(dep), plus))
print(np.max(np.abs(roundtrip - plus)))

# %%
# Every family, on two qubits: the inverse composes to the identity map,
# keeps traces and Hermiticity, and fails complete positivity.
for kind in ("pauli", "depolarizing", "dephasing", "amplitude_damping"):
    f = NoiseFamily(kind, 2, 0.2)
    c, c_inv = noise.build_channel(f), noise.build_inverse(f)
    err = ch.choi_distance(ch.compose(c_inv, c), ch.identity_channel(f.dims))
    print(f"{kind:18s} |E^-1 E - id|_F = {err:.1e}  CPTP={ch.is_cptp(c)}  "
          f"inverse TP={ch.is_tp(c_inv)} CP={ch.is_cp(c_inv)}")

# %%
# Mixed-unitary families carry their signed decomposition explicitly.
dec = noise.inverse_decomposition(NoiseFamily("depolarizing", 1, 0.1))
print(np.round(dec.weights, 4), "orthogonal:", dec.is_orthogonal)

# %%
# Amplitude damping is not mixed-unitary; its inverse splits into a phase
# damping channel minus a reset.
for q, term in noise.amplitude_damping_inverse_terms(0.1):
    print(f"{q:+.4f}", "CPTP" if ch.is_cptp(term) else "not CPTP")
