"""
Sampling cost of an inverse
===========================

The implementability ``nu`` is the log of the smallest total weight of a
signed mix of channels that reproduces a map. For orthogonal mixed-unitary
inverses it equals ``log2(||Choi||_1 / d)``; otherwise the Choi spectrum
still brackets it.
"""

# %%
import math

from noiseinv import linalg, measures, noise
from noiseinv.noise import NoiseFamily

# %%
# Closed form against the trace norm, two-qubit depolarizing.
for eps in (0.01, 0.1, 0.3):
    f = NoiseFamily("depolarizing", 2, eps)
    tn = linalg.trace_norm(noise.build_inverse(f).matrix) / f.d
    print(f"eps={eps:<5} nu={noise.nu_inverse(f):.6f}  log2(||L||_1/d)={math.log2(tn):.6f}")

# %%
# Root-mean-square weight mu tracks nu/2 at small error rates.
for kind in ("pauli", "depolarizing", "dephasing", "amplitude_damping"):
    f = NoiseFamily(kind, 2, 0.02)
    print(f"{kind:18s} mu={noise.mu_inverse(f):.5f}  nu/2={noise.nu_inverse(f) / 2:.5f}")

# %%
# Spectral bounds for the depolarizing inverse: the lower one is tight,
# and the interval shrinks as qubits are added.
for n in (1, 2):
    b = measures.nu_bounds(noise.build_inverse(NoiseFamily("depolarizing", n, 0.2)))
    print(f"n={n}: {b.lower:.5f} <= nu <= {b.upper:.5f}")

# %%
# Amplitude damping: a product decomposition gives an upper bound on the
# cost, and the spectrum gives a lower one.
f = NoiseFamily("amplitude_damping", 2, 0.2)
eta = measures.eta_upper(noise.product_inverse_terms(f), target=noise.build_inverse(f))
b = measures.nu_bounds(noise.build_inverse(f))
print(f"{b.lower:.5f} <= nu <= {min(eta, b.upper):.5f}")
