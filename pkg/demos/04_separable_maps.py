"""
Telling local maps from entangling ones
=======================================

A map that is a signed sum of product channels leaves certain partial
traces of its Choi matrix empty. Entangling gates break that pattern.
"""

# %%
import numpy as np

from noiseinv import channel as ch
from noiseinv import measures, randomops

# %%
cnot = np.eye(4)[[0, 1, 3, 2]]
swap = np.eye(4)[[0, 2, 1, 3]]
for name, u in (("CNOT", cnot), ("SWAP", swap)):
    v = measures.separability_necessary(ch.choi_from_unitary(u, (2, 2)))
    print(name, v.passes, round(v.violation, 4), v.witness)

# %%
rng = np.random.default_rng(1)
local = ch.tensor(randomops.cptp((2,), rng), randomops.cptp((2,), rng))
print("product channel:", bool(measures.separability_necessary(local)))

# %%
# Channels can be stored and re-read as JSON for the ingest command.
import json
import tempfile
from pathlib import Path

from noiseinv.experiments import ingest_channel

path = Path(tempfile.mkdtemp()) / "cnot.json"
ch.save_json(ch.choi_from_unitary(cnot, (2, 2)), path)
print(json.dumps(ingest_channel(path)["separability_witness"]))
