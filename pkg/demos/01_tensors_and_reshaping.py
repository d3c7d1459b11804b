"""Feature volumes, trilinear sampling, and the lift/project reshape.

A feature volume is a dense (H, W, D, C) float32 tensor indexed
(y, x, z, c), with voxel centers on the integer lattice. This script walks
through sampling semantics and the lossless reshape between a 2D map with
D*C channels and its 3D counterpart, then round-trips a tensor through the
.volt container.

Run:  python3 demos/01_tensors_and_reshaping.py
"""

from pathlib import Path

import numpy as np

from volwarp import Image, Volume, lift, project, read_volt, trilinear_sample, write_volt

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

rng = np.random.default_rng(0)

# --- sampling at and between voxel centers ----------------------------------

volume = Volume(rng.uniform(0, 1, size=(4, 5, 3, 2)).astype(np.float32))

# a lattice point returns the stored feature vector, bit for bit
print("stored  at (2,3,1):", volume.data[2, 3, 1])
print("sampled at (2,3,1):", trilinear_sample(volume, (2, 3, 1)))

# halfway between two centers, the blend is the midpoint
ramp = np.zeros((1, 1, 2, 1), dtype=np.float32)
ramp[0, 0, 1, 0] = 1.0
print("midpoint of a 0->1 ramp:", trilinear_sample(Volume(ramp), (0, 0, 0.5))[0])

# outside the grid everything reads zero; features can fall off the edge
print("far outside:", trilinear_sample(volume, (-5, -5, -5)))

# --- lift and project --------------------------------------------------------

# A 2D map with D*C channels holds a volume in disguise: channel k belongs
# to depth k // C, channel k % C. lift() makes the depth axis explicit and
# project() undoes it, both as pure reindexing.
flat = Image(np.array([[[1.0, 2.0, 3.0, 4.0]]], dtype=np.float32))
lifted = lift(flat, depth=2, channels=2)
print("\ndepth 0 channels:", lifted.data[0, 0, 0], " depth 1 channels:", lifted.data[0, 0, 1])
print("project(lift(m)) == m:", np.array_equal(project(lifted).data, flat.data))

big = Volume(rng.normal(size=(6, 6, 4, 8)).astype(np.float32))
assert np.array_equal(lift(project(big), 4, 8).data, big.data)
print("lift/project round trip on a", big.data.shape, "volume: bit-exact")

# --- the .volt container -----------------------------------------------------

path = out_dir / "demo_volume.volt"
write_volt(path, big)
back = read_volt(path)
print("\nwrote", path.name, f"({path.stat().st_size} bytes)")
print("volt round trip bit-exact:", back.data.tobytes() == big.data.tobytes())
