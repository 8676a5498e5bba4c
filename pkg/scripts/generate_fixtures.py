import argparse
import os
import sys

import numpy as np

# Ensure src is in python path
src_path = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src")
sys.path.append(src_path)

from mesh_stego.mesh import generators
from mesh_stego.mesh.io import save_mesh

# name -> (generator, kwargs)
FIXTURES = {
    "sphere_642.off": (generators.noisy_sphere, {"subdivisions": 3, "noise": 0.02, "seed": 1}),
    "sphere_2562.off": (generators.noisy_sphere, {"subdivisions": 4, "noise": 0.01, "seed": 2}),
    "terrain_2601.ply": (generators.random_surface, {"nx": 50, "ny": 50, "seed": 3}),
    "terrain_961.off": (generators.random_surface, {"nx": 30, "ny": 30, "seed": 4}),
    "plane_625.off": (generators.grid, {"nx": 24, "ny": 24, "jitter": 0.2, "seed": 5}),
}


def generate_fixtures(out_dir: str, decimals: int, message_bytes: int, seed: int):
    os.makedirs(out_dir, exist_ok=True)
    print(f"Writing fixtures to {out_dir} ({decimals} decimals)...")
    for name, (make, kwargs) in FIXTURES.items():
        mesh = make(decimals=decimals, **kwargs)
        save_mesh(os.path.join(out_dir, name), mesh, decimals)
        print(f"  {name}: {mesh.n_vertices} vertices, {mesh.n_faces} faces")

    rng = np.random.default_rng(seed)
    message_path = os.path.join(out_dir, "message.bin")
    with open(message_path, "wb") as f:
        f.write(rng.integers(0, 256, message_bytes, dtype=np.uint8).tobytes())
    print(f"  message.bin: {message_bytes} random bytes")
    print("Fixtures ready.")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description='Generate synthetic cover meshes for mesh-stego')
    parser.add_argument('--out', type=str, default=os.path.join("scripts", "data"), help='Output directory')
    parser.add_argument('--decimals', type=int, default=6, help='Fractional digits written (default: 6)')
    parser.add_argument('--message-bytes', type=int, default=256, help='Size of the random message (default: 256)')
    parser.add_argument('--seed', type=int, default=0, help='Message seed (default: 0)')
    args = parser.parse_args()

    generate_fixtures(args.out, args.decimals, args.message_bytes, args.seed)
