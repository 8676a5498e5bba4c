from mesh_stego.mesh.mesh import Mesh
from mesh_stego.mesh.io import parse_mesh, write_mesh, read_mesh, save_mesh, format_from_path

__all__ = ["Mesh", "parse_mesh", "write_mesh", "read_mesh", "save_mesh", "format_from_path"]
