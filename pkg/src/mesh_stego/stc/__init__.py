from mesh_stego.stc.submatrix import Submatrix, block_widths, build_submatrix, derive_seed
from mesh_stego.stc.trellis import parity_check_matrix, stc_cost, stc_decode, stc_encode

__all__ = ["Submatrix", "block_widths", "build_submatrix", "derive_seed",
           "parity_check_matrix", "stc_cost", "stc_decode", "stc_encode"]
