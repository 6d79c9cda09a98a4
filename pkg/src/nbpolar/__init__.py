"""Non-binary polar codes with Reed-Solomon and Hermitian kernels."""

__version__ = "0.1.0"

from .gf import FieldSpec, field_new, field_of_size
from .kernel import (Kernel, HermitianBasis, exponent, gv_lower_bound, gv_partial_distance,
                     hermitian_basis, hermitian_kernel, partial_distances, rs_exponent_formula,
                     rs_kernel, rs_kernel_modified_4_2)
from .polar import (ChannelModel, CodeSpec, SCDecoder, biawgn_channel, bit_reversal_perm,
                    channel_transmit, encode, erasure_channel, kron_power, likelihoods, sc_decode)
from .analysis import (ReliabilityProfile, RowSelection, erasure_evolve, estimate_reliabilities_mc,
                       hyperbolic_rows, min_distance_bruteforce, rm_rows, select_frozen,
                       simulate_blocks, union_bound)
