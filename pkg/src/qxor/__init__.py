"""Classical simulation of a quantum protocol for XOR functions.

Alice holds ``x``, Bob holds ``y``, and both want ``f(x XOR y)``. The
protocol peels one GF(2) degree off ``f`` per round by Fourier sampling, so
its qubit cost scales with ``2^deg2(f) log ||f^||_0``.
"""
from .boolean_core import (BooleanFunction, FunctionSpecError, RealFunction, and_n, anf,
                           derivative, equality_n, format_function, from_anf, from_table,
                           gf2_degree, hamming_le, iterated_derivative, named_function,
                           parity, parse_function)
from .encoding import SumsetEncoding, build_encoding, decode, encode
from .fourier import (FourierSpectrum, LPError, SupportSet, approx_l1, inverse_wht,
                      iterated_sumset, sumset, wht)
from .l1_sampler import SparsifierParams, hoeffding_tail, required_samples, sparsify, sup_distance
from .oracle import (BranchTree, OracleLimitError, check_derivative_bound, error_report, exact_error,
                     monte_carlo_error, worst_case_error)
from .protocol import (Alice, Bob, BoundedErrorInstance, InProcessLink, ProtocolConfig,
                       ProtocolError, Transcript, cost_bound, pipeline_bounded_error,
                       run_exact, run_protocol, run_repeated)
from .qsim import QuantumState, ResourceCounter, prepare_state, prepare_state_circuit
from .rng import make_rng, spawn
from .transport import BobEndpoint, SocketLink, run_networked

__version__ = "0.1.0"
