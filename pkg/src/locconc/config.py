"""Size caps and numeric tolerances shared across modules."""

MAX_STATEVECTOR_QUBITS = 24
MAX_DENSE_QUBITS = 12
MAX_EXHAUSTIVE_SUBSET_QUBITS = 10
MAX_ENUMERATION_QUBITS = 20
MAX_TENSOR_ENTRIES = 1 << 24
MAX_OGP_PAIRS = 10**7

PURGE_TOL = 1e-14
POWER_ITER_TOL = 1e-9
EXACT_ATOL = 1e-10
