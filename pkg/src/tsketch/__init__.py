"""tsketch: element-wise tensor/matrix sparsification with spectral-norm
error measurement and Monte Carlo bound verification."""

from .bounds import (
    AlphaBeta,
    BoundReport,
    alpha_beta,
    bennett_tail,
    expectation_bound_a,
    expectation_bound_b,
    gaussian_slice_bound,
    per_mode_max_fiber_sq,
    proxy_spectral_norm,
    required_s,
    stable_rank,
    theorem2_verify,
)
from .experiments import (
    GeneratorSpec,
    SweepRow,
    error_sweep,
    gen_random_tensor,
    sweep_to_csv,
    verify_bennett,
    verify_theorem2_suite,
    verify_unbiasedness,
)
from .kernels import IMPL_NAME as KERNEL_IMPL
from .sparsify import (
    LevelBands,
    SketchResult,
    Thresholds,
    compute_thresholds,
    expected_nnz,
    level_decompose,
    sparsify,
    stream_sparsify,
)
from .spectral import (
    EpsilonNet,
    SpectralEstimate,
    build_epsilon_net,
    net_upper_bound,
    spectral_norm_matrix,
    spectral_norm_tensor_hopm,
    split_sphere_vector,
)
from .tensor import (
    DenseTensor,
    SparseTensor,
    TensorFormatError,
    frobenius_norm,
    load_dense,
    load_sparse,
    mode_contract,
    multi_contract,
    store_dense,
    store_sparse,
    to_dense,
    to_sparse,
)

__version__ = "0.1.0"
