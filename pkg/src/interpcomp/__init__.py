"""Signal reconstruction that compensates interpolation distortion.

Subpackages cover the sampling/interpolation operators, ideal lowpass
filtering, the cosine-module compensator, the iterative and hybrid
reconstruction engines with Chebyshev acceleration, closed-form convergence
and noise analysis, and a grayscale image enlargement benchmark.
"""

from .signal_core import (
    ConfigurationError,
    DenseImage,
    DenseSignal,
    GridSpec,
    UsageError,
    add_awgn,
    gen_bandlimited,
    gen_bandlimited2d,
    image_snr_db,
    psnr_db,
    snr_db,
)
from .samplers import (
    CoarseSamples,
    InterpKind,
    LatticeSamples,
    interpolate,
    interpolate2d,
    sample,
    sample_lattice,
)
from .spectral import LowpassSpec, lowpass, lowpass2d
from .modular import cosine_mix, cosine_mix2d, modular_reconstruct, modular_reconstruct2d
from .solver import (
    ChebyshevAccel,
    ReconConfig,
    ReconOperator,
    ReconOperator2D,
    ReconReport,
    SingularSystemError,
    apply_operator,
    apply_operator2d,
    chebyshev_iterate,
    chebyshev_iterate2d,
    chebyshev_lambdas,
    fixed_point_oracle,
    iterate,
    iterate2d,
)
from .analysis import (
    AnalysisResult,
    contraction_factor,
    distortion_gain,
    lambda_opt_minimax,
    lambda_opt_paper,
    noise_tolerance_coeff,
    op_counts,
    op_counts_2d,
    predicted_gain_db,
)
from .imagebench import (
    EnlargeConfig,
    GrayImage,
    decimate,
    enlarge,
    enlarge_dense,
    psnr_benchmark,
    read_pgm,
    synthetic_scene,
    write_pgm,
)

__version__ = "0.1.0"
