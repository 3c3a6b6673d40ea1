"""Entropic entanglement witnesses for two-mode continuous-variable states.

Evaluates Shannon, Renyi (continuous and discrete) and Tsallis
separability criteria, plus second-order baselines, on joint quadrature
distributions; includes parameter-sweep tooling that maps detection
regions for the Hermite-Gauss, NOON and dephased-cat families.
"""

from .numerics import (
    Grid1D,
    SampledDensity1D,
    SampledFunction1D,
    TruncationWarning,
    convolve,
    fock_wavefunction,
    fourier_1d,
    fractional_fourier_1d,
    hermite_phys,
    integrate,
    log_gamma,
)
from .states import (
    CatParams,
    GaussianProductParams,
    HermiteGaussParams,
    JointDensity2D,
    NoonParams,
    PureGridState,
    QuadratureAngles,
    build_gaussian_product,
    build_hermite_gauss,
    build_noon,
    cat_joint_density,
    default_grid,
    joint_density_pure,
)
from .marginals import (
    CovarianceMatrix4,
    DiscreteDistribution,
    MarginalSet,
    cat_marginal_set,
    covariance_from_quadratures,
    discretize,
    gaussian_product_marginal_set,
    global_marginals,
    marginal_set_of_pure_state,
    variance,
)
from .entropies import (
    lalpha_norm,
    renyi_continuous,
    renyi_discrete,
    shannon_continuous,
    tsallis_discrete,
)
from .witnesses import (
    ALL_CRITERIA,
    DETECTION_TOL,
    EULER_GAMMA,
    ConjugateExponents,
    EvalConfig,
    EvaluationReport,
    StrongRenyiExponents,
    WitnessVerdict,
    conjugate_beta,
    covariance_for,
    evaluate_all,
    hermite_gauss_thresholds,
    marginal_set_for,
    mgvt,
    renyi_strong,
    renyi_weak,
    renyi_weak_discrete,
    shannon_strong,
    shannon_weak,
    simon_ppt,
    tsallis_witness,
    young_coefficient,
)
from .scans import (
    IngestResult,
    RegionMap,
    SampleTable,
    ScanConfig,
    find_boundary,
    hermite_gauss_simon_margin,
    hermite_gauss_weak_margin,
    ingest_samples,
    load_sample_table,
    sample_from_density,
    scan_cat,
    scan_hermite_gauss,
    scan_noon,
)

__version__ = "0.1.0"
